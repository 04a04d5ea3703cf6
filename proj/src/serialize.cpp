#include "freedom/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace freedom {

std::string rational_str(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_str();
}

std::string float_str(const LogValue& v) { return to_decimal(v, 64, 20); }

std::string float_str(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json as_json(const LogValue& v) {
  Json j;
  if (v.is_single()) {
    j["coefficient"] = rational_str(v.coefficient());
    j["base"] = rational_str(v.base());
  } else {
    Json terms = Json::array();
    for (const auto& t : v.terms()) terms.push_back({{"coefficient", rational_str(t.coefficient)}, {"base", rational_str(t.base)}});
    j["terms"] = terms;
  }
  j["float"] = float_str(v);
  return j;
}

Json lattice_to_json(const EuclideanLattice& lattice) {
  Json gram = Json::array();
  for (Eigen::Index i = 0; i < lattice.rank(); ++i)
    for (Eigen::Index k = 0; k < lattice.rank(); ++k) gram.push_back(rational_str(lattice.form()(i, k)));
  return {{"rank", lattice.rank()}, {"gram", gram}};
}

EuclideanLattice lattice_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("rank") || !j.contains("gram")) throw InputError("lattice JSON needs rank and gram");
  if (!j["rank"].is_number_integer()) throw InputError("lattice rank must be an integer");
  const auto n = j["rank"].get<long>();
  if (n < 0 || n > 64) throw InputError("lattice rank out of range");
  const Json& g = j["gram"];
  if (!g.is_array() || static_cast<long>(g.size()) != n * n) throw InputError("gram must hold rank^2 entries");
  RationalMatrix m(n, n);
  for (long i = 0; i < n * n; ++i) {
    const Json& e = g[static_cast<std::size_t>(i)];
    if (e.is_string()) m(i / n, i % n) = parse_rational(e.get<std::string>());
    else if (e.is_number_integer()) m(i / n, i % n) = Rational(e.get<long>());
    else throw InputError("gram entries must be \"p/q\" strings");
  }
  if (m != m.transpose()) throw InputError("gram is not symmetric");
  return EuclideanLattice(m);
}

EuclideanLattice lattice_from_text(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("malformed lattice JSON: ") + e.what());
  }
  return lattice_from_json(j);
}

Json as_json(const IntMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k).get_str());
    rows.push_back(row);
  }
  return rows;
}

Json as_json(const NewtonPolygon& p) {
  Json roof = Json::array(), slopes = Json::array(), witnesses = Json::array(), bounds = Json::array();
  for (const auto& v : p.roof) roof.push_back(as_json(v));
  for (const auto& v : p.slopes) slopes.push_back(as_json(v));
  for (const auto& w : p.witnesses) witnesses.push_back(as_json(w));
  for (std::size_t i = 0; i < p.certified_bounds.size(); ++i)
    bounds.push_back({{"radius2", rational_str(p.certified_bounds[i])}, {"dual", static_cast<bool>(p.searched_on_dual[i])}});
  return {{"rank", p.rank},
          {"roof", roof},
          {"slopes", slopes},
          {"hull_vertices", p.hull_vertices},
          {"witnesses", witnesses},
          {"search_bounds", bounds}};
}

Json as_json(const FreedomValue& l) {
  Json j;
  if (l.is_zero()) {
    j["exact"] = "0";
  } else {
    j["numerator"] = as_json(l.numerator());
    j["denominator"] = as_json(l.denominator());
    if (auto r = ratio(l.numerator(), l.denominator())) j["exact"] = rational_str(*r);
    else j["exact"] = l.str();
  }
  j["float"] = float_str(l.value());
  return j;
}

Json as_json(const FreedomReport& r) {
  return {{"height", as_json(r.height)},
          {"mu_min", as_json(r.mu_min)},
          {"mu_max", as_json(r.mu_max)},
          {"freedom", as_json(r.freedom)},
          {"witness", as_json(r.witness)}};
}

Json as_json(const FiberReport& r) {
  Json points = Json::array();
  for (const auto& p : r.points)
    points.push_back({{"point", p.point.str()},
                      {"fiber_height", float_str(p.fiber_height)},
                      {"height", float_str(p.height)},
                      {"freedom", float_str(p.freedom.value())},
                      {"eps_free", p.eps_free}});
  Json j{{"base", r.base.str()}, {"bound", rational_str(r.bound)}, {"eps", rational_str(r.eps)}};
  j["points"] = points;
  j["max_free_fiber_height"] = r.max_free_fiber_height ? Json(as_json(*r.max_free_fiber_height)) : Json(nullptr);
  j["log_bound_shape"] = float_str(r.log_bound_shape);
  j["fitted_log_constant"] = float_str(r.fitted_log_constant);
  return j;
}

Json as_json(const AsymptoticFit& f) {
  return {{"C", float_str(f.C)}, {"a", float_str(f.a)}, {"b", float_str(f.b)}, {"residual", float_str(f.residual)}};
}

std::string point_csv_header() { return "coords,H,h,mu_min,mu_max,freedom_float"; }

std::string point_csv_row(const std::string& coords, const FreedomReport& r) {
  std::ostringstream os;
  os << coords << ',' << float_str(std::exp(to_double(r.height))) << ',' << float_str(r.height) << ','
     << float_str(r.mu_min) << ',' << float_str(r.mu_max) << ',' << float_str(r.freedom.value());
  return os.str();
}

std::string count_csv_header() {
  std::string h = "variety,B,total,free,mean_freedom";
  char buf[16];
  for (int k = 0; k < kHistogramBins; ++k) {
    std::snprintf(buf, sizeof buf, ",bin_%02d", k);
    h += buf;
  }
  return h;
}

std::string count_csv_row(const std::string& variety, const CountRow& row) {
  std::ostringstream os;
  os << variety << ',' << rational_str(row.bound) << ',' << row.total << ',' << row.free << ','
     << float_str(row.mean_freedom);
  for (auto c : row.histogram) os << ',' << c;
  return os.str();
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string describe(const VarietyDescriptor& v) {
  std::ostringstream os;
  static const char* kinds[] = {"projective", "product", "hypersurface"};
  os << "kind=" << kinds[static_cast<int>(v.kind)] << ";dims=";
  for (std::size_t i = 0; i < v.dims.size(); ++i) os << (i ? "," : "") << v.dims[i];
  os << ";weights=";
  for (std::size_t i = 0; i < v.dims.size(); ++i) os << (i ? "," : "") << rational_str(v.weight(i));
  for (const auto& m : v.equation) {
    os << ";term=" << m.coefficient.get_str() << ':';
    for (std::size_t f = 0; f < m.exponents.size(); ++f) {
      os << (f ? "|" : "");
      for (std::size_t k = 0; k < m.exponents[f].size(); ++k) os << (k ? " " : "") << m.exponents[f][k];
    }
  }
  return os.str();
}

std::string build_describe() { return FREEDOM_GIT_DESCRIBE; }

Json as_json(const CountReport& r, const Json& provenance) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json j{{"B", rational_str(row.bound)},
           {"eps", rational_str(row.eps)},
           {"total", row.total},
           {"free", row.free},
           {"mean_freedom", float_str(row.mean_freedom)},
           {"histogram", row.histogram}};
    if (r.options.low_threshold) j["below_threshold"] = row.low;
    rows.push_back(j);
  }
  Json j{{"variety", r.variety.name}, {"descriptor", describe(r.variety)}, {"alpha", rational_str(r.options.alpha)}};
  j["rows"] = rows;
  j["fit"] = r.fit ? as_json(*r.fit) : Json(nullptr);
  j["power_fit"] = r.power_fit ? as_json(*r.power_fit) : Json(nullptr);
  j["provenance"] = provenance;
  return j;
}

}  // namespace freedom
