#include "freedom/varieties.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

#include <mpfr.h>

namespace freedom {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = s.find_first_not_of(" \t\r\n"), b = s.find_last_not_of(" \t\r\n");
  if (a == std::string_view::npos) return {};
  return std::string(s.substr(a, b - a + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    std::size_t end = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, end == std::string_view::npos ? end : end - pos)));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return out;
}

long parse_long(const std::string& s) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size()) throw InputError("bad integer \"" + s + "\"");
  return v;
}

Monomial parse_term(const std::string& text, const std::vector<int>& dims) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw InputError("term needs \"coefficient : exponents\"");
  Monomial m;
  std::string c = trim(text.substr(0, colon));
  if (m.coefficient.set_str(c, 10) != 0) throw InputError("bad coefficient \"" + c + "\"");
  auto blocks = split(text.substr(colon + 1), '|');
  if (blocks.size() != dims.size()) throw InputError("term has the wrong number of factors");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    std::istringstream is(blocks[i]);
    std::vector<int> e;
    std::string tok;
    while (is >> tok) {
      long v = parse_long(tok);
      if (v < 0) throw InputError("negative exponent");
      e.push_back(static_cast<int>(v));
    }
    if (static_cast<int>(e.size()) != dims[i] + 1) throw InputError("term has the wrong number of exponents");
    m.exponents.push_back(std::move(e));
  }
  return m;
}

Integer ipow(const Integer& b, int e) {
  Integer out;
  mpz_pow_ui(out.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(e));
  return out;
}

void validate_dims(const std::vector<int>& dims) {
  if (dims.empty()) throw InputError("variety needs at least one factor");
  for (int d : dims)
    if (d < 1) throw InputError("factor dimension must be >= 1");
}

}  // namespace

VarietyDescriptor VarietyDescriptor::projective(int n) {
  validate_dims({n});
  VarietyDescriptor v;
  v.kind = Kind::projective;
  v.dims = {n};
  v.name = "P" + std::to_string(n);
  return v;
}

VarietyDescriptor VarietyDescriptor::product(std::vector<int> dims) {
  validate_dims(dims);
  if (dims.size() < 2) throw InputError("a product needs at least two factors");
  VarietyDescriptor v;
  v.kind = Kind::product;
  for (std::size_t i = 0; i < dims.size(); ++i) v.name += (i ? "x" : "") + ("P" + std::to_string(dims[i]));
  v.dims = std::move(dims);
  return v;
}

VarietyDescriptor VarietyDescriptor::hypersurface(std::vector<int> dims, std::vector<Monomial> equation,
                                                  std::vector<Rational> weights) {
  validate_dims(dims);
  VarietyDescriptor v;
  v.kind = Kind::hypersurface;
  v.dims = std::move(dims);
  v.name = "hypersurface";
  bool nonzero = false;
  for (const auto& m : equation) {
    if (m.exponents.size() != v.dims.size()) throw InputError("term has the wrong number of factors");
    for (std::size_t i = 0; i < v.dims.size(); ++i)
      if (static_cast<int>(m.exponents[i].size()) != v.dims[i] + 1)
        throw InputError("term has the wrong number of exponents");
    nonzero = nonzero || m.coefficient != 0;
  }
  if (!nonzero) throw InputError("hypersurface equation is zero");
  if (!weights.empty() && weights.size() != v.dims.size())
    throw InputError("one height weight per factor");
  for (const auto& w : weights)
    if (w <= 0) throw InputError("height weights must be positive");
  v.equation = std::move(equation);
  v.height_weights = std::move(weights);
  v.multidegree();
  return v;
}

VarietyDescriptor VarietyDescriptor::preset(std::string_view name) {
  std::string n = trim(name);
  if (n == "BT") {
    std::vector<Monomial> eq;
    for (int i = 0; i < 4; ++i) {
      Monomial m{1, {std::vector<int>(4, 0), std::vector<int>(4, 0)}};
      m.exponents[0][static_cast<std::size_t>(i)] = 3;
      m.exponents[1][static_cast<std::size_t>(i)] = 1;
      eq.push_back(m);
    }
    auto v = hypersurface({3, 3}, eq, {1, 3});
    v.name = "BT";
    return v;
  }
  if (n == "quadric") {
    std::vector<Monomial> eq;
    for (int i = 0; i < 5; ++i) {
      Monomial m{i < 3 ? 1 : -1, {std::vector<int>(5, 0)}};
      m.exponents[0][static_cast<std::size_t>(i)] = 2;
      eq.push_back(m);
    }
    auto v = hypersurface({4}, eq);
    v.name = "quadric";
    return v;
  }
  std::vector<int> dims;
  for (const auto& part : split(n, 'x')) {
    if (part.size() < 2 || (part[0] != 'P' && part[0] != 'p')) throw InputError("unknown variety \"" + n + "\"");
    dims.push_back(static_cast<int>(parse_long(part.substr(1))));
  }
  return dims.size() == 1 ? projective(dims[0]) : product(dims);
}

int VarietyDescriptor::dimension() const {
  int d = std::accumulate(dims.begin(), dims.end(), 0);
  return kind == Kind::hypersurface ? d - 1 : d;
}

std::vector<int> VarietyDescriptor::multidegree() const {
  std::vector<int> deg;
  for (const auto& m : equation) {
    if (m.coefficient == 0) continue;
    std::vector<int> d;
    for (const auto& e : m.exponents) d.push_back(std::accumulate(e.begin(), e.end(), 0));
    if (deg.empty())
      deg = d;
    else if (deg != d)
      throw InputError("equation is not multihomogeneous");
  }
  return deg;
}

Rational VarietyDescriptor::weight(std::size_t factor) const {
  return height_weights.empty() ? Rational(1) : height_weights[factor];
}

ConfigMap parse_config(std::string_view text) {
  ConfigMap out;
  std::istringstream is{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) throw InputError("config line " + std::to_string(number) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw InputError("config line " + std::to_string(number) + ": empty key");
    out[key].push_back(trim(t.substr(eq + 1)));
  }
  return out;
}

VarietyDescriptor variety_from_config(const ConfigMap& config) {
  auto single = [&](const std::string& key) -> std::optional<std::string> {
    auto it = config.find(key);
    if (it == config.end()) return std::nullopt;
    if (it->second.size() != 1) throw InputError("config key \"" + key + "\" given more than once");
    return it->second.front();
  };
  auto kind = single("kind");
  if (!kind) {
    if (auto v = single("variety")) return VarietyDescriptor::preset(*v);
    throw InputError("config needs \"kind\" or \"variety\"");
  }
  auto dims_text = single("dims");
  if (!dims_text) throw InputError("config needs \"dims\"");
  std::vector<int> dims;
  for (const auto& d : split(*dims_text, ',')) dims.push_back(static_cast<int>(parse_long(d)));
  VarietyDescriptor v;
  if (*kind == "projective") {
    if (dims.size() != 1) throw InputError("projective takes one dimension");
    v = VarietyDescriptor::projective(dims[0]);
  } else if (*kind == "product") {
    v = VarietyDescriptor::product(dims);
  } else if (*kind == "hypersurface") {
    std::vector<Monomial> eq;
    auto it = config.find("term");
    if (it == config.end()) throw InputError("hypersurface needs at least one \"term\"");
    for (const auto& t : it->second) eq.push_back(parse_term(t, dims));
    std::vector<Rational> weights;
    if (auto w = single("weights"))
      for (const auto& x : split(*w, ',')) weights.push_back(parse_rational(x));
    v = VarietyDescriptor::hypersurface(dims, eq, weights);
  } else {
    throw InputError("unknown kind \"" + *kind + "\"");
  }
  if (auto name = single("name")) v.name = *name;
  return v;
}

VarietyPoint VarietyPoint::parse(const VarietyDescriptor& variety, std::string_view text) {
  VarietyPoint p;
  for (const auto& part : split(text, ';')) p.factors.push_back(ProjectivePoint::parse(part));
  if (p.factors.size() != variety.dims.size()) throw InputError("point has the wrong number of factors");
  for (std::size_t i = 0; i < p.factors.size(); ++i)
    if (p.factors[i].dimension() != variety.dims[i]) throw InputError("point has the wrong number of coordinates");
  if (variety.kind == VarietyDescriptor::Kind::hypersurface && evaluate(variety, p) != 0)
    throw InputError("point is not on the variety");
  return p;
}

std::string VarietyPoint::str() const {
  std::string out;
  for (std::size_t i = 0; i < factors.size(); ++i) out += (i ? " ; " : "") + factors[i].str();
  return out;
}

Integer evaluate(const VarietyDescriptor& variety, const VarietyPoint& p) {
  Integer total = 0;
  for (const auto& m : variety.equation) {
    Integer t = m.coefficient;
    for (std::size_t i = 0; i < m.exponents.size(); ++i)
      for (std::size_t j = 0; j < m.exponents[i].size(); ++j)
        if (m.exponents[i][j] != 0) t *= ipow(Integer(static_cast<long>(p.factors[i][j])), m.exponents[i][j]);
    total += t;
  }
  return total;
}

std::vector<IntVector> gradient(const VarietyDescriptor& variety, const VarietyPoint& p) {
  std::vector<IntVector> g;
  for (std::size_t i = 0; i < p.factors.size(); ++i)
    g.push_back(IntVector::Zero(static_cast<Eigen::Index>(p.factors[i].coords().size())));
  for (const auto& m : variety.equation) {
    for (std::size_t i = 0; i < m.exponents.size(); ++i)
      for (std::size_t j = 0; j < m.exponents[i].size(); ++j) {
        int e = m.exponents[i][j];
        if (e == 0) continue;
        Integer t = m.coefficient * e;
        for (std::size_t a = 0; a < m.exponents.size(); ++a)
          for (std::size_t b = 0; b < m.exponents[a].size(); ++b) {
            int k = m.exponents[a][b] - (a == i && b == j ? 1 : 0);
            if (k != 0) t *= ipow(Integer(static_cast<long>(p.factors[a][b])), k);
          }
        g[i](static_cast<Eigen::Index>(j)) += t;
      }
  }
  return g;
}

LogValue product_height(const VarietyDescriptor& variety, const VarietyPoint& p) {
  LogValue h;
  for (std::size_t i = 0; i < p.factors.size(); ++i) h += height(p.factors[i]) * variety.weight(i);
  return h;
}

EuclideanLattice product_tangent_lattice(const VarietyPoint& p) {
  EuclideanLattice out;
  for (const auto& x : p.factors) out = direct_sum(out, tangent_lattice(x));
  return out;
}

FreedomValue product_freedom(const VarietyPoint& p) {
  LogValue total_height;
  std::optional<LogValue> smallest;
  long total_dim = 0;
  for (const auto& x : p.factors) {
    LogValue h = height(x);
    if (h.sign() <= 0) return FreedomValue();
    FreedomReport r = freedom_report(x);
    if (!smallest || r.mu_min < *smallest) smallest = r.mu_min;
    total_height += h;
    total_dim += x.dimension();
  }
  return FreedomValue(*smallest * Rational(total_dim), total_height);
}

HypersurfaceTangent hypersurface_tangent_lattice(const VarietyDescriptor& variety, const VarietyPoint& p) {
  if (variety.kind != VarietyDescriptor::Kind::hypersurface) throw InputError("not a hypersurface");
  if (evaluate(variety, p) != 0) throw InputError("point is not on the variety");
  auto g = gradient(variety, p);
  bool critical = true;
  for (const auto& gi : g) critical = critical && gi.isZero();
  if (critical) throw InputError("point is critical");

  EuclideanLattice ambient;
  std::vector<IntVector> pieces;
  for (std::size_t i = 0; i < p.factors.size(); ++i) {
    TangentLattice t = tangent_lattice_with_basis(p.factors[i]);
    ambient = direct_sum(ambient, t.lattice);
    // The differential is well defined on the quotient since g_i . x_i = deg_i f(x) = 0.
    pieces.push_back(IntVector(t.basis * g[i]));
  }
  IntVector d(ambient.rank());
  Eigen::Index at = 0;
  for (const auto& piece : pieces) {
    d.segment(at, piece.size()) = piece;
    at += piece.size();
  }
  IntMatrix form(1, d.size());
  form.row(0) = d.transpose();
  IntMatrix k = integer_kernel(form);
  return {EuclideanLattice(restrict_form(ambient.form(), k)), k, d};
}

FreedomReport variety_freedom(const VarietyDescriptor& variety, const VarietyPoint& p,
                              const NewtonPolygonOptions& options) {
  switch (variety.kind) {
    case VarietyDescriptor::Kind::projective:
      return freedom_report(p.factors.at(0), options);
    case VarietyDescriptor::Kind::product: {
      LogValue h;
      for (const auto& x : p.factors) h += height(x);
      return freedom_from_lattice(product_tangent_lattice(p), h, options);
    }
    case VarietyDescriptor::Kind::hypersurface: {
      auto t = hypersurface_tangent_lattice(variety, p);
      return freedom_from_lattice(t.lattice, degree(t.lattice), options);
    }
  }
  throw InvariantError("unknown variety kind");
}

EpsilonFunction::EpsilonFunction(Rational alpha) : alpha_(std::move(alpha)) {
  alpha_.canonicalize();
  if (alpha_ <= 0) throw InputError("alpha must be positive");
}

double EpsilonFunction::operator()(double t) const {
  if (!(t > 1)) throw InputError("epsilon is defined for t > 1");
  if (t <= std::exp(1.0)) return 0.5;
  double l = std::max(1.0, std::log(std::log(t)));
  return std::min(0.5, std::pow(l, -alpha_.get_d()));
}

namespace {

double log_rational(const Rational& t) {
  long e1 = 0, e2 = 0;
  double m1 = mpz_get_d_2exp(&e1, t.get_num_mpz_t());
  double m2 = mpz_get_d_2exp(&e2, t.get_den_mpz_t());
  return std::log(m1) - std::log(m2) + static_cast<double>(e1 - e2) * std::log(2.0);
}

}  // namespace

double EpsilonFunction::operator()(const Rational& t) const {
  if (t <= 1) throw InputError("epsilon is defined for t > 1");
  double lt = log_rational(t);
  if (lt <= 1) return 0.5;
  double l = std::max(1.0, std::log(lt));
  return std::min(0.5, std::pow(l, -alpha_.get_d()));
}

Rational epsilon_rational(const EpsilonFunction& eps, const Rational& t, EpsRounding rounding) {
  if (t <= 1) throw InputError("epsilon is defined for t > 1");
  // ln t, ln ln t and the power at 256 bits; the grid 2^-64 is far coarser.
  const mpfr_prec_t prec = 256;
  mpfr_t a, b, x;
  mpfr_inits2(prec, a, b, x, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_z(a, t.get_num_mpz_t(), MPFR_RNDN);
  mpfr_set_z(b, t.get_den_mpz_t(), MPFR_RNDN);
  mpfr_log(a, a, MPFR_RNDN);
  mpfr_log(b, b, MPFR_RNDN);
  mpfr_sub(x, a, b, MPFR_RNDN);  // ln t
  Rational out(1, 2);
  if (mpfr_cmp_ui(x, 1) > 0) {
    mpfr_log(x, x, MPFR_RNDN);  // ln ln t
    if (mpfr_cmp_ui(x, 1) > 0) {
      // x^{-alpha} = exp(-alpha ln x)
      mpfr_log(x, x, MPFR_RNDN);
      mpfr_mul_z(x, x, eps.alpha().get_num_mpz_t(), MPFR_RNDN);
      mpfr_div_z(x, x, eps.alpha().get_den_mpz_t(), MPFR_RNDN);
      mpfr_neg(x, x, MPFR_RNDN);
      mpfr_exp(x, x, MPFR_RNDN);
      if (mpfr_cmp_d(x, 0.5) < 0) {
        mpfr_mul_2ui(x, x, 64, MPFR_RNDN);
        Integer z;
        if (rounding == EpsRounding::in)
          mpfr_get_z(z.get_mpz_t(), x, MPFR_RNDD);
        else
          mpfr_get_z(z.get_mpz_t(), x, MPFR_RNDU);
        Integer den;
        mpz_ui_pow_ui(den.get_mpz_t(), 2, 64);
        out = Rational(z, den);
        out.canonicalize();
      }
    }
  }
  mpfr_clears(a, b, x, static_cast<mpfr_ptr>(nullptr));
  return out;
}

ClassCheck epsilon_class_check(const EpsilonFunction& eps, const std::vector<double>& grid,
                               const std::vector<double>& exponents) {
  ClassCheck c;
  const double tol = 1e-12;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    double t0 = grid[i - 1], t1 = grid[i];
    if (!(t1 > t0)) throw InputError("grid must be increasing");
    double e0 = eps(t0), e1 = eps(t1);
    if (e1 > e0 * (1 + tol)) c.decreasing = false;
    for (double a : exponents)
      if (std::pow(std::log(t1), a) * e1 < std::pow(std::log(t0), a) * e0 * (1 - tol)) c.scaled_increasing = false;
    if (std::sqrt(std::log(t1)) * e1 < std::sqrt(std::log(t0)) * e0 * (1 - tol)) c.half_increasing = false;
  }
  return c;
}

namespace {

// Largest s with s^{w(n+1)} * base <= B^2 for integral weight w.
std::uint64_t fiber_norm_bound(int n, long w, const Rational& base_factor, const Rational& bound) {
  Rational target = bound * bound / base_factor;
  if (target < 1) return 0;
  auto fits = [&](std::uint64_t s) {
    Integer p;
    mpz_ui_pow_ui(p.get_mpz_t(), s, static_cast<unsigned long>(w * (n + 1)));
    return Rational(p) <= target;
  };
  double guess = std::pow(target.get_d(), 1.0 / static_cast<double>(w * (n + 1)));
  auto s = static_cast<std::uint64_t>(std::max(1.0, std::floor(guess)));
  while (s > 0 && !fits(s)) --s;
  while (fits(s + 1)) ++s;
  return s;
}

std::uint64_t isqrt(std::uint64_t v) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

// Integer d-th root of v if it exists.
std::optional<Integer> exact_root(const Integer& v, int d) {
  if (v < 0 && d % 2 == 0) return std::nullopt;
  Integer a = abs(v), r;
  if (mpz_root(r.get_mpz_t(), a.get_mpz_t(), static_cast<unsigned long>(d)) == 0) return std::nullopt;
  return v < 0 ? Integer(-r) : r;
}

// Points x of P^n with sum x^2 <= s_max solving the equation with the last
// factor fixed to y; x_n is solved for when it occurs as a pure power in a
// single monomial, otherwise scanned.
std::vector<ProjectivePoint> fiber_points(const VarietyDescriptor& v, const ProjectivePoint& y,
                                          std::uint64_t s_max) {
  const int n = v.dims[0];
  const auto last = static_cast<std::size_t>(n);
  // Specialize the equation at y: coefficient times x-monomial.
  std::vector<std::pair<Integer, std::vector<int>>> terms;
  for (const auto& m : v.equation) {
    Integer c = m.coefficient;
    for (std::size_t j = 0; j < m.exponents[1].size(); ++j)
      if (m.exponents[1][j] != 0) c *= ipow(Integer(static_cast<long>(y[j])), m.exponents[1][j]);
    if (c != 0) terms.emplace_back(c, m.exponents[0]);
  }
  std::optional<std::size_t> pure;
  int pure_degree = 0;
  bool solvable = true;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const auto& e = terms[k].second;
    if (e[last] == 0) continue;
    bool only_last = std::count(e.begin(), e.end(), 0) == static_cast<long>(e.size()) - 1;
    if (!only_last || pure) solvable = false;
    pure = k;
    pure_degree = e[last];
  }
  if (!pure) solvable = false;

  std::vector<std::pair<std::uint64_t, std::vector<std::int64_t>>> found;
  std::vector<std::int64_t> x(last + 1, 0);
  auto rest_value = [&]() {
    Integer total = 0;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      if (solvable && k == *pure) continue;
      Integer t = terms[k].first;
      for (std::size_t j = 0; j < terms[k].second.size(); ++j)
        if (terms[k].second[j] != 0) t *= ipow(Integer(static_cast<long>(x[j])), terms[k].second[j]);
      total += t;
    }
    return total;
  };
  auto accept = [&](std::uint64_t partial, bool all_zero, std::int64_t g, std::int64_t t) {
    if (all_zero && t <= 0) return;
    if (std::gcd(g, t) != 1) return;
    auto tt = static_cast<std::uint64_t>(t < 0 ? -t : t);
    if (partial + tt * tt > s_max) return;
    x[last] = t;
    found.emplace_back(partial + tt * tt, x);
  };
  std::function<void(std::size_t, std::uint64_t, bool, std::int64_t)> descend =
      [&](std::size_t i, std::uint64_t partial, bool all_zero, std::int64_t g) {
        if (i == last) {
          auto r = static_cast<std::int64_t>(isqrt(s_max - partial));
          if (solvable) {
            x[last] = 0;
            Integer rhs = -rest_value();
            const Integer& a = terms[*pure].first;
            if (rhs % a != 0) return;
            auto root = exact_root(rhs / a, pure_degree);
            if (!root || abs(*root) > r) return;
            std::int64_t t = root->get_si();
            accept(partial, all_zero, g, t);
            if (pure_degree % 2 == 0 && t != 0) accept(partial, all_zero, g, -t);
          } else {
            for (std::int64_t t = -r; t <= r; ++t) {
              x[last] = t;
              if (rest_value() == 0) accept(partial, all_zero, g, t);
            }
          }
          return;
        }
        auto r = static_cast<std::int64_t>(isqrt(s_max - partial));
        for (std::int64_t c = all_zero ? 0 : -r; c <= r; ++c) {
          x[i] = c;
          descend(i + 1, partial + static_cast<std::uint64_t>(c * c), all_zero && c == 0, std::gcd(g, c));
        }
        x[i] = 0;
      };
  if (s_max > 0) descend(0, 0, true, 0);
  std::sort(found.begin(), found.end());
  std::vector<ProjectivePoint> out;
  for (auto& f : found) out.emplace_back(std::move(f.second));
  return out;
}

}  // namespace

FiberReport fiber_decay_report(const VarietyDescriptor& variety, const ProjectivePoint& base,
                               const Rational& bound, const EpsilonFunction& eps, EpsRounding rounding) {
  if (variety.dims.size() != 2 || variety.kind == VarietyDescriptor::Kind::projective)
    throw InputError("fiber scans need a two-factor product or a hypersurface in one");
  if (base.dimension() != variety.dims[1]) throw InputError("base point has the wrong dimension");
  if (bound <= 1) throw InputError("height bound must be > 1");
  for (std::size_t i = 0; i < 2; ++i) {
    Rational w = variety.weight(i);
    if (w.get_den() != 1) throw InputError("fiber scans need integral height weights");
  }
  const bool hyper = variety.kind == VarietyDescriptor::Kind::hypersurface;
  const int n1 = variety.dims[0], n2 = variety.dims[1];
  const long w1 = variety.weight(0).get_num().get_si(), w2 = variety.weight(1).get_num().get_si();

  FiberReport report;
  report.base.factors = {base};
  report.bound = bound;
  report.eps = epsilon_rational(eps, bound, rounding);

  // H(x)^{w1} H(y)^{w2} <= B with H = s^{(n+1)/2}: s_x^{w1(n1+1)} s_y^{w2(n2+1)} <= B^2.
  Integer sy_pow;
  mpz_pow_ui(sy_pow.get_mpz_t(), base.norm2().get_mpz_t(), static_cast<unsigned long>(w2 * (n2 + 1)));
  std::uint64_t s_max = fiber_norm_bound(n1, w1, Rational(sy_pow), bound);

  std::vector<ProjectivePoint> xs;
  if (hyper) {
    xs = fiber_points(variety, base, s_max);
  } else if (s_max > 0) {
    for (const auto& chunk : std::vector<PointChunk>{{1, s_max + 1}})
      for (auto& p : enumerate_chunk(n1, chunk)) xs.push_back(std::move(p));
  }

  const LogValue log_bound = LogValue::log(bound);
  for (auto& x : xs) {
    FiberPoint fp;
    fp.point.factors = {x, base};
    fp.fiber_height = height(x);
    fp.height = product_height(variety, fp.point);
    if (fp.height > log_bound) continue;
    if (hyper) {
      auto g = gradient(variety, fp.point);
      if (g[0].isZero()) throw InputError("base point is a critical value");
      fp.freedom = variety_freedom(variety, fp.point).freedom;
    } else {
      fp.freedom = product_freedom(fp.point);
    }
    fp.eps_free = fp.freedom.at_least(report.eps);
    if (fp.eps_free && (!report.max_free_fiber_height || fp.fiber_height > *report.max_free_fiber_height))
      report.max_free_fiber_height = fp.fiber_height;
    report.points.push_back(std::move(fp));
  }
  const int m = n2, n = variety.dimension();
  report.log_bound_shape = static_cast<double>(m) / (n * report.eps.get_d()) * to_double(height(base));
  if (report.max_free_fiber_height)
    report.fitted_log_constant = to_double(*report.max_free_fiber_height) - report.log_bound_shape;
  return report;
}

}  // namespace freedom
