// freedom: slopes, freedom of points, eps-free counts, fits and fiber scans.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "freedom/serialize.hpp"

namespace fs = std::filesystem;
using namespace freedom;

namespace {

struct Settings {
  std::string config;
  std::string variety;
  std::string point;
  std::string bounds;
  std::string alpha = "1/2";
  std::string rounding = "in";
  unsigned workers = 1;
  std::string out;
  std::string format;
  int rank_cap = 6;
  std::string lattice;
  std::string input;
  std::string low;
  std::string model = "full";
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Config values fill in whatever was not given on the command line.
void apply_config(Settings& s, const CLI::App& cmd) {
  if (s.config.empty()) return;
  ConfigMap c = parse_config(read_file(s.config));
  auto take = [&](const char* key, std::string& field, const char* flag) {
    auto it = c.find(key);
    if (it != c.end() && cmd.count(flag) == 0) field = it->second.back();
  };
  take("point", s.point, "--point");
  take("bounds", s.bounds, "--bounds");
  take("alpha", s.alpha, "--alpha");
  take("eps-rounding", s.rounding, "--eps-rounding");
  take("out", s.out, "--out");
  take("format", s.format, "--format");
  take("lattice", s.lattice, "--lattice");
  take("input", s.input, "--input");
  take("low-threshold", s.low, "--low-threshold");
  if (auto it = c.find("workers"); it != c.end() && cmd.count("--workers") == 0)
    s.workers = static_cast<unsigned>(std::stoul(it->second.back()));
  if (auto it = c.find("rank-cap"); it != c.end() && cmd.count("--rank-cap") == 0)
    s.rank_cap = std::stoi(it->second.back());
  if (s.variety.empty() && (c.count("kind") || c.count("variety"))) s.variety = "@config";
}

VarietyDescriptor load_variety(const Settings& s) {
  if (s.variety == "@config") return variety_from_config(parse_config(read_file(s.config)));
  if (s.variety.empty()) throw InputError("--variety is required");
  if (fs::is_regular_file(s.variety)) return variety_from_config(parse_config(read_file(s.variety)));
  return VarietyDescriptor::preset(s.variety);
}

// P^n or a product of them, read off the shape of the point.
VarietyDescriptor variety_for_point(const Settings& s) {
  if (!s.variety.empty()) return load_variety(s);
  std::vector<int> dims;
  std::stringstream ss(s.point);
  for (std::string part; std::getline(ss, part, ';');)
    dims.push_back(static_cast<int>(std::count(part.begin(), part.end(), ':')));
  return dims.size() == 1 ? VarietyDescriptor::projective(dims[0]) : VarietyDescriptor::product(dims);
}

std::vector<Rational> parse_bounds(const std::string& text) {
  if (text.empty()) throw InputError("--bounds is required");
  std::vector<Rational> out;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ',');) out.push_back(parse_rational(part));
  for (std::size_t i = 1; i < out.size(); ++i)
    if (!(out[i - 1] < out[i])) throw InputError("bound grid must be strictly increasing");
  for (const auto& b : out)
    if (b < 1) throw InputError("bounds must be >= 1");
  return out;
}

EpsRounding parse_rounding(const std::string& r) {
  if (r == "in") return EpsRounding::in;
  if (r == "out") return EpsRounding::out;
  throw InputError("--eps-rounding must be in or out");
}

NewtonPolygonOptions polygon_options(const Settings& s) {
  NewtonPolygonOptions o;
  o.rank_cap = s.rank_cap;
  return o;
}

Json provenance(const std::string& command, const Settings& s, const std::string& variety_text) {
  std::ostringstream canon;
  canon << "command=" << command << '\n'
        << "variety=" << variety_text << '\n'
        << "point=" << s.point << '\n'
        << "bounds=" << s.bounds << '\n'
        << "alpha=" << s.alpha << '\n'
        << "eps-rounding=" << s.rounding << '\n'
        << "rank-cap=" << s.rank_cap << '\n'
        << "low-threshold=" << s.low << '\n';
  return {{"build", build_describe()},
          {"config_hash", hex64(fnv1a(canon.str()))},
          {"command", command},
          {"eps_policy",
           {{"function", "min(1/2, max(1, ln ln B)^-alpha)"},
            {"alpha", rational_str(parse_rational(s.alpha))},
            {"rounding", s.rounding == "out" ? "away from zero" : "toward zero"},
            {"denominator", "2^64"}}},
          {"search_bounds", {{"rank_cap", s.rank_cap}, {"bound_multiplier", "1"}}}};
}

// Writes to DIR/name, or stdout without --out.
class Sink {
 public:
  explicit Sink(std::string dir) : dir_(std::move(dir)) {
    if (dir_.empty()) return;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw InputError("cannot create output directory " + dir_);
  }
  void write(const std::string& name, const std::string& text) const {
    if (dir_.empty()) {
      std::cout << text;
      return;
    }
    fs::path p = fs::path(dir_) / name;
    std::ofstream f(p, std::ios::binary);
    if (!f || !(f << text)) throw InputError("cannot write " + p.string());
  }

 private:
  std::string dir_;
};

bool wants(const std::string& format, const char* kind, const char* fallback) {
  const std::string& f = format.empty() ? std::string(fallback) : format;
  if (f != "csv" && f != "json" && f != "both" && f != "text") throw InputError("unknown --format " + f);
  return f == kind || (f == "both" && std::string(kind) != "text");
}

std::string log_line(const LogValue& v) { return v.str() + " = " + float_str(v); }

std::string matrix_line(const IntMatrix& m) {
  std::ostringstream os;
  os << '[';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    os << (i ? ", " : "") << '(';
    for (Eigen::Index k = 0; k < m.cols(); ++k) os << (k ? "," : "") << m(i, k).get_str();
    os << ')';
  }
  os << ']';
  return os.str();
}

void cmd_slope(Settings& s) {
  if (s.lattice.empty()) throw InputError("--lattice FILE is required");
  EuclideanLattice lattice = lattice_from_text(read_file(s.lattice));
  NewtonPolygon p = newton_polygon(lattice, polygon_options(s));
  Sink sink(s.out);
  if (wants(s.format, "json", "text")) {
    Json j{{"lattice", lattice_to_json(lattice)}, {"polygon", as_json(p)}, {"provenance", provenance("slope", s, "")}};
    sink.write("slope.json", j.dump(2) + "\n");
  }
  if (wants(s.format, "text", "text")) {
    std::ostringstream os;
    os << "rank: " << p.rank << '\n';
    for (std::size_t i = 0; i < p.roof.size(); ++i) os << "roof[" << i << "]: " << log_line(p.roof[i]) << '\n';
    for (std::size_t i = 0; i < p.slopes.size(); ++i) os << "slope[" << i + 1 << "]: " << log_line(p.slopes[i]) << '\n';
    for (std::size_t i = 1; i < p.witnesses.size(); ++i) {
      os << "witness[" << i << "]: " << matrix_line(p.witnesses[i]);
      if (p.certified_bounds[i] != 0)
        os << "  search radius^2 " << rational_str(p.certified_bounds[i]) << (p.searched_on_dual[i] ? " (dual)" : "");
      os << '\n';
    }
    sink.write("slope.txt", os.str());
  }
}

void cmd_freedom(Settings& s) {
  if (s.point.empty()) throw InputError("--point is required");
  VarietyDescriptor v = variety_for_point(s);
  VarietyPoint p = VarietyPoint::parse(v, s.point);
  FreedomReport r = variety_freedom(v, p, polygon_options(s));
  Sink sink(s.out);
  if (wants(s.format, "json", "text")) {
    Json j{{"variety", v.name}, {"point", p.str()}};
    j["report"] = as_json(r);
    j["provenance"] = provenance("freedom", s, describe(v));
    sink.write("freedom.json", j.dump(2) + "\n");
  }
  if (wants(s.format, "csv", "text")) sink.write("freedom.csv", point_csv_header() + "\n" + point_csv_row(p.str(), r) + "\n");
  if (wants(s.format, "text", "text")) {
    std::ostringstream os;
    os << "variety: " << v.name << '\n'
       << "point: " << p.str() << '\n'
       << "h: " << log_line(r.height) << '\n'
       << "mu_min: " << log_line(r.mu_min) << '\n'
       << "mu_max: " << log_line(r.mu_max) << '\n';
    Json l = as_json(r.freedom);
    os << "l: " << l["exact"].get<std::string>() << " = " << l["float"].get<std::string>() << '\n'
       << "witness: " << matrix_line(r.witness) << '\n';
    sink.write("freedom.txt", os.str());
  }
}

void cmd_count(Settings& s) {
  VarietyDescriptor v = load_variety(s);
  CountOptions o;
  o.alpha = parse_rational(s.alpha);
  o.rounding = parse_rounding(s.rounding);
  o.workers = s.workers;
  if (!s.low.empty()) o.low_threshold = parse_rational(s.low);
  CountReport report = count_report(v, parse_bounds(s.bounds), o);
  Sink sink(s.out);
  if (wants(s.format, "csv", "csv")) {
    std::string csv = count_csv_header() + "\n";
    for (const auto& row : report.rows) csv += count_csv_row(v.name, row) + "\n";
    sink.write("count.csv", csv);
  }
  if (wants(s.format, "json", "csv")) {
    Json j = as_json(report, provenance("count", s, describe(v)));
    if (v.kind == VarietyDescriptor::Kind::product)
      j["caveat"] =
          "eps(B) = 1/2 while ln ln B <= 2^(1/alpha); the eps-free share of the log-height simplex then stays "
          "below 1 and the fitted (a, b, C) approach their limits only at the speed of ln ln B";
    sink.write("count.json", j.dump(2) + "\n");
  }
}

// Reads B and N columns from a CSV with a header: N is "free", "N" or
// "count".
void read_fit_input(const std::string& path, std::vector<double>& bs, std::vector<double>& ns) {
  std::stringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty fit input");
  auto cells = [](const std::string& l) {
    std::vector<std::string> out;
    std::stringstream ss(l);
    for (std::string c; std::getline(ss, c, ',');) out.push_back(c);
    return out;
  };
  auto header = cells(line);
  int bi = -1, ni = -1;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) {
    if (header[static_cast<std::size_t>(i)] == "B") bi = i;
    if (header[static_cast<std::size_t>(i)] == "free" || header[static_cast<std::size_t>(i)] == "N" ||
        (ni < 0 && header[static_cast<std::size_t>(i)] == "count"))
      ni = i;
  }
  if (bi < 0 || ni < 0) throw InputError("fit input needs B and N (or free) columns");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto c = cells(line);
    if (static_cast<int>(c.size()) <= std::max(bi, ni)) throw InputError("short row in fit input");
    bs.push_back(parse_rational(c[static_cast<std::size_t>(bi)]).get_d());
    try {
      ns.push_back(std::stod(c[static_cast<std::size_t>(ni)]));
    } catch (const std::exception&) {
      throw InputError("malformed count '" + c[static_cast<std::size_t>(ni)] + "'");
    }
  }
}

void cmd_fit(Settings& s) {
  if (s.input.empty()) throw InputError("--input CSV is required");
  std::vector<double> bs, ns;
  read_fit_input(s.input, bs, ns);
  if (s.model != "full" && s.model != "power") throw InputError("--model must be full or power");
  AsymptoticFit f = s.model == "full" ? fit_asymptotic(bs, ns) : fit_power(bs, ns);
  Sink sink(s.out);
  if (wants(s.format, "csv", "csv"))
    sink.write("fit.csv", "model,C,a,b,residual\n" + s.model + "," + float_str(f.C) + "," + float_str(f.a) + "," +
                              float_str(f.b) + "," + float_str(f.residual) + "\n");
  if (wants(s.format, "json", "csv")) {
    Json j{{"model", s.model}, {"points", bs.size()}, {"fit", as_json(f)}};
    j["provenance"] = provenance("fit", s, "");
    j["provenance"]["input_hash"] = hex64(fnv1a(read_file(s.input)));
    sink.write("fit.json", j.dump(2) + "\n");
  }
}

void cmd_fiber_scan(Settings& s) {
  VarietyDescriptor v = load_variety(s);
  if (s.point.empty()) throw InputError("--point (the base point) is required");
  ProjectivePoint base = ProjectivePoint::parse(s.point);
  EpsilonFunction eps(parse_rational(s.alpha));
  Sink sink(s.out);
  Json reports = Json::array();
  std::string csv = "B,point,fiber_height,height,freedom,eps_free\n";
  for (const auto& b : parse_bounds(s.bounds)) {
    FiberReport r = fiber_decay_report(v, base, b, eps, parse_rounding(s.rounding));
    reports.push_back(as_json(r));
    for (const auto& p : r.points)
      csv += rational_str(b) + "," + p.point.str() + "," + float_str(p.fiber_height) + "," + float_str(p.height) + "," +
             float_str(p.freedom.value()) + "," + (p.eps_free ? "1" : "0") + "\n";
  }
  if (wants(s.format, "json", "json")) {
    Json j{{"variety", v.name}, {"base", base.str()}};
    j["reports"] = reports;
    j["provenance"] = provenance("fiber-scan", s, describe(v));
    sink.write("fiber.json", j.dump(2) + "\n");
  }
  if (wants(s.format, "csv", "json")) sink.write("fiber.csv", csv);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Freedom of rational points: slopes, counts, fits and fiber scans"};
  app.require_subcommand(1);
  Settings s;

  auto common = [&](CLI::App* c) {
    c->add_option("--config", s.config, "key = value run configuration")->check(CLI::ExistingFile);
    c->add_option("--out", s.out, "output directory (stdout if absent)");
    c->add_option("--format", s.format, "csv, json, both or text");
    c->add_option("--rank-cap", s.rank_cap, "largest lattice rank for Newton polygons")->check(CLI::Range(1, 8));
  };
  auto counting = [&](CLI::App* c) {
    c->add_option("--variety", s.variety, "preset (P2, P1xP1, BT, quadric) or config file");
    c->add_option("--bounds", s.bounds, "b1,b2,... strictly increasing");
    c->add_option("--alpha", s.alpha, "epsilon exponent p/q");
    c->add_option("--eps-rounding", s.rounding, "in or out");
    c->add_option("--workers", s.workers, "worker threads")->check(CLI::PositiveNumber);
  };

  auto* slope = app.add_subcommand("slope", "Newton polygon of a lattice JSON file");
  common(slope);
  slope->add_option("--lattice,lattice", s.lattice, "lattice JSON {rank, gram}");

  auto* point_cmd = app.add_subcommand("freedom", "height, slopes and freedom of a point");
  common(point_cmd);
  point_cmd->add_option("--variety", s.variety, "preset or config file; inferred from the point if absent");
  point_cmd->add_option("--point", s.point, "x0:x1:... (factors separated by ';')");

  auto* count = app.add_subcommand("count", "eps-free counts on a grid of bounds");
  common(count);
  counting(count);
  count->add_option("--low-threshold", s.low, "also count points with l below this rational");

  auto* fit = app.add_subcommand("fit", "least-squares fit of C B^a (ln B)^(b-1)");
  common(fit);
  fit->add_option("--input,input", s.input, "CSV with B and N (or free) columns");
  fit->add_option("--model", s.model, "full or power");

  auto* fiber = app.add_subcommand("fiber-scan", "points of one fiber with their freedom");
  common(fiber);
  counting(fiber);
  fiber->add_option("--point", s.point, "base point of the last factor");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    apply_config(s, *cmd);
    if (s.workers < 1) throw InputError("--workers must be >= 1");
    if (cmd == slope) cmd_slope(s);
    else if (cmd == point_cmd) cmd_freedom(s);
    else if (cmd == count) cmd_count(s);
    else if (cmd == fit) cmd_fit(s);
    else cmd_fiber_scan(s);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: malformed number in configuration\n";
    return 2;
  } catch (const InvariantError& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
