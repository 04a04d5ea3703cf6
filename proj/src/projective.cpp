#include "freedom/projective.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace freedom {

ProjectivePoint::ProjectivePoint(std::vector<std::int64_t> coords) : coords_(std::move(coords)) {
  if (coords_.size() < 2) throw InputError("a projective point needs at least two coordinates");
  std::int64_t g = 0;
  for (auto c : coords_) g = std::gcd(g, c);
  if (g == 0) throw InputError("all coordinates are zero");
  auto lead = std::find_if(coords_.begin(), coords_.end(), [](std::int64_t c) { return c != 0; });
  if (*lead < 0) g = -g;
  for (auto& c : coords_) c /= g;
}

ProjectivePoint ProjectivePoint::parse(std::string_view text) {
  std::vector<std::int64_t> coords;
  std::size_t pos = 0;
  for (;;) {
    std::size_t end = text.find(':', pos);
    std::string field(text.substr(pos, end == std::string_view::npos ? end : end - pos));
    std::size_t a = field.find_first_not_of(" \t"), b = field.find_last_not_of(" \t");
    if (a == std::string::npos) throw InputError("empty coordinate in point \"" + std::string(text) + "\"");
    field = field.substr(a, b - a + 1);
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(field, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != field.size()) throw InputError("bad coordinate \"" + field + "\"");
    coords.push_back(v);
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return ProjectivePoint(std::move(coords));
}

Integer ProjectivePoint::norm2() const {
  Integer s = 0;
  for (auto c : coords_) {
    Integer z(static_cast<long>(c));
    s += z * z;
  }
  return s;
}

IntVector ProjectivePoint::vector() const {
  IntVector v(static_cast<Eigen::Index>(coords_.size()));
  for (std::size_t i = 0; i < coords_.size(); ++i) v(static_cast<Eigen::Index>(i)) = static_cast<long>(coords_[i]);
  return v;
}

std::string ProjectivePoint::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < coords_.size(); ++i) os << (i ? ":" : "") << coords_[i];
  return os.str();
}

LogValue height(const ProjectivePoint& x) {
  return LogValue(Rational(x.dimension() + 1, 2), Rational(x.norm2()));
}

TangentLattice tangent_lattice_with_basis(const ProjectivePoint& x) {
  const Eigen::Index n1 = x.dimension() + 1;
  IntMatrix line(1, n1);
  line.row(0) = x.vector().transpose();
  Quotient q = quotient_with_basis(EuclideanLattice::standard(n1), line);
  return {scale(q.lattice, Rational(1) / Rational(x.norm2())), q.complement};
}

FreedomValue::FreedomValue(LogValue numerator, LogValue denominator)
    : numerator_(std::move(numerator)), denominator_(std::move(denominator)) {
  if (numerator_.sign() <= 0 || denominator_.sign() <= 0) numerator_ = LogValue();
}

double FreedomValue::value() const {
  if (is_zero()) return 0.0;
  if (numerator_ == denominator_) return 1.0;
  return to_double(numerator_) / to_double(denominator_);
}

int FreedomValue::compare(const Rational& t) const {
  if (is_zero()) return -sgn(t);
  return freedom::compare(numerator_, denominator_ * t);
}

std::string FreedomValue::str() const {
  if (is_zero()) return "0";
  return "(" + numerator_.str() + ") / (" + denominator_.str() + ")";
}

int compare(const FreedomValue& a, const FreedomValue& b) {
  if (a.is_zero() || b.is_zero()) return static_cast<int>(!a.is_zero()) - static_cast<int>(!b.is_zero());
  return compare_ratios(a.numerator(), a.denominator(), b.numerator(), b.denominator());
}

FreedomReport freedom_from_lattice(const EuclideanLattice& tangent, const LogValue& h,
                                   const NewtonPolygonOptions& options) {
  NewtonPolygon poly = newton_polygon(tangent, options);
  FreedomReport r;
  r.height = h;
  r.mu_min = poly.mu_min();
  r.mu_max = poly.mu_max();
  r.freedom = FreedomValue(r.mu_min * Rational(static_cast<long>(poly.rank)), h);
  const auto& hull = poly.hull_vertices;
  r.witness = poly.witnesses[static_cast<std::size_t>(hull[hull.size() - 2])];
  return r;
}

FreedomReport freedom_report(const ProjectivePoint& x, const NewtonPolygonOptions& options) {
  return freedom_from_lattice(tangent_lattice(x), height(x), options);
}

FormulaResult freedom_formula(const ProjectivePoint& x, const NewtonPolygonOptions& options) {
  const LogValue h = height(x);
  if (h.sign() <= 0) throw InputError("freedom undefined by formula; use convention l = 0");
  const int n = x.dimension();
  IntMatrix line(1, n + 1);
  line.row(0) = x.vector().transpose();
  IntMatrix k = integer_kernel(line);
  EuclideanLattice perp(restrict_form(RationalMatrix::Identity(n + 1, n + 1), k));
  NewtonPolygon poly = newton_polygon(perp, options);

  // -deg F = -deg(W) for the annihilator W of F, a saturated rank-codim
  // sublattice of x^perp.
  int best_c = 0;
  LogValue best;
  for (int c = 1; c <= n; ++c) {
    LogValue term = -poly.max_degree[static_cast<std::size_t>(c)] / Rational(c);
    if (best_c == 0 || term < best) {
      best = term;
      best_c = c;
    }
  }
  FormulaResult out;
  out.codimension = best_c;
  out.freedom = FreedomValue(h * Rational(n, n + 1) + best * Rational(n), h);
  IntMatrix w = poly.witnesses[static_cast<std::size_t>(best_c)] * k;
  out.subspace = hermite_normal_form(integer_kernel(w));
  return out;
}

namespace {

using i128 = __int128;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Squared length of a shortest nonzero vector of the rank-2 form
// [[a, b], [b, c]] by Lagrange-Gauss reduction.
i128 shortest_norm2(i128 a, i128 b, i128 c) {
  for (;;) {
    if (a > c) std::swap(a, c);
    // Reduce the second vector against the first: q = round(b / a).
    i128 q = (2 * b + a) / (2 * a);
    if (2 * b + a < 0 && (2 * b + a) % (2 * a) != 0) --q;
    if (q == 0) return a;
    c = c - 2 * q * b + q * q * a;
    b = b - q * a;
  }
}

std::int64_t xgcd(std::int64_t a, std::int64_t b, std::int64_t& u, std::int64_t& v) {
  std::int64_t u0 = 1, v0 = 0, u1 = 0, v1 = 1;
  while (b != 0) {
    std::int64_t q = floor_div(a, b);
    std::int64_t r = a - q * b;
    a = b;
    b = r;
    std::int64_t t = u0 - q * u1;
    u0 = u1;
    u1 = t;
    t = v0 - q * v1;
    v0 = v1;
    v1 = t;
  }
  if (a < 0) {
    a = -a;
    u0 = -u0;
    v0 = -v0;
  }
  u = u0;
  v = v0;
  return a;
}

}  // namespace

PlaneInvariants plane_invariants(const ProjectivePoint& x) {
  if (x.dimension() != 2) throw InputError("expected a point of P^2");
  const std::int64_t a = x[0], b = x[1], c = x[2];
  const i128 s = i128(a) * a + i128(b) * b + i128(c) * c;
  if (s == 1) return {};
  // Basis of x^perp: (b/g, -a/g, 0) and (c u, c v, -g) with u a + v b = g;
  // a = b = 0 only at (0:0:1), handled above.
  std::int64_t u = 0, v = 0;
  std::int64_t g = xgcd(a, b, u, v);
  i128 p0 = b / g, p1 = -a / g;
  i128 q0 = i128(c) * u, q1 = i128(c) * v, q2 = -g;
  i128 n1 = p0 * p0 + p1 * p1, n2 = q0 * q0 + q1 * q1 + q2 * q2, m = p0 * q0 + p1 * q1;
  i128 shortest = shortest_norm2(n1, m, n2);
  if (shortest > (i128(1) << 62) || s > (i128(1) << 62)) throw InputError("point too large for the plane reduction");
  return {static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(shortest)};
}

FreedomValue plane_freedom(const PlaneInvariants& inv) {
  if (inv.s <= 1) return FreedomValue();
  Rational sq(Integer(std::to_string(inv.s))), nq(Integer(std::to_string(inv.shortest)));
  // n mu_min = ln s + min(ln N, (1/2) ln s).
  LogValue num = static_cast<unsigned __int128>(inv.shortest) * inv.shortest < inv.s ? LogValue(1, sq * nq)
                                                                                     : LogValue(Rational(3, 2), sq);
  return FreedomValue(num, LogValue(Rational(3, 2), sq));
}

FreedomValue freedom_plane(const ProjectivePoint& x) {
  if (x.dimension() != 2) throw InputError("freedom_plane expects a point of P^2");
  return plane_freedom(plane_invariants(x));
}

std::uint64_t norm_bound(int n, const Rational& bound) {
  if (bound < 1) throw InputError("height bound must be >= 1");
  Rational b2 = bound * bound;
  auto fits = [&](std::uint64_t s) {
    Integer p;
    mpz_ui_pow_ui(p.get_mpz_t(), s, static_cast<unsigned long>(n + 1));
    return Rational(p) <= b2;
  };
  double guess = std::pow(b2.get_d(), 1.0 / (n + 1));
  auto s = static_cast<std::uint64_t>(std::max(1.0, std::floor(guess)));
  while (!fits(s)) --s;
  while (fits(s + 1)) ++s;
  return s;
}

std::vector<PointChunk> enumeration_chunks(int n, const Rational& bound, std::size_t target) {
  const std::uint64_t top = norm_bound(n, bound);
  // The count below s grows like s^{(n+1)/2}.
  const double e = (n + 1) / 2.0;
  const double total = std::pow(static_cast<double>(top), e);
  const auto pieces = static_cast<std::uint64_t>(std::max(1.0, std::ceil(total / static_cast<double>(target))));
  std::vector<PointChunk> out;
  std::uint64_t lo = 1;
  for (std::uint64_t k = 1; k <= pieces && lo <= top; ++k) {
    std::uint64_t hi = k == pieces
                           ? top + 1
                           : static_cast<std::uint64_t>(std::ceil(
                                 static_cast<double>(top) * std::pow(static_cast<double>(k) / static_cast<double>(pieces), 1.0 / e)));
    hi = std::min(std::max(hi, lo + 1), top + 1);
    out.push_back({lo, hi});
    lo = hi;
  }
  return out;
}

namespace {

std::uint64_t isqrt(std::uint64_t v) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

struct Enumerator {
  int n;
  PointChunk chunk;
  std::vector<std::int64_t> coords;
  std::vector<std::pair<std::uint64_t, std::vector<std::int64_t>>> found;

  void last(std::uint64_t partial, bool all_zero, std::int64_t g) {
    // lo <= partial + t^2 < hi
    std::uint64_t top = isqrt(chunk.hi - 1 - partial);
    std::uint64_t bottom = partial >= chunk.lo ? 0 : isqrt(chunk.lo - partial - 1) + 1;
    for (std::uint64_t t = bottom; t <= top; ++t) {
      auto ti = static_cast<std::int64_t>(t);
      for (std::int64_t sgn : {-1, 1}) {
        if (sgn < 0 && (t == 0 || all_zero)) continue;
        std::int64_t v = sgn * ti;
        if (std::gcd(g, v) != 1) continue;
        coords[static_cast<std::size_t>(n)] = v;
        found.emplace_back(partial + t * t, coords);
      }
    }
  }

  void descend(int i, std::uint64_t partial, bool all_zero, std::int64_t g) {
    if (i == n) {
      last(partial, all_zero, g);
      return;
    }
    auto r = static_cast<std::int64_t>(isqrt(chunk.hi - 1 - partial));
    for (std::int64_t v = all_zero ? 0 : -r; v <= r; ++v) {
      coords[static_cast<std::size_t>(i)] = v;
      descend(i + 1, partial + static_cast<std::uint64_t>(v * v), all_zero && v == 0, std::gcd(g, v));
    }
  }
};

}  // namespace

std::vector<ProjectivePoint> enumerate_chunk(int n, const PointChunk& chunk) {
  if (n < 1) throw InputError("dimension must be >= 1");
  std::vector<ProjectivePoint> out;
  if (chunk.hi <= chunk.lo) return out;
  Enumerator e{n, chunk, std::vector<std::int64_t>(static_cast<std::size_t>(n + 1)), {}};
  e.descend(0, 0, true, 0);
  std::sort(e.found.begin(), e.found.end());
  out.reserve(e.found.size());
  for (auto& f : e.found) out.emplace_back(std::move(f.second));
  return out;
}

void enumerate_points(int n, const Rational& bound,
                      const std::function<void(const ProjectivePoint&)>& visit) {
  for (const auto& chunk : enumeration_chunks(n, bound))
    for (const auto& p : enumerate_chunk(n, chunk)) visit(p);
}

}  // namespace freedom
