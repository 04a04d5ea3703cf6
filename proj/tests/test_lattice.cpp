#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <optional>
#include <random>
#include <set>

#include "freedom/lattice.hpp"

using namespace freedom;

namespace {

RationalMatrix gram(std::initializer_list<std::initializer_list<const char*>> data) {
  RationalMatrix m(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(data.size()));
  Eigen::Index i = 0;
  for (const auto& r : data) {
    Eigen::Index j = 0;
    for (const char* v : r) m(i, j++) = parse_rational(v);
    ++i;
  }
  return m;
}

IntVector vec(std::initializer_list<long> data) {
  IntVector v(static_cast<Eigen::Index>(data.size()));
  Eigen::Index i = 0;
  for (long x : data) v(i++) = x;
  return v;
}

// Gram B B^T / den with small integer B: positive definite by construction.
EuclideanLattice random_lattice(std::mt19937& rng, Eigen::Index n) {
  std::uniform_int_distribution<long> entry(-3, 3), den(1, 4);
  for (;;) {
    IntMatrix b(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) b(i, j) = entry(rng);
    if (rank(b) < n) continue;
    RationalMatrix g = to_rational(IntMatrix(b * b.transpose()));
    Rational d(den(rng));
    for (Eigen::Index i = 0; i < n; ++i) g(i, i) += Rational(1, 2);
    return EuclideanLattice(RationalMatrix(g / d));
  }
}

// Brute force over the box [-r, r]^n.
std::vector<IntVector> box_scan(const EuclideanLattice& l, const Rational& bound, long r) {
  const Eigen::Index n = l.rank();
  std::vector<IntVector> out;
  IntVector v = IntVector::Constant(n, -r);
  for (;;) {
    bool first_positive = false;
    for (Eigen::Index i = 0; i < n; ++i)
      if (v(i) != 0) {
        first_positive = v(i) > 0;
        break;
      }
    if (first_positive && l.norm2(v) <= bound) out.push_back(v);
    Eigen::Index i = 0;
    while (i < n && v(i) == r) v(i++) = -r;
    if (i == n) break;
    v(i) += 1;
  }
  return out;
}

std::set<std::vector<long>> as_set(const std::vector<IntVector>& vs) {
  std::set<std::vector<long>> out;
  for (const auto& v : vs) {
    std::vector<long> c;
    for (Eigen::Index i = 0; i < v.size(); ++i) c.push_back(v(i).get_si());
    out.insert(c);
  }
  return out;
}

std::set<std::vector<long>> as_set(const std::vector<ShortVector>& vs) {
  std::vector<IntVector> c;
  for (const auto& v : vs) c.push_back(v.coords);
  return as_set(c);
}

// Squared norm of the primitive vector on the line through v.
Rational primitive_norm2(const EuclideanLattice& l, const IntVector& v) {
  Integer g = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) g = gcd(g, v(i));
  return l.norm2(v) / Rational(g * g);
}

const LogValue ln2 = LogValue::log(2), ln3 = LogValue::log(3);

}  // namespace

TEST_CASE("degree") {
  CHECK(degree(EuclideanLattice::standard(3)).is_zero());
  CHECK(degree(EuclideanLattice(gram({{"1", "0"}, {"0", "4"}}))) == -ln2);
  EuclideanLattice l(gram({{"2", "1"}, {"1", "3"}}));
  CHECK(degree(scale(l, Rational(5, 7))) == degree(l) - LogValue(1, Rational(5, 7)));
  CHECK(degree(EuclideanLattice()).is_zero());
}

TEST_CASE("dual") {
  CHECK(dual(EuclideanLattice::standard(2)) == EuclideanLattice::standard(2));
  CHECK(dual(EuclideanLattice(gram({{"1", "0"}, {"0", "4"}}))) ==
        EuclideanLattice(gram({{"1", "0"}, {"0", "1/4"}})));
  EuclideanLattice l(gram({{"2", "1/3"}, {"1/3", "5/2"}}));
  CHECK(dual(dual(l)) == l);
}

TEST_CASE("sublattice") {
  IntMatrix g(1, 2);
  g << 1, 1;
  CHECK(sublattice(EuclideanLattice::standard(2), g, true) == EuclideanLattice(gram({{"2"}})));
  IntMatrix h(1, 3);
  h << 2, 4, 4;
  CHECK(sublattice(EuclideanLattice::standard(3), h, true) == EuclideanLattice(gram({{"9"}})));
  CHECK(sublattice(EuclideanLattice::standard(3), h, false) == EuclideanLattice(gram({{"36"}})));
  EuclideanLattice l(gram({{"2", "1"}, {"1", "3"}}));
  CHECK(sublattice(l, IntMatrix::Identity(2, 2), true) == l);
  IntMatrix dep(2, 2);
  dep << 1, 2, 2, 4;
  CHECK_THROWS_AS(sublattice(l, dep, true), InputError);
}

TEST_CASE("quotient") {
  IntMatrix e1(1, 2);
  e1 << 1, 0;
  CHECK(quotient(EuclideanLattice::standard(2), e1) == EuclideanLattice(gram({{"1"}})));

  IntMatrix x(1, 3);
  x << 1, 2, 2;
  Quotient q = quotient_with_basis(EuclideanLattice::standard(3), x);
  CHECK(q.lattice == EuclideanLattice(gram({{"5/9", "-4/9"}, {"-4/9", "5/9"}})));
  CHECK(q.lattice.gram().determinant() == Rational(1, 9));
  CHECK(degree(sublattice(EuclideanLattice::standard(3), x, true)) + degree(q.lattice) ==
        LogValue());

  CHECK(quotient(EuclideanLattice::standard(2), IntMatrix::Identity(2, 2)).rank() == 0);

  IntMatrix twice(1, 3);
  twice << 2, 4, 4;
  CHECK_THROWS_WITH_AS(quotient(EuclideanLattice::standard(3), twice), "quotient has torsion",
                       InputError);
}

TEST_CASE("direct sum and scale") {
  CHECK(direct_sum(EuclideanLattice::standard(1), EuclideanLattice::standard(2)) ==
        EuclideanLattice::standard(3));
  EuclideanLattice a(gram({{"1", "0"}, {"0", "4"}})), b(gram({{"9"}}));
  EuclideanLattice s = direct_sum(a, b);
  CHECK(s == EuclideanLattice(gram({{"1", "0", "0"}, {"0", "4", "0"}, {"0", "0", "9"}})));
  CHECK(degree(s) == degree(a) + degree(b));
  CHECK(scale(a, 1) == a);
  CHECK(scale(a, Rational(1, 9)) == EuclideanLattice(gram({{"1/9", "0"}, {"0", "4/9"}})));
  CHECK_THROWS_AS(scale(a, 0), InputError);
}

TEST_CASE("short_vectors examples") {
  auto id1 = short_vectors(EuclideanLattice::standard(2), 1);
  CHECK(as_set(id1) == std::set<std::vector<long>>{{1, 0}, {0, 1}});
  auto id5 = short_vectors(EuclideanLattice::standard(2), 5);
  CHECK(id5.size() == 10);
  CHECK(as_set(id5) == std::set<std::vector<long>>{{1, 0}, {0, 1}, {1, 1}, {1, -1}, {2, 0},
                                                   {0, 2}, {1, 2}, {2, 1}, {1, -2}, {2, -1}});
  auto t = short_vectors(EuclideanLattice(gram({{"5/9", "-4/9"}, {"-4/9", "5/9"}})), Rational(2, 9));
  REQUIRE(t.size() == 1);
  CHECK(t[0].coords == vec({1, 1}));
  CHECK(t[0].norm2 == Rational(2, 9));
}

TEST_CASE("short_vectors agrees with a box scan on random lattices") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    Eigen::Index n = 1 + trial % 3;
    EuclideanLattice l = random_lattice(rng, n);
    // Coordinates of vectors in the bound satisfy v_i^2 <= bound * (G^-1)_ii.
    Rational bound(3 + trial % 5);
    RationalMatrix inv = inverse(l.form());
    long r = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      long ri = static_cast<long>(std::sqrt(Rational(bound * inv(i, i)).get_d())) + 1;
      r = std::max(r, ri);
    }
    auto found = short_vectors(l, bound);
    CHECK(as_set(found) == as_set(box_scan(l, bound, r)));
    CHECK(as_set(found).size() == found.size());
    for (std::size_t k = 1; k < found.size(); ++k) CHECK(found[k - 1].norm2 <= found[k].norm2);
  }
}

TEST_CASE("successive_minima") {
  auto id = successive_minima(EuclideanLattice::standard(3));
  for (const auto& m : id.minima) CHECK(m.is_zero());
  auto d = successive_minima(EuclideanLattice(gram({{"1", "0"}, {"0", "4"}})));
  CHECK(d.squared == std::vector<Rational>{1, 4});
  CHECK(d.minima[1] == ln2);
  auto t = successive_minima(EuclideanLattice(gram({{"5/9", "-4/9"}, {"-4/9", "5/9"}})));
  CHECK(t.squared == std::vector<Rational>{Rational(2, 9), Rational(5, 9)});
  CHECK(t.vectors[0] == vec({1, 1}));
  CHECK((t.vectors[1] == vec({1, 0}) || t.vectors[1] == vec({0, 1})));
}

TEST_CASE("newton_polygon examples") {
  auto id = newton_polygon(EuclideanLattice::standard(4));
  for (const auto& m : id.roof) CHECK(m.is_zero());
  for (const auto& s : id.slopes) CHECK(s.is_zero());

  auto d = newton_polygon(EuclideanLattice(gram({{"1", "0"}, {"0", "4"}})));
  CHECK(d.roof == std::vector<LogValue>{LogValue(), LogValue(), -ln2});
  CHECK(d.slopes == std::vector<LogValue>{LogValue(), -ln2});

  auto t = newton_polygon(EuclideanLattice(gram({{"5/81", "-4/81"}, {"-4/81", "5/81"}})));
  CHECK(t.slopes[0] == ln3 * Rational(2) - ln2 / Rational(2));
  CHECK(t.slopes[1] == ln3 + ln2 / Rational(2));
  CHECK(t.roof[2] == ln3 * Rational(3));
  CHECK(t.witnesses[1] == IntMatrix(vec({1, 1}).transpose()));

  CHECK_THROWS_WITH_AS(newton_polygon(EuclideanLattice::standard(7)), "rank cap exceeded",
                       InputError);
}

TEST_CASE("slopes_summary") {
  auto id = slopes_summary(EuclideanLattice::standard(3));
  CHECK(id.mu_max.is_zero());
  CHECK(id.mu_min.is_zero());
  CHECK(id.mu_mean.is_zero());
  auto d = slopes_summary(EuclideanLattice(gram({{"1", "0"}, {"0", "4"}})));
  CHECK(d.mu_max.is_zero());
  CHECK(d.mu_min == -ln2);
  CHECK(d.mu_mean == -ln2 / Rational(2));
}

// Brute-force roof: maximum degree over all saturated sublattices spanned by
// vectors of a box, independent of the certified search.
TEST_CASE("newton polygon matches a brute-force roof in rank 2 and 3") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::Index n = 2 + trial % 2;
    EuclideanLattice l = random_lattice(rng, n);
    auto poly = newton_polygon(l);
    std::vector<IntVector> box = box_scan(l, Rational(1000000), n == 2 ? 5 : 3);
    std::vector<Rational> best(static_cast<std::size_t>(n + 1));
    best[0] = 1;
    best[static_cast<std::size_t>(n)] = l.gram().determinant();
    for (const auto& v : box) {
      Rational c = primitive_norm2(l, v);
      if (best[1] == 0 || c < best[1]) best[1] = c;
    }
    if (n == 3) {
      for (std::size_t a = 0; a < box.size(); ++a)
        for (std::size_t b = a + 1; b < box.size(); ++b) {
          IntMatrix m(2, 3);
          m.row(0) = box[a].transpose();
          m.row(1) = box[b].transpose();
          if (rank(m) < 2) continue;
          Rational c = determinant(restrict_form(l.form(), hnf_saturate(m)));
          if (best[2] == 0 || c < best[2]) best[2] = c;
        }
    }
    for (std::size_t i = 0; i <= static_cast<std::size_t>(n); ++i)
      CHECK(poly.min_covolume2[i] == best[i]);
  }
}

TEST_CASE("newton polygon invariants on random lattices") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::Index n = 1 + trial % 4;
    EuclideanLattice l = random_lattice(rng, n);
    auto poly = newton_polygon(l);
    const auto nu = static_cast<std::size_t>(n);

    for (std::size_t i = 1; i < nu; ++i) CHECK(poly.slopes[i - 1] >= poly.slopes[i]);
    LogValue total;
    for (const auto& s : poly.slopes) total += s;
    CHECK(total == degree(l));
    for (std::size_t i = 0; i <= nu; ++i) CHECK(poly.roof[i] >= poly.max_degree[i]);

    auto dpoly = newton_polygon(dual(l));
    for (std::size_t i = 0; i < nu; ++i) CHECK(poly.slopes[i] == -dpoly.slopes[nu - 1 - i]);

    auto minima = successive_minima(l);
    CHECK((minima.minima[0] + poly.mu_max()).sign() >= 0);

    // Quotient by each witness is additive in degree.
    for (std::size_t i = 1; i < nu; ++i) {
      const IntMatrix& w = poly.witnesses[i];
      CHECK(degree(sublattice(l, w, false)) + degree(quotient(l, w)) == degree(l));
      CHECK(degree(sublattice(l, w, false)) == poly.max_degree[i]);
    }

    NewtonPolygonOptions doubled;
    doubled.bound_multiplier = 2;
    auto wide = newton_polygon(l, doubled);
    CHECK(wide.max_degree == poly.max_degree);
  }
}

TEST_CASE("direct sum roof is the Minkowski sum") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    Eigen::Index n1 = 1 + trial % 2, n2 = 1 + (trial / 2) % 3;
    EuclideanLattice a = random_lattice(rng, n1), b = random_lattice(rng, n2);
    auto pa = newton_polygon(a), pb = newton_polygon(b), ps = newton_polygon(direct_sum(a, b));
    for (Eigen::Index k = 0; k <= n1 + n2; ++k) {
      std::optional<LogValue> best;
      for (Eigen::Index i = std::max<Eigen::Index>(0, k - n2); i <= std::min(k, n1); ++i) {
        LogValue v = pa.roof[static_cast<std::size_t>(i)] + pb.roof[static_cast<std::size_t>(k - i)];
        if (!best || v > *best) best = v;
      }
      CHECK(ps.roof[static_cast<std::size_t>(k)] == *best);
    }
    CHECK(ps.mu_min() == std::min(pa.mu_min(), pb.mu_min()));
  }
}

TEST_CASE("scaling shifts every slope") {
  std::mt19937 rng(17);
  std::uniform_int_distribution<long> num(1, 9), den(1, 9);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::Index n = 1 + trial % 3;
    EuclideanLattice l = random_lattice(rng, n);
    Rational t(num(rng), den(rng));
    t.canonicalize();
    auto p = newton_polygon(l), q = newton_polygon(scale(l, t));
    for (std::size_t i = 0; i < p.slopes.size(); ++i)
      CHECK(q.slopes[i] == p.slopes[i] - LogValue(Rational(1, 2), t));
  }
}

TEST_CASE("log lambda_i + mu_i over the random corpus") {
  std::mt19937 rng(7);
  std::vector<double> worst(5, 0);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::Index n = 1 + trial % 4;
    EuclideanLattice l = random_lattice(rng, n);
    auto poly = newton_polygon(l);
    auto minima = successive_minima(l);
    // 0 <= log lambda_1 + mu_1 <= max_k (1/2k) log gamma_k^k (Minkowski on each F).
    LogValue first = minima.minima[0] + poly.mu_max();
    CHECK(first.sign() >= 0);
    LogValue cap;
    for (int k = 1; k <= n; ++k) cap = std::max(cap, LogValue(Rational(1, 2 * k), hermite_constant_power(k)));
    CHECK(first <= cap);
    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i)
      worst[i] = std::max(worst[i], to_double(minima.minima[i] + poly.slopes[i]));
  }
  MESSAGE("max log lambda_i + mu_i, i = 1..4: " << worst[0] << " " << worst[1] << " " << worst[2] << " " << worst[3]);
}
