#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "freedom/counting.hpp"

using namespace freedom;

namespace {

struct Oracle {
  std::uint64_t total = 0, free = 0, low = 0;
  double sum = 0;
  std::array<std::uint64_t, kHistogramBins> histogram{};
};

// Exact freedoms of a point list, classified directly.
void tally(Oracle& o, const FreedomValue& l, const Rational& eps, const std::optional<Rational>& low) {
  ++o.total;
  o.sum += l.value();
  if (l.at_least(eps)) ++o.free;
  if (low && l.compare(*low) < 0) ++o.low;
  int k = kHistogramBins - 1;
  auto edge = [](int k) {
    Rational e(k, kHistogramBins);
    e.canonicalize();
    return e;
  };
  while (k > 0 && l.compare(edge(k)) < 0) --k;
  ++o.histogram[static_cast<std::size_t>(k)];
}

std::vector<std::vector<std::int64_t>> box(int n, std::int64_t r) {
  std::vector<std::vector<std::int64_t>> out{{}};
  for (int i = 0; i <= n; ++i) {
    std::vector<std::vector<std::int64_t>> next;
    for (auto& v : out)
      for (std::int64_t c = -r; c <= r; ++c) {
        next.push_back(v);
        next.back().push_back(c);
      }
    out = std::move(next);
  }
  return out;
}

// Canonical primitive representatives with s^{n+1} <= B^2, by box scan.
std::vector<ProjectivePoint> scan_points(int n, const Rational& bound) {
  std::uint64_t top = norm_bound(n, bound);
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(top))) + 1;
  std::vector<ProjectivePoint> out;
  for (auto& v : box(n, r)) {
    std::int64_t g = 0, s = 0;
    for (auto c : v) {
      g = std::gcd(g, c);
      s += c * c;
    }
    if (g != 1 || static_cast<std::uint64_t>(s) > top) continue;
    auto first = std::find_if(v.begin(), v.end(), [](std::int64_t c) { return c != 0; });
    if (*first < 0) continue;
    out.emplace_back(v);
  }
  return out;
}

void check_row(const CountRow& row, const Oracle& o) {
  CHECK(row.total == o.total);
  CHECK(row.free == o.free);
  CHECK(row.low == o.low);
  CHECK(row.histogram == o.histogram);
  if (o.total) CHECK(row.mean_freedom == doctest::Approx(o.sum / static_cast<double>(o.total)).epsilon(1e-12));
}

}  // namespace

TEST_CASE("P1 at B = 5") {
  CountRow row = count_free(VarietyDescriptor::projective(1), 5);
  CHECK(row.total == 8);
  CHECK(row.free == 6);
  CHECK(row.mean_freedom == 0.75);
  CHECK(row.histogram[0] == 2);
  CHECK(row.histogram[19] == 6);
  CHECK(row.eps == Rational(1, 2));
  CHECK(mean_freedom(VarietyDescriptor::projective(1), 5) == 0.75);
}

TEST_CASE("P1xP1 at B = 1") {
  CountRow row = count_free(VarietyDescriptor::preset("P1xP1"), 1);
  CHECK(row.total == 4);
  CHECK(row.free == 0);
  CHECK(row.histogram[0] == 4);
}

TEST_CASE("P2 against a box scan") {
  for (int b : {1, 8, 27, 64, 200}) {
    CAPTURE(b);
    CountOptions opts;
    opts.low_threshold = Rational(7, 10);
    CountRow row = count_free(VarietyDescriptor::projective(2), b, opts);
    Oracle o;
    for (auto& x : scan_points(2, b)) tally(o, freedom::freedom(x), row.eps, opts.low_threshold);
    check_row(row, o);
    CHECK(row.free <= row.total);
  }
  CountRow r27 = count_free(VarietyDescriptor::projective(2), 27);
  // s <= 9 by s: 3, 6, 4, 0, 12, 12, 0, 0, 12.
  CHECK(r27.total == 49);
}

TEST_CASE("P3 against a box scan") {
  CountOptions opts;
  opts.alpha = 2;
  CountRow row = count_free(VarietyDescriptor::projective(3), 60, opts);
  Oracle o;
  for (auto& x : scan_points(3, 60)) tally(o, freedom::freedom(x), row.eps, std::nullopt);
  check_row(row, o);
}

TEST_CASE("P1xP1 aggregate equals enumeration") {
  for (const char* alpha : {"1/2", "2", "5"}) {
    for (int b : {1, 2, 10, 50, 300, 700}) {
      CAPTURE(alpha);
      CAPTURE(b);
      CountOptions fast;
      fast.alpha = Rational(alpha);
      fast.low_threshold = Rational(7, 10);
      CountOptions slow = fast;
      slow.aggregate = false;
      auto v = VarietyDescriptor::preset("P1xP1");
      CountRow a = count_free(v, b, fast), e = count_free(v, b, slow);
      CHECK(a.total == e.total);
      CHECK(a.free == e.free);
      CHECK(a.low == e.low);
      CHECK(a.histogram == e.histogram);
      CHECK(a.mean_freedom == doctest::Approx(e.mean_freedom).epsilon(1e-12));
    }
  }
}

TEST_CASE("products against a pair scan") {
  struct Case {
    const char* preset;
    int bound;
  };
  for (Case c : {Case{"P1xP1", 120}, Case{"P1xP2", 40}}) {
    CAPTURE(c.preset);
    auto v = VarietyDescriptor::preset(c.preset);
    CountOptions opts;
    opts.aggregate = false;
    CountRow row = count_free(v, c.bound, opts);
    Oracle o;
    auto xs = scan_points(v.dims[0], c.bound), ys = scan_points(v.dims[1], c.bound);
    for (auto& x : xs)
      for (auto& y : ys) {
        VarietyPoint p{{x, y}};
        if (product_height(v, p) > LogValue::log(c.bound)) continue;
        tally(o, product_freedom(p), row.eps, std::nullopt);
      }
    check_row(row, o);
  }
}

TEST_CASE("histogram edges are exact") {
  // (1:2) x (2:11): s = 5 and 125, l = 2 ln 5 / ln 625 = 1/2 exactly.
  FreedomValue half(LogValue(2, 5), LogValue(1, 625));
  CHECK(histogram_bin(half) == 10);
  CHECK(histogram_bin(FreedomValue()) == 0);
  CHECK(histogram_bin(FreedomValue(LogValue::log(5), LogValue::log(5))) == 19);
  FreedomValue tenth(LogValue(1, 2), LogValue(10, 2));
  CHECK(histogram_bin(tenth) == 2);
  // The pair sits on the eps = 1/2 boundary and counts as free.
  CountRow row = count_free(VarietyDescriptor::preset("P1xP1"), 625);
  CountOptions slow;
  slow.aggregate = false;
  CHECK(row.free == count_free(VarietyDescriptor::preset("P1xP1"), 625, slow).free);
  CHECK(row.free > count_free(VarietyDescriptor::preset("P1xP1"), 624).free);
}

TEST_CASE("counts are monotone in B") {
  for (const char* name : {"P1", "P2", "P1xP1"}) {
    CAPTURE(name);
    auto v = VarietyDescriptor::preset(name);
    CountOptions opts;
    opts.alpha = 3;
    std::uint64_t total = 0, free = 0;
    for (int b = 1; b <= 3000; b = b * 3 / 2 + 1) {
      CountRow row = count_free(v, b, opts);
      CHECK(row.total >= total);
      CHECK(row.free >= free);
      total = row.total;
      free = row.free;
    }
  }
}

TEST_CASE("counts do not depend on the worker count") {
  for (const char* name : {"P2", "P1xP1", "P1xP2", "P3"}) {
    CAPTURE(name);
    auto v = VarietyDescriptor::preset(name);
    Rational bound = v.dims.size() > 1 ? 400 : 300;
    CountOptions one;
    one.low_threshold = Rational(4, 5);
    CountRow base = count_free(v, bound, one);
    for (unsigned w : {2u, 4u, 8u}) {
      CountOptions many = one;
      many.workers = w;
      CountRow row = count_free(v, bound, many);
      CHECK(row.total == base.total);
      CHECK(row.free == base.free);
      CHECK(row.low == base.low);
      CHECK(row.histogram == base.histogram);
      CHECK(row.mean_freedom == base.mean_freedom);
    }
  }
}

TEST_CASE("P1 count is close to 3B/pi") {
  CountRow row = count_free(VarietyDescriptor::projective(1), 20000);
  CHECK(static_cast<double>(row.total) / 20000 == doctest::Approx(3 / std::numbers::pi).epsilon(0.01));
}

TEST_CASE("input errors") {
  CHECK_THROWS_AS(count_free(VarietyDescriptor::projective(2), Rational(1, 2)), InputError);
  CHECK_THROWS_AS(mean_freedom(VarietyDescriptor::projective(2), 0), InputError);
  CHECK_THROWS_AS(count_free(VarietyDescriptor::preset("quadric"), 10), InputError);
  CountOptions none;
  none.workers = 0;
  CHECK_THROWS_AS(count_free(VarietyDescriptor::projective(1), 10, none), InputError);
  CHECK_THROWS_AS(count_report(VarietyDescriptor::projective(1), {10, 10}), InputError);
}

TEST_CASE("fit recovers a synthetic model") {
  std::vector<double> bs, ns;
  for (double b : {1e3, 1e4, 1e5, 1e6, 1e7}) {
    bs.push_back(b);
    ns.push_back(7 * b * std::pow(std::log(b), 2));
  }
  AsymptoticFit f = fit_asymptotic(bs, ns);
  CHECK(f.C == doctest::Approx(7).epsilon(1e-6));
  CHECK(f.a == doctest::Approx(1).epsilon(1e-6));
  CHECK(f.b == doctest::Approx(3).epsilon(1e-6));
  CHECK(f.residual < 1e-8);

  AsymptoticFit p = fit_power({10, 100}, {30, 300});
  CHECK(p.a == doctest::Approx(1));
  CHECK(p.C == doctest::Approx(3));
  CHECK(p.b == 1);
}

TEST_CASE("degenerate grids") {
  CHECK_THROWS_AS(fit_asymptotic({1e3, 1e4, 1e5}, {1, 2, 3}), InputError);
  CHECK_THROWS_AS(fit_asymptotic({1e3, 1e3, 1e3, 1e3}, {1, 2, 3, 4}), InputError);
  CHECK_THROWS_AS(fit_asymptotic({1e3, 1e4, 1e5, 1e6}, {1, 2, 0, 4}), InputError);
  CHECK_THROWS_AS(fit_asymptotic({1e3, 1e4, 1e5, 1e6}, {1, 2, 3}), InputError);
  CHECK_THROWS_AS(fit_power({10}, {3}), InputError);
}

TEST_CASE("count report") {
  CountReport r = count_report(VarietyDescriptor::projective(1), {100, 1000, 10000, 100000});
  REQUIRE(r.rows.size() == 4);
  REQUIRE(r.fit);
  REQUIRE(r.power_fit);
  CHECK(r.power_fit->a == doctest::Approx(1).epsilon(0.01));
  EmpiricalConstant c{r.power_fit->C, 3 / std::numbers::pi};
  CHECK(c.relative_gap() < 0.05);
  CHECK(EmpiricalConstant{2.0, std::nullopt}.relative_gap() == 0);
  for (auto& row : r.rows)
    CHECK(std::accumulate(row.histogram.begin(), row.histogram.end(), std::uint64_t{0}) == row.total);
}

TEST_CASE("mean freedom on P2 grows past 0.9") {
  std::vector<double> means;
  for (Rational b : {100, 1000, 10000, 100000}) means.push_back(mean_freedom(VarietyDescriptor::projective(2), b));
  MESSAGE("mean l at 1e2..1e5: " << means[0] << " " << means[1] << " " << means[2] << " " << means[3]);
  CHECK(std::is_sorted(means.begin(), means.end()));
  CHECK(means.back() > 0.9);
}

TEST_CASE("low freedom is scarce on P2") {
  // l < 1 - eta is a union of histogram bins since 1 - eta is a bin edge.
  std::vector<double> bounds{1e3, 1e4, 1e5, 1e6};
  std::vector<CountRow> rows;
  CountOptions o;
  o.low_threshold = Rational(7, 10);
  for (double b : bounds) rows.push_back(count_free(VarietyDescriptor::projective(2), Rational(b), o));
  for (int eta : {1, 2, 3}) {
    std::vector<double> low;
    for (const auto& r : rows)
      low.push_back(static_cast<double>(std::accumulate(r.histogram.begin(), r.histogram.end() - 2 * eta, std::uint64_t{0})));
    if (eta == 3)
      for (std::size_t i = 0; i < rows.size(); ++i) CHECK(low[i] == static_cast<double>(rows[i].low));
    auto f = fit_power(bounds, low);
    MESSAGE("eta = 0." << eta << ": exponent " << f.a);
    CHECK(f.a <= 1 - eta / 10.0 + 0.05);
  }
}

TEST_CASE("sensitivity to alpha and to the rounding of eps") {
  // On P2 every point with h > 0 has l >= 2/3 > eps, so use P1xP1.
  auto v = VarietyDescriptor::preset("P1xP1");
  std::uint64_t first = 0, previous = 0;
  for (Rational alpha : {Rational(1, 4), Rational(1, 2), Rational(1), Rational(2)}) {
    CountOptions o;
    o.alpha = alpha;
    auto in = count_free(v, 100000, o);
    o.rounding = EpsRounding::out;
    auto out = count_free(v, 100000, o);
    MESSAGE("alpha = " << alpha.get_str() << ": eps = " << in.eps.get_d() << ", free " << in.free << " of " << in.total);
    // Larger alpha shrinks eps(B) once ln ln B > 1.
    CHECK(in.free >= previous);
    CHECK(out.free <= in.free);
    CHECK(in.free - out.free <= 1);
    CHECK(in.total == out.total);
    if (!first) first = in.free;
    previous = in.free;
  }
  CHECK(previous > first);
}
