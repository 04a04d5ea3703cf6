#include "freedom/counting.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include <Eigen/Dense>

namespace freedom {

namespace {

// Doubles closer than this to a threshold are settled exactly.
constexpr double kNear = 1e-9;

struct Tally {
  std::uint64_t total = 0;
  std::uint64_t free = 0;
  std::uint64_t low = 0;
  double sum = 0;
  std::array<std::uint64_t, kHistogramBins> histogram{};

  void merge(const Tally& o) {
    total += o.total;
    free += o.free;
    low += o.low;
    sum += o.sum;
    for (int k = 0; k < kHistogramBins; ++k) histogram[k] += o.histogram[k];
  }
};

struct Thresholds {
  Rational eps;
  double eps_d;
  std::optional<Rational> low;
  double low_d = 0;
};

// A freedom value known as a double, made exact on demand.
template <class Exact>
class Lazy {
 public:
  Lazy(double v, Exact exact) : v_(v), exact_(std::move(exact)) {}
  double value() const { return v_; }
  int compare(const Rational& t, double td) {
    if (v_ - td > kNear) return 1;
    if (td - v_ > kNear) return -1;
    if (!l_) l_ = exact_();
    return l_->compare(t);
  }
  int bin() {
    double scaled = v_ * kHistogramBins;
    double r = std::round(scaled);
    int k;
    if (std::abs(scaled - r) < kHistogramBins * kNear) {
      k = static_cast<int>(r);
      Rational edge(k, kHistogramBins);
      edge.canonicalize();
      if (k > 0 && compare(edge, r / kHistogramBins) < 0) --k;
    } else {
      k = static_cast<int>(std::floor(scaled));
    }
    return std::clamp(k, 0, kHistogramBins - 1);
  }

 private:
  double v_;
  Exact exact_;
  std::optional<FreedomValue> l_;
};

template <class Exact>
void record(Tally& t, Lazy<Exact>& l, const Thresholds& th, std::uint64_t weight = 1) {
  t.total += weight;
  t.sum += l.value() * static_cast<double>(weight);
  if (l.compare(th.eps, th.eps_d) >= 0) t.free += weight;
  if (th.low && l.compare(*th.low, th.low_d) < 0) t.low += weight;
  t.histogram[static_cast<std::size_t>(l.bin())] += weight;
}

// Runs job(i) for i < jobs on up to `workers` threads; the first exception
// wins.
template <class Job>
void run_jobs(std::size_t jobs, unsigned workers, Job&& job) {
  const std::size_t threads = std::min<std::size_t>(std::max(1u, workers), jobs);
  if (threads <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = jobs;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

Tally reduce(const std::vector<Tally>& parts) {
  Tally out;
  for (const auto& p : parts) out.merge(p);
  return out;
}

Rational to_rational(std::uint64_t v) { return Rational(Integer(std::to_string(v))); }

// ---- P^n ----

Tally count_projective(int n, const Rational& bound, const Thresholds& th, unsigned workers) {
  const auto chunks = enumeration_chunks(n, bound);
  std::vector<Tally> parts(chunks.size());
  run_jobs(chunks.size(), workers, [&](std::size_t i) {
    Tally& t = parts[i];
    for (const auto& x : enumerate_chunk(n, chunks[i])) {
      if (n == 1) {
        bool zero = x.norm2() == 1;
        Lazy l(zero ? 0.0 : 1.0, [&] { return zero ? FreedomValue() : FreedomValue(height(x), height(x)); });
        record(t, l, th);
      } else if (n == 2) {
        PlaneInvariants inv = plane_invariants(x);
        double v = 0;
        if (inv.s > 1) {
          double ls = std::log(static_cast<double>(inv.s));
          v = (ls + std::min(std::log(static_cast<double>(inv.shortest)), ls / 2)) / (1.5 * ls);
        }
        Lazy l(v, [&] { return plane_freedom(inv); });
        record(t, l, th);
      } else {
        FreedomValue exact = freedom(x);
        Lazy l(exact.value(), [&] { return exact; });
        record(t, l, th);
      }
    }
  });
  return reduce(parts);
}

// ---- products, by nested enumeration ----

struct FactorPoint {
  ProjectivePoint x;
  std::uint64_t s;
  LogValue h;
  LogValue mu_min;
};

// Largest s >= 0 with s^e <= budget.
std::uint64_t max_norm(long e, const Rational& budget) {
  if (budget < 1) return 0;
  auto fits = [&](std::uint64_t s) {
    Integer p;
    mpz_ui_pow_ui(p.get_mpz_t(), s, static_cast<unsigned long>(e));
    return Rational(p) <= budget;
  };
  auto s = static_cast<std::uint64_t>(std::max(1.0, std::floor(std::pow(budget.get_d(), 1.0 / static_cast<double>(e)))));
  while (s > 1 && !fits(s)) --s;
  while (fits(s + 1)) ++s;
  return s;
}

std::vector<FactorPoint> factor_points(int n, std::uint64_t top) {
  std::vector<FactorPoint> out;
  for (auto& x : enumerate_chunk(n, {1, top + 1})) {
    FactorPoint f{x, x.norm2().get_ui(), height(x), {}};
    if (f.s > 1) {
      if (n == 1) f.mu_min = f.h;
      else if (n == 2) f.mu_min = freedom_plane(x).numerator() / Rational(2);
      else f.mu_min = freedom_report(x).mu_min;
    }
    out.push_back(std::move(f));
  }
  return out;
}

Tally count_product(const VarietyDescriptor& v, const Rational& bound, const Thresholds& th, unsigned workers) {
  const std::size_t k = v.dims.size();
  std::vector<long> exps(k);
  long total_dim = 0;
  for (std::size_t i = 0; i < k; ++i) {
    Rational w = v.weight(i);
    if (w.get_den() != 1 || w < 1) throw InputError("counting needs positive integral height weights");
    exps[i] = w.get_num().get_si() * (v.dims[i] + 1);
    total_dim += v.dims[i];
  }
  const Rational b2 = bound * bound;
  std::vector<std::vector<FactorPoint>> lists(k);
  for (std::size_t i = 0; i < k; ++i) lists[i] = factor_points(v.dims[i], max_norm(exps[i], b2));

  constexpr std::size_t kPiece = 64;
  const std::size_t pieces = (lists[0].size() + kPiece - 1) / kPiece;
  std::vector<Tally> parts(pieces);
  run_jobs(pieces, workers, [&](std::size_t piece) {
    Tally& t = parts[piece];
    std::vector<const FactorPoint*> chosen(k);
    auto visit = [&](auto&& self, std::size_t i, const Rational& budget) -> void {
      if (i == k) {
        LogValue hsum;
        const LogValue* smallest = nullptr;
        bool zero = false;
        for (const auto* f : chosen) {
          if (f->s == 1) zero = true;
          hsum += f->h;
          if (!smallest || f->mu_min < *smallest) smallest = &f->mu_min;
        }
        FreedomValue exact = zero ? FreedomValue() : FreedomValue(*smallest * Rational(total_dim), hsum);
        Lazy l(exact.value(), [&] { return exact; });
        record(t, l, th);
        return;
      }
      const std::uint64_t top = max_norm(exps[i], budget);
      const auto& list = lists[i];
      std::size_t begin = i == 0 ? piece * kPiece : 0;
      std::size_t end = i == 0 ? std::min(list.size(), begin + kPiece) : list.size();
      for (std::size_t j = begin; j < end && list[j].s <= top; ++j) {
        chosen[i] = &list[j];
        Integer p;
        mpz_ui_pow_ui(p.get_mpz_t(), list[j].s, static_cast<unsigned long>(exps[i]));
        self(self, i + 1, budget / Rational(p));
      }
    };
    visit(visit, 0, b2);
  });
  return reduce(parts);
}

// ---- P^1 x P^1, aggregated by norms ----
//
// Every P^1 point with |x|^2 = s has h = ln s and mu_min = ln s, so a pair
// only depends on (s1, s2): H = s1 s2 and l = 2 min(ln s1, ln s2) / ln(s1 s2).

bool pair_at_least(std::uint64_t s1, std::uint64_t s2, const Rational& t, double td) {
  if (s1 == 1 || s2 == 1) return t <= 0;
  double l1 = std::log(static_cast<double>(s1)), l2 = std::log(static_cast<double>(s2));
  double v = 2 * std::min(l1, l2) / (l1 + l2);
  if (v - td > kNear) return true;
  if (td - v > kNear) return false;
  FreedomValue l(LogValue(2, to_rational(std::min(s1, s2))), LogValue(1, to_rational(s1) * to_rational(s2)));
  return l.at_least(t);
}

Tally count_p1_square(const Rational& bound, const Thresholds& th, unsigned workers) {
  const Integer floor_b = bound.get_num() / bound.get_den();
  if (floor_b > Integer(1) << 31) throw InputError("bound too large for the P1xP1 count");
  const std::uint64_t S = floor_b.get_ui();

  // cnt[s] = number of P^1 points with |x|^2 = s; pre[t] = sum_{s <= t} cnt[s].
  std::vector<std::uint32_t> cnt(S + 1, 0);
  if (S >= 1) cnt[1] = 1;  // (0:1)
  for (std::uint64_t a = 1; a * a <= S; ++a) {
    for (std::uint64_t b = 0; a * a + b * b <= S; ++b) {
      if (std::gcd(a, b) != 1) continue;
      cnt[a * a + b * b] += b == 0 ? 1 : 2;
    }
  }
  std::vector<std::uint32_t> pre(S + 1, 0);
  for (std::uint64_t s = 1; s <= S; ++s) pre[s] = pre[s - 1] + cnt[s];

  // Work on s1 is about S / s1, so pieces are geometric in s1.
  constexpr std::size_t kPieces = 64;
  std::vector<std::uint64_t> edges{1};
  for (std::size_t p = 1; p < kPieces; ++p) {
    auto e = static_cast<std::uint64_t>(std::pow(static_cast<double>(S + 1), static_cast<double>(p) / kPieces));
    edges.push_back(std::clamp(e, edges.back(), S + 1));
  }
  edges.push_back(S + 1);

  std::vector<Tally> parts(kPieces);
  run_jobs(kPieces, workers, [&](std::size_t piece) {
    Tally& t = parts[piece];
    for (std::uint64_t s1 = edges[piece]; s1 < edges[piece + 1]; ++s1) {
      if (cnt[s1] == 0) continue;
      const std::uint64_t cap = S / s1;
      const std::uint64_t w1 = cnt[s1];
      t.total += w1 * pre[cap];
      // Free partners form an interval [lo, hi] of s2 around s1.
      if (s1 >= 2 && cap >= 2) {
        const double e = th.eps_d;
        auto free = [&](std::uint64_t s2) { return pair_at_least(s1, s2, th.eps, th.eps_d); };
        double ls1 = std::log(static_cast<double>(s1));
        auto lo = static_cast<std::uint64_t>(std::clamp(std::ceil(std::exp(ls1 * e / (2 - e))), 2.0, static_cast<double>(s1)));
        while (lo > 2 && free(lo - 1)) --lo;
        while (lo < s1 && !free(lo)) ++lo;
        double hi_d = std::floor(std::exp(std::min(ls1 * (2 - e) / e, 50.0)));
        std::uint64_t hi = hi_d >= static_cast<double>(cap) ? cap : std::max<std::uint64_t>(static_cast<std::uint64_t>(hi_d), 2);
        while (hi < cap && free(hi + 1)) ++hi;
        while (hi >= 2 && !free(hi)) --hi;
        if (lo <= hi && lo <= cap) t.free += w1 * (pre[std::min(hi, cap)] - pre[lo - 1]);
      }
      // Histogram, mean and low count need every s2 class.
      const double ls1 = std::log(static_cast<double>(s1));
      for (std::uint64_t s2 = 1; s2 <= cap; ++s2) {
        if (cnt[s2] == 0) continue;
        const std::uint64_t w = w1 * cnt[s2];
        double v = 0;
        if (s1 > 1 && s2 > 1) {
          double ls2 = std::log(static_cast<double>(s2));
          v = 2 * std::min(ls1, ls2) / (ls1 + ls2);
        }
        Lazy l(v, [&] {
          if (s1 == 1 || s2 == 1) return FreedomValue();
          return FreedomValue(LogValue(2, to_rational(std::min(s1, s2))), LogValue(1, to_rational(s1) * to_rational(s2)));
        });
        t.sum += v * static_cast<double>(w);
        if (th.low && l.compare(*th.low, th.low_d) < 0) t.low += w;
        t.histogram[static_cast<std::size_t>(l.bin())] += w;
      }
    }
  });
  return reduce(parts);
}

bool is_p1_square(const VarietyDescriptor& v) {
  return v.kind == VarietyDescriptor::Kind::product && v.dims == std::vector<int>{1, 1} && v.weight(0) == 1 &&
         v.weight(1) == 1;
}

}  // namespace

int histogram_bin(const FreedomValue& l) {
  Lazy lazy(l.value(), [&] { return l; });
  return lazy.bin();
}

CountRow count_free(const VarietyDescriptor& variety, const Rational& bound, const CountOptions& options) {
  if (bound < 1) throw InputError("height bound must be >= 1");
  if (options.workers < 1) throw InputError("worker count must be >= 1");
  EpsilonFunction eps(options.alpha);
  Thresholds th;
  th.eps = epsilon_rational(eps, std::max(bound, Rational(2)), options.rounding);
  // eps is only defined for t > 1; B = 1 has only height-1 points, none of
  // them free, and eps(2) = 1/2 stands in.
  th.eps_d = th.eps.get_d();
  if (options.low_threshold) {
    th.low = options.low_threshold;
    th.low_d = th.low->get_d();
  }

  Tally t;
  switch (variety.kind) {
    case VarietyDescriptor::Kind::projective:
      if (variety.weight(0) != 1) {
        t = count_product(variety, bound, th, options.workers);
      } else {
        t = count_projective(variety.dims.at(0), bound, th, options.workers);
      }
      break;
    case VarietyDescriptor::Kind::product:
      t = options.aggregate && is_p1_square(variety) ? count_p1_square(bound, th, options.workers)
                                : count_product(variety, bound, th, options.workers);
      break;
    case VarietyDescriptor::Kind::hypersurface:
      throw InputError("counting supports projective spaces and their products; use fiber-scan for hypersurfaces");
  }

  CountRow row;
  row.bound = bound;
  row.eps = th.eps;
  row.total = t.total;
  row.free = t.free;
  row.low = t.low;
  row.mean_freedom = t.total ? t.sum / static_cast<double>(t.total) : 0.0;
  row.histogram = t.histogram;
  if (row.free > row.total) throw InvariantError("free count exceeds total count");
  if (std::accumulate(row.histogram.begin(), row.histogram.end(), std::uint64_t{0}) != row.total)
    throw InvariantError("histogram does not sum to the total count");
  return row;
}

double mean_freedom(const VarietyDescriptor& variety, const Rational& bound, const CountOptions& options) {
  CountRow row = count_free(variety, bound, options);
  if (row.total == 0) throw InputError("no points of bounded height");
  return row.mean_freedom;
}

double EmpiricalConstant::relative_gap() const {
  if (!target) return 0;
  return std::abs(value - *target) / std::abs(*target);
}

namespace {

AsymptoticFit least_squares(const std::vector<double>& bounds, const std::vector<double>& counts, bool with_loglog) {
  if (bounds.size() != counts.size()) throw InputError("bounds and counts differ in length");
  const std::size_t need = with_loglog ? 4 : 2;
  if (bounds.size() < need) throw InputError("degenerate grid: too few points");
  const Eigen::Index m = static_cast<Eigen::Index>(bounds.size());
  const Eigen::Index cols = with_loglog ? 3 : 2;
  Eigen::MatrixXd A(m, cols);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double B = bounds[static_cast<std::size_t>(i)], N = counts[static_cast<std::size_t>(i)];
    if (!(B > 1) || !(N > 0)) throw InputError("degenerate grid: needs B > 1 and positive counts");
    A(i, 0) = 1;
    A(i, 1) = std::log(B);
    if (with_loglog) A(i, 2) = std::log(std::log(B));
    y(i) = std::log(N);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-10);
  if (qr.rank() < cols) throw InputError("degenerate grid");
  Eigen::VectorXd c = qr.solve(y);
  AsymptoticFit fit;
  fit.C = std::exp(c(0));
  fit.a = c(1);
  fit.b = with_loglog ? c(2) + 1 : 1;
  fit.residual = (A * c - y).norm();
  return fit;
}

}  // namespace

AsymptoticFit fit_asymptotic(const std::vector<double>& bounds, const std::vector<double>& counts) {
  return least_squares(bounds, counts, true);
}

AsymptoticFit fit_power(const std::vector<double>& bounds, const std::vector<double>& counts) {
  return least_squares(bounds, counts, false);
}

CountReport count_report(const VarietyDescriptor& variety, const std::vector<Rational>& bounds,
                         const CountOptions& options) {
  if (bounds.empty()) throw InputError("empty bound grid");
  for (std::size_t i = 1; i < bounds.size(); ++i)
    if (!(bounds[i - 1] < bounds[i])) throw InputError("bound grid must be strictly increasing");
  CountReport report{variety, options, {}, std::nullopt, std::nullopt};
  std::vector<double> xs, ys;
  for (const auto& b : bounds) {
    report.rows.push_back(count_free(variety, b, options));
    if (report.rows.back().free > 0 && b > 1) {
      xs.push_back(b.get_d());
      ys.push_back(static_cast<double>(report.rows.back().free));
    }
  }
  try {
    if (xs.size() >= 4) report.fit = fit_asymptotic(xs, ys);
  } catch (const InputError&) {
  }
  try {
    if (xs.size() >= 2) report.power_fit = fit_power(xs, ys);
  } catch (const InputError&) {
  }
  return report;
}

}  // namespace freedom
