#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "freedom/varieties.hpp"

namespace freedom {

struct CountOptions {
  Rational alpha{1, 2};
  EpsRounding rounding = EpsRounding::in;
  unsigned workers = 1;
  /// When set, also count points with l(x) < low_threshold.
  std::optional<Rational> low_threshold;
  /// Use the aggregated norm-class count for P1xP1 (off: plain enumeration).
  bool aggregate = true;
};

constexpr int kHistogramBins = 20;

struct CountRow {
  Rational bound;
  Rational eps;  ///< eps(B) after rounding
  std::uint64_t total = 0;
  std::uint64_t free = 0;
  std::uint64_t low = 0;  ///< points below CountOptions::low_threshold
  double mean_freedom = 0;
  /// bin k holds k/20 <= l < (k+1)/20; l = 1 goes to the last bin.
  std::array<std::uint64_t, kHistogramBins> histogram{};
};

/// #{x : H(x) <= B} and #{x : H(x) <= B, l(x) >= eps(B)} with the histogram
/// and mean of l. Supports P^n and products of projective spaces; the
/// result does not depend on the worker count.
CountRow count_free(const VarietyDescriptor& variety, const Rational& bound, const CountOptions& options = {});

/// Mean of l over the points of height <= B; throws InputError if there are
/// none.
double mean_freedom(const VarietyDescriptor& variety, const Rational& bound, const CountOptions& options = {});

/// Histogram bin of a freedom value, decided exactly at bin edges.
int histogram_bin(const FreedomValue& l);

struct AsymptoticFit {
  double C = 0;
  double a = 0;
  double b = 0;
  double residual = 0;  ///< Euclidean norm of the residuals of ln N
};

/// Least squares ln N = ln C + a ln B + (b - 1) ln ln B. Needs at least four
/// points with B > e and N > 0; throws InputError("degenerate grid")
/// otherwise.
AsymptoticFit fit_asymptotic(const std::vector<double>& bounds, const std::vector<double>& counts);

/// Least squares ln N = ln C + a ln B (b fixed to 1); needs two points.
AsymptoticFit fit_power(const std::vector<double>& bounds, const std::vector<double>& counts);

/// A fitted constant, optionally next to a closed-form target.
struct EmpiricalConstant {
  double value = 0;
  std::optional<double> target;
  /// |value - target| / target, or 0 without a target.
  double relative_gap() const;
};

struct CountReport {
  VarietyDescriptor variety;
  CountOptions options;
  std::vector<CountRow> rows;
  /// Fits of the eps-free counts, present when the grid allows them.
  std::optional<AsymptoticFit> fit;
  std::optional<AsymptoticFit> power_fit;
};

/// Counts on a strictly increasing grid of bounds and fits the free counts.
CountReport count_report(const VarietyDescriptor& variety, const std::vector<Rational>& bounds,
                         const CountOptions& options = {});

}  // namespace freedom
