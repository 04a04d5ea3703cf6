#pragma once

#include <compare>
#include <optional>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "freedom/exact.hpp"

namespace freedom {

/// An exact real number sum_k c_k * ln(q_k) with rational c_k and positive
/// rational q_k.
///
/// Sums are merged into a single term c * ln(q) whenever the merged base
/// stays below the size cap (see set_log_merge_cap); otherwise the formal sum
/// is kept. The single-term form is canonical: either zero, stored as
/// 0 * ln(1), or c != 0 with q > 1.
///
/// Ordering is exact. Single terms are compared by exact powering; formal
/// sums go through a floating filter, an exact zero test over a coprime base
/// and certified interval evaluation.
class LogValue {
 public:
  struct Term {
    Rational coefficient;
    Rational base;
  };

  LogValue() = default;
  LogValue(const Rational& coefficient, const Rational& base);

  /// ln(q).
  static LogValue log(const Rational& q) { return LogValue(1, q); }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_single() const { return terms_.size() <= 1; }
  /// Coefficient and base of the single-term form; (0, 1) for zero.
  Rational coefficient() const;
  Rational base() const;

  bool is_zero() const;
  int sign() const;

  LogValue operator-() const;
  LogValue& operator+=(const LogValue& other);
  LogValue& operator-=(const LogValue& other);
  LogValue& operator*=(const Rational& factor);
  LogValue& operator/=(const Rational& factor);

  friend LogValue operator+(LogValue a, const LogValue& b) { return a += b; }
  friend LogValue operator-(LogValue a, const LogValue& b) { return a -= b; }
  friend LogValue operator*(LogValue a, const Rational& t) { return a *= t; }
  friend LogValue operator*(const Rational& t, LogValue a) { return a *= t; }
  friend LogValue operator/(LogValue a, const Rational& t) { return a /= t; }

  friend std::strong_ordering operator<=>(const LogValue& a, const LogValue& b);
  friend bool operator==(const LogValue& a, const LogValue& b);

  /// "p/r*ln(a/b)" terms joined by " + "; "0" for zero.
  std::string str() const;

 private:
  explicit LogValue(std::vector<Term> terms);
  void normalize();

  std::vector<Term> terms_;
};

/// -1, 0 or +1 as a < b, a == b, a > b. Never decided by approximation alone.
int compare(const LogValue& a, const LogValue& b);

/// The rational r with a = r * b, if one exists.
std::optional<Rational> ratio(const LogValue& a, const LogValue& b);

/// Sign of n1/d1 - n2/d2 for positive denominators. Exact when d1, d2 are
/// rationally proportional; otherwise decided by certified intervals, with
/// InvariantError if the two ratios cannot be separated.
int compare_ratios(const LogValue& n1, const LogValue& d1, const LogValue& n2, const LogValue& d2);

/// Largest merged base, in bits, before sums fall back to formal form.
std::size_t log_merge_cap();
void set_log_merge_cap(std::size_t bits);

/// Correctly rounded (round-to-nearest) double.
double to_double(const LogValue& a);

/// Correctly rounded to `precision_bits` (>= 53), printed with `digits`
/// significant decimal digits.
std::string to_decimal(const LogValue& a, int precision_bits, int digits = 0);

/// Certified enclosure [lo, hi] of the value at the given working precision,
/// rendered as doubles rounded outward.
std::pair<double, double> enclosure(const LogValue& a, int precision_bits);

}  // namespace freedom
