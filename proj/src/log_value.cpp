#include "freedom/log_value.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <sstream>

#include <mpfr.h>

namespace freedom {

namespace {

std::atomic<std::size_t> g_merge_cap{std::size_t{1} << 20};

std::size_t bit_size(const Rational& q) {
  return mpz_sizeinbase(q.get_num_mpz_t(), 2) + mpz_sizeinbase(q.get_den_mpz_t(), 2);
}

Rational rational_pow(const Rational& q, const Integer& k) {
  unsigned long e = mpz_get_ui(Integer(abs(k)).get_mpz_t());
  Integer num, den;
  mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), e);
  Rational out = k >= 0 ? Rational(num, den) : Rational(den, num);
  out.canonicalize();
  return out;
}

// gcd over Q of nonzero rationals, returned positive.
Rational rational_gcd(const std::vector<LogValue::Term>& terms) {
  Integer num = 0, den = 1;
  for (const auto& t : terms) {
    mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), t.coefficient.get_num_mpz_t());
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), t.coefficient.get_den_mpz_t());
  }
  Rational g(num, den);
  g.canonicalize();
  return g;
}

// RAII wrapper for an mpfr_t.
class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
  ~BigFloat() { mpfr_clear(v_); }
  BigFloat(const BigFloat&) = delete;
  BigFloat& operator=(const BigFloat&) = delete;
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

 private:
  mpfr_t v_;
};

struct Interval {
  explicit Interval(mpfr_prec_t prec) : lo(prec), hi(prec) {
    mpfr_set_zero(lo.get(), 1);
    mpfr_set_zero(hi.get(), 1);
  }
  BigFloat lo, hi;
};

// Encloses ln(z) for a positive integer z.
void log_integer(const Integer& z, Interval& out, mpfr_prec_t prec) {
  BigFloat a(prec), b(prec);
  mpfr_set_z(a.get(), z.get_mpz_t(), MPFR_RNDD);
  mpfr_set_z(b.get(), z.get_mpz_t(), MPFR_RNDU);
  mpfr_log(out.lo.get(), a.get(), MPFR_RNDD);
  mpfr_log(out.hi.get(), b.get(), MPFR_RNDU);
}

// Adds an enclosure of c * ln(q) to acc.
void accumulate_term(const LogValue::Term& t, Interval& acc, mpfr_prec_t prec) {
  Interval num(prec), den(prec), term(prec);
  log_integer(t.base.get_num(), num, prec);
  log_integer(t.base.get_den(), den, prec);
  mpfr_sub(term.lo.get(), num.lo.get(), den.hi.get(), MPFR_RNDD);
  mpfr_sub(term.hi.get(), num.hi.get(), den.lo.get(), MPFR_RNDU);
  const Integer& p = t.coefficient.get_num();
  const Integer& r = t.coefficient.get_den();
  BigFloat lo(prec), hi(prec);
  if (p >= 0) {
    mpfr_mul_z(lo.get(), term.lo.get(), p.get_mpz_t(), MPFR_RNDD);
    mpfr_mul_z(hi.get(), term.hi.get(), p.get_mpz_t(), MPFR_RNDU);
  } else {
    mpfr_mul_z(lo.get(), term.hi.get(), p.get_mpz_t(), MPFR_RNDD);
    mpfr_mul_z(hi.get(), term.lo.get(), p.get_mpz_t(), MPFR_RNDU);
  }
  mpfr_div_z(lo.get(), lo.get(), r.get_mpz_t(), MPFR_RNDD);
  mpfr_div_z(hi.get(), hi.get(), r.get_mpz_t(), MPFR_RNDU);
  mpfr_add(acc.lo.get(), acc.lo.get(), lo.get(), MPFR_RNDD);
  mpfr_add(acc.hi.get(), acc.hi.get(), hi.get(), MPFR_RNDU);
}

void enclose(const std::vector<LogValue::Term>& terms, Interval& acc, mpfr_prec_t prec) {
  for (const auto& t : terms) accumulate_term(t, acc, prec);
}

double log_integer_double(const Integer& z) {
  long exp = 0;
  double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

// Coprime base refinement: returns pairwise coprime integers > 1 such that
// every input is a product of their powers.
std::vector<Integer> coprime_base(std::vector<Integer> values) {
  std::vector<Integer> base;
  for (auto& v : values)
    if (v > 1) base.push_back(v);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < base.size() && !changed; ++i)
      for (std::size_t j = i + 1; j < base.size() && !changed; ++j) {
        Integer g = gcd(base[i], base[j]);
        if (g == 1) continue;
        Integer a = base[i] / g, b = base[j] / g;
        base.erase(base.begin() + static_cast<std::ptrdiff_t>(j));
        base.erase(base.begin() + static_cast<std::ptrdiff_t>(i));
        for (Integer* x : {&a, &b, &g})
          if (*x > 1) base.push_back(*x);
        changed = true;
      }
  }
  std::sort(base.begin(), base.end());
  base.erase(std::unique(base.begin(), base.end()), base.end());
  return base;
}

long multiplicity(Integer z, const Integer& p) {
  long k = 0;
  while (z > 1 && mpz_divisible_p(z.get_mpz_t(), p.get_mpz_t())) {
    z /= p;
    ++k;
  }
  return k;
}

// Exact: the logarithms of pairwise coprime integers > 1 are Q-independent.
bool formal_sum_is_zero(const std::vector<LogValue::Term>& terms) {
  std::vector<Integer> values;
  for (const auto& t : terms) {
    values.push_back(t.base.get_num());
    values.push_back(t.base.get_den());
  }
  for (const Integer& b : coprime_base(values)) {
    Rational c = 0;
    for (const auto& t : terms) {
      long e = multiplicity(t.base.get_num(), b) - multiplicity(t.base.get_den(), b);
      if (e != 0) c += t.coefficient * e;
    }
    if (c != 0) return false;
  }
  return true;
}

// Coefficients of the terms over a coprime integer base, one row per input.
std::vector<std::vector<Rational>> coprime_coordinates(
    const std::vector<const std::vector<LogValue::Term>*>& sums) {
  std::vector<Integer> values;
  for (const auto* terms : sums)
    for (const auto& t : *terms) {
      values.push_back(t.base.get_num());
      values.push_back(t.base.get_den());
    }
  std::vector<Integer> base = coprime_base(values);
  std::vector<std::vector<Rational>> out;
  for (const auto* terms : sums) {
    std::vector<Rational> row(base.size(), Rational(0));
    for (std::size_t k = 0; k < base.size(); ++k)
      for (const auto& t : *terms) {
        long e = multiplicity(t.base.get_num(), base[k]) - multiplicity(t.base.get_den(), base[k]);
        if (e != 0) row[k] += t.coefficient * e;
      }
    out.push_back(std::move(row));
  }
  return out;
}

int formal_sum_sign(const std::vector<LogValue::Term>& terms) {
  if (terms.empty()) return 0;
  double approx = 0, err = 0;
  for (const auto& t : terms) {
    double ln_num = log_integer_double(t.base.get_num());
    double ln_den = log_integer_double(t.base.get_den());
    double c = t.coefficient.get_d();
    approx += c * (ln_num - ln_den);
    err += std::fabs(c) * (std::fabs(ln_num) + std::fabs(ln_den) + 1.0) * 1e-12;
  }
  if (std::isfinite(approx) && std::isfinite(err)) {
    if (approx > err) return 1;
    if (approx < -err) return -1;
  }
  if (formal_sum_is_zero(terms)) return 0;
  for (mpfr_prec_t prec = 128;; prec *= 2) {
    Interval acc(prec);
    enclose(terms, acc, prec);
    if (mpfr_sgn(acc.lo.get()) > 0) return 1;
    if (mpfr_sgn(acc.hi.get()) < 0) return -1;
    if (prec > (mpfr_prec_t{1} << 24))
      throw InvariantError("sign of a nonzero logarithmic form not resolved");
  }
}

}  // namespace

std::size_t log_merge_cap() { return g_merge_cap.load(); }
void set_log_merge_cap(std::size_t bits) { g_merge_cap.store(bits); }

LogValue::LogValue(const Rational& coefficient, const Rational& base) {
  if (base <= 0) throw InputError("logarithm of a non-positive rational");
  Term t{coefficient, base};
  t.coefficient.canonicalize();
  t.base.canonicalize();
  terms_.push_back(std::move(t));
  normalize();
}

LogValue::LogValue(std::vector<Term> terms) : terms_(std::move(terms)) { normalize(); }

void LogValue::normalize() {
  // Combine equal bases and drop vanishing terms.
  std::vector<Term> merged;
  for (auto& t : terms_) {
    if (t.coefficient == 0 || t.base == 1) continue;
    if (t.base < 1) {
      t.base = 1 / t.base;
      t.coefficient = -t.coefficient;
    }
    auto it = std::find_if(merged.begin(), merged.end(),
                           [&](const Term& m) { return m.base == t.base; });
    if (it == merged.end())
      merged.push_back(t);
    else
      it->coefficient += t.coefficient;
  }
  std::erase_if(merged, [](const Term& t) { return t.coefficient == 0; });
  terms_ = std::move(merged);
  if (terms_.size() <= 1) return;

  Rational g = rational_gcd(terms_);
  std::size_t size = 0;
  std::vector<Integer> powers;
  for (const auto& t : terms_) {
    Rational k = t.coefficient / g;
    Integer kz = k.get_num();
    Integer mag = abs(kz);
    if (mag > Integer(static_cast<unsigned long>(log_merge_cap()))) {
      size = log_merge_cap() + 1;
      break;
    }
    size += mag.get_ui() * bit_size(t.base);
    if (size > log_merge_cap()) break;
    powers.push_back(kz);
  }
  if (size > log_merge_cap()) {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& a, const Term& b) { return a.base < b.base; });
    return;
  }
  Rational base = 1;
  for (std::size_t i = 0; i < terms_.size(); ++i) base *= rational_pow(terms_[i].base, powers[i]);
  terms_.clear();
  if (base == 1) return;
  if (base < 1) {
    terms_.push_back(Term{-g, 1 / base});
  } else {
    terms_.push_back(Term{g, base});
  }
}

Rational LogValue::coefficient() const {
  if (terms_.empty()) return 0;
  if (terms_.size() > 1) throw InvariantError("coefficient() of a formal log sum");
  return terms_.front().coefficient;
}

Rational LogValue::base() const {
  if (terms_.empty()) return 1;
  if (terms_.size() > 1) throw InvariantError("base() of a formal log sum");
  return terms_.front().base;
}

bool LogValue::is_zero() const {
  if (terms_.empty()) return true;
  if (terms_.size() == 1) return false;
  return formal_sum_is_zero(terms_);
}

int LogValue::sign() const {
  if (terms_.empty()) return 0;
  if (terms_.size() == 1) return sgn(terms_.front().coefficient);
  return formal_sum_sign(terms_);
}

LogValue LogValue::operator-() const {
  LogValue out = *this;
  for (auto& t : out.terms_) t.coefficient = -t.coefficient;
  return out;
}

LogValue& LogValue::operator+=(const LogValue& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  normalize();
  return *this;
}

LogValue& LogValue::operator-=(const LogValue& other) { return *this += -other; }

LogValue& LogValue::operator*=(const Rational& factor) {
  if (factor == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.coefficient *= factor;
  return *this;
}

LogValue& LogValue::operator/=(const Rational& factor) {
  if (factor == 0) throw InputError("division of a LogValue by zero");
  return *this *= Rational(1) / factor;
}

int compare(const LogValue& a, const LogValue& b) {
  LogValue d = a - b;
  return d.sign();
}

std::strong_ordering operator<=>(const LogValue& a, const LogValue& b) {
  int c = compare(a, b);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

bool operator==(const LogValue& a, const LogValue& b) { return compare(a, b) == 0; }

std::string LogValue::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i) os << " + ";
    os << terms_[i].coefficient.get_str() << "*ln(" << terms_[i].base.get_str() << ")";
  }
  return os.str();
}

std::optional<Rational> ratio(const LogValue& a, const LogValue& b) {
  if (b.is_zero()) return std::nullopt;
  if (a.is_zero()) return Rational(0);
  if (a.is_single() && b.is_single() && a.base() == b.base()) return a.coefficient() / b.coefficient();
  auto rows = coprime_coordinates({&a.terms(), &b.terms()});
  std::optional<Rational> r;
  for (std::size_t k = 0; k < rows[0].size(); ++k) {
    const Rational& x = rows[0][k];
    const Rational& y = rows[1][k];
    if (y == 0) {
      if (x != 0) return std::nullopt;
      continue;
    }
    Rational q = x / y;
    if (r && *r != q) return std::nullopt;
    r = q;
  }
  return r;
}

int compare_ratios(const LogValue& n1, const LogValue& d1, const LogValue& n2, const LogValue& d2) {
  if (d1.sign() <= 0 || d2.sign() <= 0) throw InputError("ratio with a non-positive denominator");
  if (auto r = ratio(d2, d1)) return compare(n1 * *r, n2);
  // Incommensurable denominators: sign of n1 d2 - n2 d1 by certified intervals.
  for (mpfr_prec_t prec = 128; prec <= (mpfr_prec_t{1} << 16); prec *= 2) {
    Interval a(prec), b(prec), c(prec), d(prec);
    enclose(n1.terms(), a, prec);
    enclose(d2.terms(), b, prec);
    enclose(n2.terms(), c, prec);
    enclose(d1.terms(), d, prec);
    BigFloat lo(prec), hi(prec), t(prec);
    // Denominators are positive, so [a]*[b] has ends among a.lo*b.lo ... a.hi*b.hi.
    auto product = [&](Interval& x, Interval& y, BigFloat& plo, BigFloat& phi) {
      mpfr_srcptr xs[2] = {x.lo.get(), x.hi.get()};
      mpfr_srcptr ys[2] = {y.lo.get(), y.hi.get()};
      mpfr_set_inf(plo.get(), 1);
      mpfr_set_inf(phi.get(), -1);
      for (auto* xv : xs)
        for (auto* yv : ys) {
          mpfr_mul(t.get(), xv, yv, MPFR_RNDD);
          mpfr_min(plo.get(), plo.get(), t.get(), MPFR_RNDD);
          mpfr_mul(t.get(), xv, yv, MPFR_RNDU);
          mpfr_max(phi.get(), phi.get(), t.get(), MPFR_RNDU);
        }
    };
    BigFloat p1lo(prec), p1hi(prec), p2lo(prec), p2hi(prec);
    product(a, b, p1lo, p1hi);
    product(c, d, p2lo, p2hi);
    mpfr_sub(lo.get(), p1lo.get(), p2hi.get(), MPFR_RNDD);
    mpfr_sub(hi.get(), p1hi.get(), p2lo.get(), MPFR_RNDU);
    if (mpfr_sgn(lo.get()) > 0) return 1;
    if (mpfr_sgn(hi.get()) < 0) return -1;
  }
  throw InvariantError("comparison of incommensurable ratios not resolved");
}

namespace {

// Rounds the value to `target` bits with round-to-nearest, refining the
// working precision until both ends of the enclosure round identically.
void round_value(const LogValue& a, mpfr_prec_t target, BigFloat& out) {
  for (mpfr_prec_t prec = target + 32;; prec *= 2) {
    Interval acc(prec);
    enclose(a.terms(), acc, prec);
    BigFloat lo(target), hi(target);
    mpfr_set(lo.get(), acc.lo.get(), MPFR_RNDN);
    mpfr_set(hi.get(), acc.hi.get(), MPFR_RNDN);
    if (mpfr_equal_p(lo.get(), hi.get())) {
      mpfr_set(out.get(), lo.get(), MPFR_RNDN);
      return;
    }
    if (prec > (mpfr_prec_t{1} << 24)) throw InvariantError("rounding did not converge");
  }
}

}  // namespace

double to_double(const LogValue& a) {
  if (a.is_zero()) return 0.0;
  BigFloat v(53);
  round_value(a, 53, v);
  return mpfr_get_d(v.get(), MPFR_RNDN);
}

std::string to_decimal(const LogValue& a, int precision_bits, int digits) {
  if (precision_bits < 53) throw InputError("precision_bits must be >= 53");
  if (a.is_zero()) return "0";
  BigFloat v(precision_bits);
  round_value(a, precision_bits, v);
  if (digits <= 0) digits = static_cast<int>(precision_bits * 0.30103) + 1;
  std::vector<char> buf(static_cast<std::size_t>(digits) + 64);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, v.get());
  return std::string(buf.data());
}

std::pair<double, double> enclosure(const LogValue& a, int precision_bits) {
  Interval acc(precision_bits);
  enclose(a.terms(), acc, precision_bits);
  return {mpfr_get_d(acc.lo.get(), MPFR_RNDD), mpfr_get_d(acc.hi.get(), MPFR_RNDU)};
}

}  // namespace freedom
