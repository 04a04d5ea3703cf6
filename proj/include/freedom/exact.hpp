#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include <Eigen/Core>

namespace Eigen {

template <>
struct NumTraits<mpz_class> : GenericNumTraits<mpz_class> {
  using Real = mpz_class;
  using NonInteger = mpq_class;
  using Nested = mpz_class;
  using Literal = mpz_class;
  enum {
    IsInteger = 1,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 6,
    AddCost = 60,
    MulCost = 80
  };
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
};

template <>
struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
  using Real = mpq_class;
  using NonInteger = mpq_class;
  using Nested = mpq_class;
  using Literal = mpq_class;
  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 6,
    AddCost = 150,
    MulCost = 100
  };
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen

namespace freedom {

using Integer = mpz_class;
using Rational = mpq_class;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using IntMatrix = Matrix<Integer>;
using RationalMatrix = Matrix<Rational>;
using IntVector = Vector<Integer>;
using RationalVector = Vector<Rational>;

/// Malformed or out-of-contract input (CLI exit code 2).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal invariant failed (CLI exit code 3).
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses "p", "-p", "p/q" or "<int>e<k>" (k >= 0) into a reduced rational.
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& q);

template <typename Scalar>
Matrix<Rational> to_rational(const Matrix<Scalar>& m) {
  Matrix<Rational> out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = Rational(m(i, j));
  return out;
}

/// Exact determinant by Gaussian elimination over Q.
Rational determinant(const RationalMatrix& m);
/// Exact rank over Q.
Eigen::Index rank(const RationalMatrix& m);
inline Eigen::Index rank(const IntMatrix& m) { return rank(to_rational(m)); }
/// Exact inverse; throws InputError on a singular matrix.
RationalMatrix inverse(const RationalMatrix& m);

/// Row Hermite normal form of the Z-span of the rows (zero rows dropped).
/// Pivots are positive, entries above a pivot reduced into [0, pivot).
IntMatrix hermite_normal_form(const IntMatrix& m);

/// Basis (rows, in HNF) of {v in Z^n : A v = 0}. Always saturated.
IntMatrix integer_kernel(const IntMatrix& a);

/// HNF basis of the saturation {v in Z^n : m v in rowspan_Z(M), m >= 1}.
/// Throws InputError("degenerate generator set") if M is row-rank deficient.
IntMatrix hnf_saturate(const IntMatrix& m);

/// Rows [S; C] form a basis of Z^n. Requires S saturated (HNF rows).
/// When every HNF pivot of S is 1 the completion is the unit vectors of the
/// non-pivot columns; otherwise a unimodular transform supplies it.
IntMatrix complete_basis(const IntMatrix& s);

/// Lexicographic comparison of equally shaped integer matrices (row-major).
int lex_compare(const IntMatrix& a, const IntMatrix& b);

/// Symmetric rational form; positive definiteness is tested by exact
/// leading-minor signs.
class SymmetricForm {
 public:
  SymmetricForm() = default;
  explicit SymmetricForm(RationalMatrix entries);

  Eigen::Index dimension() const { return entries_.rows(); }
  const RationalMatrix& entries() const { return entries_; }
  const Rational& operator()(Eigen::Index i, Eigen::Index j) const {
    return entries_(i, j);
  }

  bool is_positive_definite() const;
  Rational determinant() const;

  /// Identity form of dimension n.
  static SymmetricForm identity(Eigen::Index n);

  friend bool operator==(const SymmetricForm& a, const SymmetricForm& b) {
    return a.entries_.rows() == b.entries_.rows() &&
           a.entries_.cols() == b.entries_.cols() &&
           (a.entries_.size() == 0 || a.entries_ == b.entries_);
  }

 private:
  RationalMatrix entries_;
};

/// v^T G w for integer vectors.
Rational bilinear(const RationalMatrix& gram, const IntVector& v,
                  const IntVector& w);

/// Gram of the row basis B under G: B G B^T.
RationalMatrix restrict_form(const RationalMatrix& gram, const IntMatrix& basis);

}  // namespace freedom
