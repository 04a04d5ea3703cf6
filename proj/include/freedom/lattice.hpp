#pragma once

#include <optional>
#include <string>
#include <vector>

#include "freedom/exact.hpp"
#include "freedom/log_value.hpp"

namespace freedom {

/// Z^n with the inner product given by a positive definite rational Gram
/// form. Over Q every adelic lattice reduces to this shape once the finite
/// places are fixed to the standard integral structure.
class EuclideanLattice {
 public:
  /// Rank-zero lattice.
  EuclideanLattice() = default;
  /// Throws InputError if the form is not positive definite.
  explicit EuclideanLattice(SymmetricForm gram);
  explicit EuclideanLattice(RationalMatrix gram) : EuclideanLattice(SymmetricForm(std::move(gram))) {}

  static EuclideanLattice standard(Eigen::Index n);

  Eigen::Index rank() const { return gram_.dimension(); }
  const SymmetricForm& gram() const { return gram_; }
  const RationalMatrix& form() const { return gram_.entries(); }

  Rational norm2(const IntVector& v) const { return bilinear(form(), v, v); }

  friend bool operator==(const EuclideanLattice& a, const EuclideanLattice& b) {
    return a.gram_ == b.gram_;
  }

 private:
  SymmetricForm gram_;
};

/// -1/2 ln det(gram); zero for rank 0.
LogValue degree(const EuclideanLattice& lattice);

EuclideanLattice dual(const EuclideanLattice& lattice);

/// Restriction of the form to the Z-span of the generator rows (saturated
/// first when requested), expressed in its HNF basis.
EuclideanLattice sublattice(const EuclideanLattice& lattice, const IntMatrix& generators,
                            bool saturate);

struct Quotient {
  EuclideanLattice lattice;
  /// Rows completing the HNF basis of S to a basis of Z^n; their classes
  /// form the basis of the quotient.
  IntMatrix complement;
};

/// L / S with the orthogonal-projection metric. Throws InputError
/// ("quotient has torsion") unless S is saturated.
Quotient quotient_with_basis(const EuclideanLattice& lattice, const IntMatrix& sub);
inline EuclideanLattice quotient(const EuclideanLattice& lattice, const IntMatrix& sub) {
  return quotient_with_basis(lattice, sub).lattice;
}

EuclideanLattice direct_sum(const EuclideanLattice& a, const EuclideanLattice& b);

/// Tensor with the rank-one lattice of squared norm t: gram := t * gram.
EuclideanLattice scale(const EuclideanLattice& lattice, const Rational& t);

/// Unimodular U whose rows are an LLL-reduced basis (delta = 3/4). Used only
/// to seed exact enumeration.
IntMatrix lll_reduce(const RationalMatrix& gram);

struct ShortVector {
  IntVector coords;
  Rational norm2;
};

/// All nonzero v with v^T G v <= bound, one per +/- pair (first nonzero
/// coordinate positive), sorted by (norm, coordinates).
std::vector<ShortVector> short_vectors(const EuclideanLattice& lattice, const Rational& bound);

struct MinimaVector {
  std::vector<Rational> squared;  ///< lambda_i^2
  std::vector<LogValue> minima;   ///< ln lambda_i
  std::vector<IntVector> vectors;
};

MinimaVector successive_minima(const EuclideanLattice& lattice);

struct NewtonPolygonOptions {
  int rank_cap = 6;
  /// Multiplies every certified search radius; 2 re-runs the search with a
  /// doubled bound.
  Rational bound_multiplier = 1;
};

/// Roof m(0..n) of the lattice with its slopes.
///
/// `max_degree[i]` is the exact maximum of deg(F) over saturated rank-i
/// sublattices, realized by `witnesses[i]` (HNF rows); `roof` is its upper
/// concave hull at the integer abscissae.
struct NewtonPolygon {
  Eigen::Index rank = 0;
  std::vector<LogValue> roof;
  std::vector<LogValue> slopes;
  std::vector<LogValue> max_degree;
  std::vector<Rational> min_covolume2;  ///< det Gram of the witness
  std::vector<IntMatrix> witnesses;
  /// Final squared-norm radius of the short-vector search for each abscissa
  /// (0 where no search was needed). Abscissae above n/2 are searched on the
  /// dual lattice; `searched_on_dual` records that.
  std::vector<Rational> certified_bounds;
  std::vector<bool> searched_on_dual;
  std::vector<int> hull_vertices;

  const LogValue& mu_max() const { return slopes.front(); }
  const LogValue& mu_min() const { return slopes.back(); }
};

/// Throws InputError("rank cap exceeded") above options.rank_cap.
NewtonPolygon newton_polygon(const EuclideanLattice& lattice,
                             const NewtonPolygonOptions& options = {});

struct SlopeSummary {
  LogValue mu_max;
  LogValue mu_min;
  LogValue mu_mean;
};

SlopeSummary slopes_summary(const EuclideanLattice& lattice,
                            const NewtonPolygonOptions& options = {});
SlopeSummary slopes_summary(const NewtonPolygon& polygon);

/// gamma_i^i for the Hermite constant, i = 1..8.
Rational hermite_constant_power(int i);

}  // namespace freedom
