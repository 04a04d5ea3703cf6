#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "freedom/lattice.hpp"

namespace freedom {

/// A point of P^n(Q) in primitive integer coordinates, first nonzero
/// coordinate positive.
class ProjectivePoint {
 public:
  ProjectivePoint() = default;
  /// Divides out the content and fixes the sign; throws InputError on the
  /// zero vector or fewer than two coordinates.
  explicit ProjectivePoint(std::vector<std::int64_t> coords);

  /// "x0:x1:...:xn", normalized.
  static ProjectivePoint parse(std::string_view text);

  int dimension() const { return static_cast<int>(coords_.size()) - 1; }
  const std::vector<std::int64_t>& coords() const { return coords_; }
  std::int64_t operator[](std::size_t i) const { return coords_[i]; }
  /// sum of x_i^2
  Integer norm2() const;
  IntVector vector() const;

  std::string str() const;

  friend bool operator==(const ProjectivePoint&, const ProjectivePoint&) = default;

 private:
  std::vector<std::int64_t> coords_;
};

/// h(x) = ((n+1)/2) ln(sum x_i^2).
LogValue height(const ProjectivePoint& x);

struct TangentLattice {
  EuclideanLattice lattice;
  /// Rows of Z^{n+1} whose classes modulo x form the lattice basis.
  IntMatrix basis;
};

/// (Z^{n+1} / Zx with the projection metric) scaled by 1/|x|^2.
TangentLattice tangent_lattice_with_basis(const ProjectivePoint& x);
inline EuclideanLattice tangent_lattice(const ProjectivePoint& x) {
  return tangent_lattice_with_basis(x).lattice;
}

/// l = numerator / denominator, with numerator = n * mu_min clamped below at
/// zero and denominator the height. Zero whenever either is non-positive.
class FreedomValue {
 public:
  FreedomValue() = default;
  FreedomValue(LogValue numerator, LogValue denominator);

  const LogValue& numerator() const { return numerator_; }
  const LogValue& denominator() const { return denominator_; }
  bool is_zero() const { return numerator_.is_zero(); }

  double value() const;
  /// Sign of l - t, exact.
  int compare(const Rational& t) const;
  bool at_least(const Rational& t) const { return compare(t) >= 0; }

  std::string str() const;

 private:
  LogValue numerator_;
  LogValue denominator_;
};

/// Sign of a - b; exact when the denominators are rationally proportional
/// (always the case for two evaluations at the same point).
int compare(const FreedomValue& a, const FreedomValue& b);
inline bool operator==(const FreedomValue& a, const FreedomValue& b) { return compare(a, b) == 0; }

/// Slope data of a tangent lattice together with the freedom it defines.
struct FreedomReport {
  LogValue height;
  LogValue mu_min;
  LogValue mu_max;
  FreedomValue freedom;
  /// Saturated sublattice of the tangent lattice (in its basis) that realizes
  /// the last vertex before the final segment of the roof.
  IntMatrix witness;
};

/// n mu_min(T) / h computed from the Newton polygon of T; `height` must be
/// deg T.
FreedomReport freedom_from_lattice(const EuclideanLattice& tangent, const LogValue& height,
                                   const NewtonPolygonOptions& options = {});

FreedomReport freedom_report(const ProjectivePoint& x, const NewtonPolygonOptions& options = {});
inline FreedomValue freedom(const ProjectivePoint& x) { return freedom_report(x).freedom; }

struct FormulaResult {
  FreedomValue freedom;
  /// Basis (rows) of the minimizing subspace F of Q^{n+1}; F contains x.
  IntMatrix subspace;
  /// codim of F in Q^{n+1}
  int codimension = 0;
};

/// l(x) = n/(n+1) + min_F (-n deg F / (codim F * h)), F over proper subspaces
/// containing x. Searched on the lattice x^perp, whose rank-c saturated
/// sublattices are the annihilators of the codim-c subspaces F.
/// Throws InputError when h(x) = 0.
FormulaResult freedom_formula(const ProjectivePoint& x, const NewtonPolygonOptions& options = {});

/// Freedom of a point of P^2 by integer reduction of x^perp; equal to
/// freedom(x) and used on the counting hot path.
FreedomValue freedom_plane(const ProjectivePoint& x);

/// s = |x|^2 and the squared length of a shortest nonzero vector of the
/// integer lattice x^perp, for x in P^2 (s = 1 gives shortest = 1).
struct PlaneInvariants {
  std::uint64_t s = 1;
  std::uint64_t shortest = 1;
};
PlaneInvariants plane_invariants(const ProjectivePoint& x);
/// l(x) from the invariants: (ln s + min(ln shortest, ln s / 2)) / ((3/2) ln s).
FreedomValue plane_freedom(const PlaneInvariants& inv);

/// A block of the enumeration: all points with lo <= sum x_i^2 < hi.
struct PointChunk {
  std::uint64_t lo = 1;
  std::uint64_t hi = 1;
};

/// Largest s with s^{n+1} <= B^2, i.e. the bound on sum x_i^2 for H <= B.
std::uint64_t norm_bound(int n, const Rational& bound);

/// Partition of [1, norm_bound] into chunks of roughly `target` points each;
/// depends only on (n, bound, target).
std::vector<PointChunk> enumeration_chunks(int n, const Rational& bound, std::size_t target = 1 << 14);

/// Points of one chunk ordered by (sum x_i^2, coordinates).
std::vector<ProjectivePoint> enumerate_chunk(int n, const PointChunk& chunk);

/// Streams every point with H(x) <= bound once, ordered by (sum x_i^2,
/// coordinates).
void enumerate_points(int n, const Rational& bound,
                      const std::function<void(const ProjectivePoint&)>& visit);

}  // namespace freedom
