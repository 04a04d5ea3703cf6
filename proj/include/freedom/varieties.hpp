#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "freedom/projective.hpp"

namespace freedom {

/// c * prod_i prod_j x_{i,j}^{e_{i,j}}, one exponent vector per factor.
struct Monomial {
  Integer coefficient;
  std::vector<std::vector<int>> exponents;
};

/// P^n, a product P^{n_1} x ... x P^{n_k}, or one hypersurface in such a
/// product.
struct VarietyDescriptor {
  enum class Kind { projective, product, hypersurface };

  Kind kind = Kind::projective;
  std::string name;
  std::vector<int> dims;
  /// Hypersurface equation; empty otherwise.
  std::vector<Monomial> equation;
  /// Weight of each factor's projective height in the height of the variety;
  /// empty means all ones.
  std::vector<Rational> height_weights;

  static VarietyDescriptor projective(int n);
  static VarietyDescriptor product(std::vector<int> dims);
  static VarietyDescriptor hypersurface(std::vector<int> dims, std::vector<Monomial> equation,
                                        std::vector<Rational> weights = {});

  /// "P<n>", "P1xP1" (any "P<a>xP<b>x..."), "BT" (sum y_i x_i^3 = 0 in
  /// P^3 x P^3, heights weighted (1, 3)), "quadric" (x0^2+x1^2+x2^2-x3^2-x4^2
  /// in P^4). Throws InputError for unknown names.
  static VarietyDescriptor preset(std::string_view name);

  /// Dimension of the variety.
  int dimension() const;
  /// Degree of the equation in each factor's variables.
  std::vector<int> multidegree() const;
  Rational weight(std::size_t factor) const;
};

/// key = value lines; '#' starts a comment; repeated keys keep every value.
using ConfigMap = std::map<std::string, std::vector<std::string>>;
ConfigMap parse_config(std::string_view text);

/// Reads kind/dims/term/weights/name (or preset) from a config.
///   kind = hypersurface
///   dims = 3,3
///   term = 1 : 3 0 0 0 | 1 0 0 0
///   weights = 1,3
VarietyDescriptor variety_from_config(const ConfigMap& config);

/// A rational point, one projective point per factor.
struct VarietyPoint {
  std::vector<ProjectivePoint> factors;

  /// "x0:x1 ; y0:y1"; validated against the descriptor (dimensions, and for
  /// hypersurfaces the equation).
  static VarietyPoint parse(const VarietyDescriptor& variety, std::string_view text);
  std::string str() const;
};

/// Value of the equation at the integer representatives.
Integer evaluate(const VarietyDescriptor& variety, const VarietyPoint& p);
/// Partial derivatives, one integer vector per factor.
std::vector<IntVector> gradient(const VarietyDescriptor& variety, const VarietyPoint& p);

/// sum_i w_i h_i(x_i) with the projective heights of the factors.
LogValue product_height(const VarietyDescriptor& variety, const VarietyPoint& p);

/// Direct sum of the factor tangent lattices.
EuclideanLattice product_tangent_lattice(const VarietyPoint& p);

/// (n_1 + ... + n_k) min_i mu_min(T_i) / (h_1 + ... + h_k), and 0 as soon as
/// some factor has height 0.
FreedomValue product_freedom(const VarietyPoint& p);

struct HypersurfaceTangent {
  EuclideanLattice lattice;
  /// Rows in the basis of the ambient direct-sum tangent lattice.
  IntMatrix basis;
  /// The differential in that basis.
  IntVector differential;
};

/// Saturated kernel of the differential inside the ambient tangent lattice.
/// Throws InputError "point is not on the variety" or "point is critical".
HypersurfaceTangent hypersurface_tangent_lattice(const VarietyDescriptor& variety,
                                                 const VarietyPoint& p);

/// Height, slopes and freedom of a point on any supported variety. For
/// products and hypersurfaces the height is the degree of the tangent
/// lattice.
FreedomReport variety_freedom(const VarietyDescriptor& variety, const VarietyPoint& p,
                              const NewtonPolygonOptions& options = {});

/// eps(t) = min(1/2, max(1, ln ln t)^{-alpha}) for t > e, 1/2 on (1, e].
class EpsilonFunction {
 public:
  explicit EpsilonFunction(Rational alpha);
  const Rational& alpha() const { return alpha_; }
  /// Throws InputError for t <= 1.
  double operator()(double t) const;
  double operator()(const Rational& t) const;

 private:
  Rational alpha_;
};

enum class EpsRounding { in, out };

/// eps(t) as a rational with denominator 2^64, rounded toward zero (`in`) or
/// away from it (`out`); dyadic values are exact.
Rational epsilon_rational(const EpsilonFunction& eps, const Rational& t, EpsRounding rounding);

struct ClassCheck {
  bool decreasing = true;
  bool scaled_increasing = true;  ///< ln(t)^a eps(t) nondecreasing for every sampled a
  bool half_increasing = true;    ///< ln(t)^{1/2} eps(t) nondecreasing
  bool ok() const { return decreasing && scaled_increasing && half_increasing; }
};

/// Checks the class conditions on an increasing grid of t > 1.
ClassCheck epsilon_class_check(const EpsilonFunction& eps, const std::vector<double>& grid,
                               const std::vector<double>& exponents = {0.25, 0.5, 0.75, 1.0});

struct FiberPoint {
  VarietyPoint point;
  LogValue fiber_height;   ///< height of the fiber coordinate
  LogValue height;         ///< height of the point on the variety
  FreedomValue freedom;
  bool eps_free = false;
};

struct FiberReport {
  VarietyPoint base;
  Rational bound;
  Rational eps;
  std::vector<FiberPoint> points;  ///< ordered by the fiber enumeration
  /// Largest fiber height among eps-free points, if any.
  std::optional<LogValue> max_free_fiber_height;
  /// ln of H(y)^{m / (n eps)}, the shape of the fibration bound.
  double log_bound_shape = 0;
  /// max over eps-free points of fiber height minus log_bound_shape: the
  /// fitted ln C.
  double fitted_log_constant = 0;
};

/// Points of the fiber of the projection to the last factor over `base` with
/// height at most `bound`. Supports two-factor products and hypersurfaces in
/// a two-factor product.
FiberReport fiber_decay_report(const VarietyDescriptor& variety, const ProjectivePoint& base,
                               const Rational& bound, const EpsilonFunction& eps,
                               EpsRounding rounding = EpsRounding::in);

}  // namespace freedom
