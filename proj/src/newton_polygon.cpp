#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "freedom/lattice.hpp"

namespace freedom {

namespace {

struct Rankin {
  Rational covolume2;  // det Gram of the best saturated sublattice
  IntMatrix witness;
  Rational bound;      // final certified squared-norm radius
};

Rational power(const Rational& q, int e) {
  Rational out = 1;
  for (int i = 0; i < e; ++i) out *= q;
  return out;
}

// Minimum of det Gram(F) over saturated rank-i sublattices F, 1 <= i < n.
//
// The successive-minima vectors v_1..v_i of an optimal F satisfy
// prod |v_j|^2 <= gamma_i^i det(F) <= gamma_i^i * best and |v_j| >= lambda_1,
// so each has squared norm at most gamma_i^i * best / lambda_1^{2(i-1)}, and
// the saturation of their span is F.
Rankin min_covolume(const EuclideanLattice& lattice, int i, const Rational& multiplier) {
  const Eigen::Index n = lattice.rank();
  const RationalMatrix& g = lattice.form();
  IntMatrix u = lll_reduce(g);

  Rational lambda1 = lattice.norm2(u.row(0).transpose());
  for (Eigen::Index r = 1; r < n; ++r) lambda1 = std::min(lambda1, lattice.norm2(u.row(r).transpose()));
  auto shortest = short_vectors(lattice, lambda1);
  lambda1 = shortest.front().norm2;

  if (i == 1) {
    IntMatrix w(1, n);
    w.row(0) = shortest.front().coords.transpose();
    return {lambda1, hermite_normal_form(w), lambda1 * multiplier};
  }

  // Seed: the first i vectors of the reduced basis span a saturated module.
  Rankin best;
  best.witness = hermite_normal_form(IntMatrix(u.topRows(i)));
  best.covolume2 = determinant(restrict_form(g, best.witness));

  const Rational gamma = hermite_constant_power(i);
  const Rational floor_factor = power(lambda1, i - 1);
  auto radius = [&]() -> Rational { return gamma * best.covolume2 / floor_factor * multiplier; };
  auto product_cap = [&]() -> Rational { return gamma * best.covolume2 * multiplier; };

  std::vector<ShortVector> pool = short_vectors(lattice, radius());

  // Floating copies drive the pruning; every decision near a tie is
  // redone exactly, and a pruning test only ever errs toward searching more.
  constexpr double kSlack = 1e-9;
  const Eigen::MatrixXd gd = g.unaryExpr([](const Rational& q) { return q.get_d(); });
  std::vector<Eigen::VectorXd> vd, gvd;
  std::vector<double> nd;
  for (const auto& p : pool) {
    Eigen::VectorXd v = p.coords.unaryExpr([](const Integer& z) { return z.get_d(); });
    gvd.push_back(gd * v);
    vd.push_back(std::move(v));
    nd.push_back(p.norm2.get_d());
  }
  double best_d = best.covolume2.get_d();
  double radius_d = radius().get_d(), cap_d = product_cap().get_d();
  auto refresh = [&] {
    best_d = best.covolume2.get_d();
    radius_d = radius().get_d();
    cap_d = product_cap().get_d();
  };

  std::vector<std::size_t> chosen;
  std::vector<double> partial_product{1.0};

  // det of the Gram matrix of the chosen vectors plus `extra`, in doubles.
  auto gram_det_d = [&](std::size_t extra) {
    const auto k = static_cast<Eigen::Index>(chosen.size() + 1);
    Eigen::MatrixXd m(k, k);
    auto idx = [&](Eigen::Index r) { return r + 1 < k ? chosen[static_cast<std::size_t>(r)] : extra; };
    for (Eigen::Index r = 0; r < k; ++r)
      for (Eigen::Index c = r; c < k; ++c) m(r, c) = m(c, r) = vd[idx(r)].dot(gvd[idx(c)]);
    return m.determinant();
  };
  auto exact_span = [&](std::size_t extra) {
    IntMatrix span(static_cast<Eigen::Index>(chosen.size() + 1), n);
    for (std::size_t k = 0; k < chosen.size(); ++k) span.row(static_cast<Eigen::Index>(k)) = pool[chosen[k]].coords.transpose();
    span.row(span.rows() - 1) = pool[extra].coords.transpose();
    return span;
  };

  // Successive-minima vectors of a lattice of rank <= 3 form a basis, so for
  // i <= 3 the optimum is reached by a span that is already saturated.
  const bool spans_are_enough = i <= 3;

  auto consider = [&](std::size_t last) {
    double scale = partial_product.back() * nd[last];
    double det_d = gram_det_d(last);
    if (spans_are_enough && det_d > best_d * (1 + kSlack) + kSlack * scale) return;
    IntMatrix span = exact_span(last);
    Rational span_det = determinant(restrict_form(g, span));
    if (span_det == 0) return;
    IntMatrix sat = spans_are_enough ? span : hnf_saturate(span);
    Rational det = spans_are_enough ? span_det : determinant(restrict_form(g, sat));
    if (det > best.covolume2) return;
    if (spans_are_enough) sat = hermite_normal_form(sat);
    if (det < best.covolume2 || lex_compare(sat, best.witness) < 0) {
      best.covolume2 = det;
      best.witness = sat;
      refresh();
    }
  };

  std::function<void(std::size_t)> extend = [&](std::size_t start) {
    const int depth = static_cast<int>(chosen.size());
    const int remaining = i - depth;
    for (std::size_t j = start; j < pool.size(); ++j) {
      const double nj = nd[j];
      if (nj > radius_d * (1 + kSlack)) break;
      if (partial_product.back() * std::pow(nj, remaining) > cap_d * (1 + kSlack)) break;
      if (remaining == 1) {
        consider(j);
        continue;
      }
      // Reject vectors dependent on the current prefix.
      if (depth > 0) {
        double det_d = gram_det_d(j);
        if (std::abs(det_d) <= 1e-6 * partial_product.back() * nj &&
            determinant(restrict_form(g, exact_span(j))) == 0)
          continue;
      }
      chosen.push_back(j);
      partial_product.push_back(partial_product.back() * nj);
      extend(j + 1);
      chosen.pop_back();
      partial_product.pop_back();
    }
  };
  extend(0);
  best.bound = radius();
  return best;
}

}  // namespace

NewtonPolygon newton_polygon(const EuclideanLattice& lattice, const NewtonPolygonOptions& options) {
  const Eigen::Index n = lattice.rank();
  if (n > options.rank_cap) throw InputError("rank cap exceeded");
  if (options.bound_multiplier < 1) throw InputError("bound multiplier must be >= 1");
  const auto nu = static_cast<std::size_t>(n);

  NewtonPolygon poly;
  poly.rank = n;
  poly.max_degree.resize(nu + 1);
  poly.min_covolume2.assign(nu + 1, Rational(1));
  poly.witnesses.assign(nu + 1, IntMatrix(0, n));
  poly.certified_bounds.assign(nu + 1, Rational(0));
  poly.searched_on_dual.assign(nu + 1, false);
  poly.roof.assign(nu + 1, LogValue());
  if (n == 0) return poly;

  const Rational det = lattice.gram().determinant();
  poly.min_covolume2[nu] = det;
  poly.witnesses[nu] = IntMatrix::Identity(n, n);

  std::optional<EuclideanLattice> dual_lattice;
  for (Eigen::Index i = 1; i < n; ++i) {
    auto iu = static_cast<std::size_t>(i);
    if (2 * i <= n) {
      Rankin r = min_covolume(lattice, static_cast<int>(i), options.bound_multiplier);
      poly.min_covolume2[iu] = r.covolume2;
      poly.witnesses[iu] = r.witness;
      poly.certified_bounds[iu] = r.bound;
    } else {
      // Saturated rank-i F <-> its annihilator W of rank n-i in the dual,
      // with det Gram(F) = det(G) * det Gram^dual(W).
      if (!dual_lattice) dual_lattice = dual(lattice);
      Rankin r = min_covolume(*dual_lattice, static_cast<int>(n - i), options.bound_multiplier);
      IntMatrix f = integer_kernel(r.witness);
      Rational cov = determinant(restrict_form(lattice.form(), f));
      if (cov != det * r.covolume2) throw InvariantError("dual covolume identity failed");
      poly.min_covolume2[iu] = cov;
      poly.witnesses[iu] = f;
      poly.certified_bounds[iu] = r.bound;
      poly.searched_on_dual[iu] = true;
    }
  }
  for (std::size_t i = 0; i <= nu; ++i)
    poly.max_degree[i] = LogValue(Rational(-1, 2), poly.min_covolume2[i]);

  // Upper concave hull of (i, max_degree[i]).
  std::vector<int> hull;
  for (int c = 0; c <= static_cast<int>(n); ++c) {
    while (hull.size() >= 2) {
      int a = hull[hull.size() - 2], b = hull.back();
      const auto& ma = poly.max_degree[static_cast<std::size_t>(a)];
      const auto& mb = poly.max_degree[static_cast<std::size_t>(b)];
      const auto& mc = poly.max_degree[static_cast<std::size_t>(c)];
      if (compare((mb - ma) * Rational(c - a), (mc - ma) * Rational(b - a)) <= 0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(c);
  }
  poly.hull_vertices = hull;
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    int a = hull[h], c = hull[h + 1];
    const auto& ma = poly.max_degree[static_cast<std::size_t>(a)];
    const auto& mc = poly.max_degree[static_cast<std::size_t>(c)];
    LogValue step = (mc - ma) / Rational(c - a);
    for (int i = a; i <= c; ++i) poly.roof[static_cast<std::size_t>(i)] = ma + step * Rational(i - a);
  }
  for (std::size_t i = 1; i <= nu; ++i) poly.slopes.push_back(poly.roof[i] - poly.roof[i - 1]);
  return poly;
}

SlopeSummary slopes_summary(const NewtonPolygon& polygon) {
  if (polygon.rank == 0) throw InputError("slopes of a rank-zero lattice");
  return {polygon.mu_max(), polygon.mu_min(),
          polygon.roof.back() / Rational(static_cast<long>(polygon.rank))};
}

SlopeSummary slopes_summary(const EuclideanLattice& lattice, const NewtonPolygonOptions& options) {
  return slopes_summary(newton_polygon(lattice, options));
}

}  // namespace freedom
