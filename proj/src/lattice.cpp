#include "freedom/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace freedom {

EuclideanLattice::EuclideanLattice(SymmetricForm gram) : gram_(std::move(gram)) {
  if (!gram_.is_positive_definite()) throw InputError("Gram form is not positive definite");
}

EuclideanLattice EuclideanLattice::standard(Eigen::Index n) {
  return EuclideanLattice(SymmetricForm::identity(n));
}

LogValue degree(const EuclideanLattice& lattice) {
  if (lattice.rank() == 0) return {};
  return LogValue(Rational(-1, 2), lattice.gram().determinant());
}

EuclideanLattice dual(const EuclideanLattice& lattice) {
  if (lattice.rank() == 0) return {};
  return EuclideanLattice(inverse(lattice.form()));
}

EuclideanLattice sublattice(const EuclideanLattice& lattice, const IntMatrix& generators,
                            bool saturate) {
  if (generators.cols() != lattice.rank())
    throw InputError("generator length does not match lattice rank");
  if (rank(generators) != generators.rows()) throw InputError("degenerate generator set");
  IntMatrix basis = saturate ? hnf_saturate(generators) : hermite_normal_form(generators);
  return EuclideanLattice(restrict_form(lattice.form(), basis));
}

Quotient quotient_with_basis(const EuclideanLattice& lattice, const IntMatrix& sub) {
  const Eigen::Index n = lattice.rank();
  if (sub.cols() != n) throw InputError("sublattice generator length does not match rank");
  IntMatrix s = hermite_normal_form(sub);
  if (s.rows() != sub.rows()) throw InputError("degenerate generator set");
  if (s.rows() > 0 && lex_compare(hnf_saturate(s), s) != 0)
    throw InputError("quotient has torsion");
  IntMatrix c = complete_basis(s);
  if (c.rows() == 0) return {EuclideanLattice(), c};
  const RationalMatrix& g = lattice.form();
  RationalMatrix cc = restrict_form(g, c);
  if (s.rows() == 0) return {EuclideanLattice(cc), c};
  // Schur complement: C G C^T - C G S^T (S G S^T)^{-1} S G C^T.
  RationalMatrix cr = to_rational(c), sr = to_rational(s);
  RationalMatrix cgs = cr * g * sr.transpose();
  RationalMatrix ss_inv = inverse(restrict_form(g, s));
  RationalMatrix q = cc - cgs * ss_inv * cgs.transpose();
  return {EuclideanLattice(q), c};
}

EuclideanLattice direct_sum(const EuclideanLattice& a, const EuclideanLattice& b) {
  const Eigen::Index n = a.rank() + b.rank();
  RationalMatrix g = RationalMatrix::Zero(n, n);
  if (a.rank() > 0) g.topLeftCorner(a.rank(), a.rank()) = a.form();
  if (b.rank() > 0) g.bottomRightCorner(b.rank(), b.rank()) = b.form();
  return EuclideanLattice(g);
}

EuclideanLattice scale(const EuclideanLattice& lattice, const Rational& t) {
  if (t <= 0) throw InputError("scale factor must be positive");
  if (lattice.rank() == 0) return lattice;
  RationalMatrix g = lattice.form();
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) *= t;
  return EuclideanLattice(g);
}

namespace {

Integer round_nearest(const Rational& q) {
  Rational shifted = q + Rational(1, 2);
  Integer out;
  mpz_fdiv_q(out.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
  return out;
}

struct GramSchmidt {
  std::vector<Rational> b;                 // squared GS norms
  std::vector<std::vector<Rational>> mu;   // mu[i][j], j < i
};

GramSchmidt gram_schmidt(const RationalMatrix& m) {
  const auto n = static_cast<std::size_t>(m.rows());
  GramSchmidt gs{std::vector<Rational>(n), std::vector<std::vector<Rational>>(n, std::vector<Rational>(n))};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      Rational v = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      for (std::size_t k = 0; k < j; ++k) v -= gs.mu[j][k] * gs.mu[i][k] * gs.b[k];
      gs.mu[i][j] = v / gs.b[j];
    }
    Rational v = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    for (std::size_t k = 0; k < i; ++k) v -= gs.mu[i][k] * gs.mu[i][k] * gs.b[k];
    gs.b[i] = v;
  }
  return gs;
}

// row_i -= q * row_j on both U and the Gram matrix M = U G U^T.
void reduce_row(IntMatrix& u, RationalMatrix& m, Eigen::Index i, Eigen::Index j, const Integer& q) {
  u.row(i) -= u.row(j) * q;
  const Eigen::Index n = m.rows();
  Rational qq(q);
  for (Eigen::Index k = 0; k < n; ++k) m(i, k) -= qq * m(j, k);
  for (Eigen::Index k = 0; k < n; ++k) m(k, i) -= qq * m(k, j);
}

void swap_rows(IntMatrix& u, RationalMatrix& m, Eigen::Index i, Eigen::Index j) {
  u.row(i).swap(u.row(j));
  m.row(i).swap(m.row(j));
  m.col(i).swap(m.col(j));
}

}  // namespace

IntMatrix lll_reduce(const RationalMatrix& gram) {
  const Eigen::Index n = gram.rows();
  IntMatrix u = IntMatrix::Identity(n, n);
  RationalMatrix m = gram;
  const Rational delta(3, 4);
  Eigen::Index k = 1;
  while (k < n) {
    GramSchmidt gs = gram_schmidt(m);
    auto ku = static_cast<std::size_t>(k);
    for (Eigen::Index j = k - 1; j >= 0; --j) {
      auto ju = static_cast<std::size_t>(j);
      Integer q = round_nearest(gs.mu[ku][ju]);
      if (q == 0) continue;
      reduce_row(u, m, k, j, q);
      for (std::size_t l = 0; l < ju; ++l) gs.mu[ku][l] -= Rational(q) * gs.mu[ju][l];
      gs.mu[ku][ju] -= Rational(q);
    }
    const Rational& mu = gs.mu[ku][ku - 1];
    if (gs.b[ku] >= (delta - mu * mu) * gs.b[ku - 1]) {
      ++k;
    } else {
      swap_rows(u, m, k, k - 1);
      k = std::max<Eigen::Index>(k - 1, 1);
    }
  }
  return u;
}

namespace {

// q(w) = sum_i d_i (w_i + sum_{j>i} mu_ij w_j)^2.
struct SquareDecomposition {
  std::vector<Rational> d;
  std::vector<std::vector<Rational>> mu;
};

SquareDecomposition complete_squares(const RationalMatrix& g) {
  const auto n = static_cast<std::size_t>(g.rows());
  RationalMatrix a = g;
  SquareDecomposition out{std::vector<Rational>(n), std::vector<std::vector<Rational>>(n, std::vector<Rational>(n))};
  for (std::size_t i = 0; i < n; ++i) {
    auto ii = static_cast<Eigen::Index>(i);
    out.d[i] = a(ii, ii);
    for (std::size_t j = i + 1; j < n; ++j)
      out.mu[i][j] = a(ii, static_cast<Eigen::Index>(j)) / a(ii, ii);
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = i + 1; k < n; ++k) {
        auto jj = static_cast<Eigen::Index>(j), kk = static_cast<Eigen::Index>(k);
        a(jj, kk) -= a(jj, ii) * a(ii, kk) / a(ii, ii);
      }
  }
  return out;
}

Integer floor_q(const Rational& q) {
  Integer out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

void canonical_sign(IntVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) == 0) continue;
    if (v(i) < 0) v = -v;
    return;
  }
}

bool coords_less(const IntVector& a, const IntVector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    int c = cmp(a(i), b(i));
    if (c != 0) return c < 0;
  }
  return false;
}

}  // namespace

std::vector<ShortVector> short_vectors(const EuclideanLattice& lattice, const Rational& bound) {
  std::vector<ShortVector> out;
  const Eigen::Index n = lattice.rank();
  if (bound <= 0 || n == 0) return out;
  IntMatrix u = lll_reduce(lattice.form());
  RationalMatrix reduced = restrict_form(lattice.form(), u);
  SquareDecomposition sq = complete_squares(reduced);
  const auto nu = static_cast<std::size_t>(n);
  std::vector<Integer> w(nu, 0);

  // Integers k with d (k + c)^2 <= r form an interval around -c.
  auto fits = [](const Rational& d, const Rational& c, const Rational& r, const Integer& k) {
    Rational t = Rational(k) + c;
    return d * t * t <= r;
  };

  std::function<void(std::size_t, const Rational&, bool)> descend =
      [&](std::size_t level, const Rational& residual, bool upper_zero) {
        Rational c = 0;
        for (std::size_t j = level + 1; j < nu; ++j)
          if (w[j] != 0) c += sq.mu[level][j] * w[j];
        const Rational& d = sq.d[level];
        Integer mid = round_nearest(-c);
        if (!fits(d, c, residual, mid)) return;
        double radius = std::sqrt(Rational(residual / d).get_d());
        Integer hi = floor_q(-c + Rational(radius)), lo = floor_q(-c - Rational(radius)) + 1;
        if (hi < mid) hi = mid;
        if (lo > mid) lo = mid;
        while (fits(d, c, residual, hi + 1)) ++hi;
        while (!fits(d, c, residual, hi)) --hi;
        while (fits(d, c, residual, lo - 1)) --lo;
        while (!fits(d, c, residual, lo)) ++lo;
        if (upper_zero && lo < 0) lo = 0;
        for (Integer k = lo; k <= hi; ++k) {
          w[level] = k;
          Rational t = Rational(k) + c;
          Rational rest = residual - d * t * t;
          bool still_zero = upper_zero && k == 0;
          if (level == 0) {
            if (still_zero) continue;
            IntVector v = IntVector::Zero(n);
            for (std::size_t i = 0; i < nu; ++i)
              if (w[i] != 0) v += u.row(static_cast<Eigen::Index>(i)).transpose() * w[i];
            canonical_sign(v);
            out.push_back({v, bound - rest});
          } else {
            descend(level - 1, rest, still_zero);
          }
        }
        w[level] = 0;
      };
  descend(nu - 1, bound, true);
  for (auto& sv : out) sv.norm2 = lattice.norm2(sv.coords);
  std::sort(out.begin(), out.end(), [](const ShortVector& a, const ShortVector& b) {
    if (a.norm2 != b.norm2) return a.norm2 < b.norm2;
    return coords_less(a.coords, b.coords);
  });
  return out;
}

MinimaVector successive_minima(const EuclideanLattice& lattice) {
  const Eigen::Index n = lattice.rank();
  if (n == 0) throw InputError("successive minima of a rank-zero lattice");
  IntMatrix u = lll_reduce(lattice.form());
  Rational bound = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Rational b = lattice.norm2(u.row(i).transpose());
    if (b > bound) bound = b;
  }
  MinimaVector out;
  IntMatrix chosen(0, n);
  for (const auto& sv : short_vectors(lattice, bound)) {
    IntMatrix trial(chosen.rows() + 1, n);
    if (chosen.rows() > 0) trial.topRows(chosen.rows()) = chosen;
    trial.row(chosen.rows()) = sv.coords.transpose();
    if (rank(trial) != trial.rows()) continue;
    chosen = trial;
    out.squared.push_back(sv.norm2);
    out.minima.emplace_back(Rational(1, 2), sv.norm2);
    out.vectors.push_back(sv.coords);
    if (chosen.rows() == n) break;
  }
  if (chosen.rows() != n) throw InvariantError("successive minima search incomplete");
  return out;
}

Rational hermite_constant_power(int i) {
  switch (i) {
    case 1: return 1;
    case 2: return Rational(4, 3);
    case 3: return 2;
    case 4: return 4;
    case 5: return 8;
    case 6: return Rational(64, 3);
    case 7: return 64;
    case 8: return 256;
    default: throw InputError("Hermite constant known only up to rank 8");
  }
}

}  // namespace freedom
