#include "freedom/exact.hpp"

#include <utility>

namespace freedom {

Rational parse_rational(const std::string& text) {
  std::string t;
  for (char c : text)
    if (c != ' ' && c != '\t') t.push_back(c);
  if (t.empty()) throw InputError("empty rational");
  if (auto e = t.find_first_of("eE"); e != std::string::npos) {
    std::string ex = t.substr(e + 1);
    if (ex.empty() || ex.size() > 4 || ex.find_first_not_of("0123456789") != std::string::npos)
      throw InputError("malformed rational '" + text + "'");
    Integer p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, std::stoul(ex));
    return parse_rational(t.substr(0, e)) * p;
  }
  Rational q;
  try {
    if (t.front() == '+') t.erase(t.begin());
    if (q.set_str(t, 10) != 0) throw InputError("malformed rational '" + text + "'");
  } catch (const std::invalid_argument&) {
    throw InputError("malformed rational '" + text + "'");
  }
  if (q.get_den() == 0) throw InputError("zero denominator in '" + text + "'");
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

Rational determinant(const RationalMatrix& m) {
  if (m.rows() != m.cols()) throw InputError("determinant of a non-square matrix");
  RationalMatrix a = m;
  const Eigen::Index n = a.rows();
  Rational det = 1;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index p = c;
    while (p < n && a(p, c) == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      a.row(p).swap(a.row(c));
      det = -det;
    }
    det *= a(c, c);
    for (Eigen::Index r = c + 1; r < n; ++r) {
      if (a(r, c) == 0) continue;
      Rational f = a(r, c) / a(c, c);
      for (Eigen::Index k = c; k < n; ++k) a(r, k) -= f * a(c, k);
    }
  }
  return det;
}

Eigen::Index rank(const RationalMatrix& m) {
  RationalMatrix a = m;
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < a.cols() && r < a.rows(); ++c) {
    Eigen::Index p = r;
    while (p < a.rows() && a(p, c) == 0) ++p;
    if (p == a.rows()) continue;
    if (p != r) a.row(p).swap(a.row(r));
    for (Eigen::Index i = r + 1; i < a.rows(); ++i) {
      if (a(i, c) == 0) continue;
      Rational f = a(i, c) / a(r, c);
      for (Eigen::Index k = c; k < a.cols(); ++k) a(i, k) -= f * a(r, k);
    }
    ++r;
  }
  return r;
}

RationalMatrix inverse(const RationalMatrix& m) {
  if (m.rows() != m.cols()) throw InputError("inverse of a non-square matrix");
  const Eigen::Index n = m.rows();
  RationalMatrix a = m;
  RationalMatrix inv = RationalMatrix::Identity(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index p = c;
    while (p < n && a(p, c) == 0) ++p;
    if (p == n) throw InputError("singular matrix");
    if (p != c) {
      a.row(p).swap(a.row(c));
      inv.row(p).swap(inv.row(c));
    }
    Rational piv = a(c, c);
    for (Eigen::Index k = 0; k < n; ++k) {
      a(c, k) /= piv;
      inv(c, k) /= piv;
    }
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == c || a(r, c) == 0) continue;
      Rational f = a(r, c);
      for (Eigen::Index k = 0; k < n; ++k) {
        a(r, k) -= f * a(c, k);
        inv(r, k) -= f * inv(c, k);
      }
    }
  }
  return inv;
}

namespace {

Integer floor_div(const Integer& a, const Integer& b) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

// Row echelon form over Z on the first `pivot_cols` columns using unimodular
// row operations applied to whole rows. Returns the number of pivot rows.
Eigen::Index echelon(IntMatrix& h, Eigen::Index pivot_cols, bool reduce_above,
                     std::vector<Eigen::Index>* pivots = nullptr) {
  const Eigen::Index rows = h.rows();
  const Eigen::Index cols = h.cols();
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < pivot_cols && row < rows; ++col) {
    for (Eigen::Index i = row + 1; i < rows; ++i) {
      if (h(i, col) == 0) continue;
      if (h(row, col) == 0) {
        h.row(i).swap(h.row(row));
        continue;
      }
      Integer a = h(row, col), b = h(i, col), g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a.get_mpz_t(),
                 b.get_mpz_t());
      Integer ag = a / g, bg = b / g;
      for (Eigen::Index k = 0; k < cols; ++k) {
        Integer top = s * h(row, k) + t * h(i, k);
        Integer bottom = ag * h(i, k) - bg * h(row, k);
        h(row, k) = std::move(top);
        h(i, k) = std::move(bottom);
      }
    }
    if (h(row, col) == 0) continue;
    if (h(row, col) < 0)
      for (Eigen::Index k = 0; k < cols; ++k) h(row, k) = -h(row, k);
    if (reduce_above) {
      for (Eigen::Index r = 0; r < row; ++r) {
        if (h(r, col) == 0) continue;
        Integer q = floor_div(h(r, col), h(row, col));
        for (Eigen::Index k = 0; k < cols; ++k) h(r, k) -= q * h(row, k);
      }
    }
    if (pivots) pivots->push_back(col);
    ++row;
  }
  return row;
}

}  // namespace

IntMatrix hermite_normal_form(const IntMatrix& m) {
  IntMatrix h = m;
  Eigen::Index r = echelon(h, h.cols(), true);
  IntMatrix out = h.topRows(r);
  return out;
}

IntMatrix integer_kernel(const IntMatrix& a) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  IntMatrix aug(n, m + n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) aug(i, j) = a(j, i);
    for (Eigen::Index j = 0; j < n; ++j) aug(i, m + j) = (i == j) ? 1 : 0;
  }
  Eigen::Index r = echelon(aug, m, false);
  IntMatrix kernel = aug.block(r, m, n - r, n);
  return hermite_normal_form(kernel);
}

IntMatrix hnf_saturate(const IntMatrix& m) {
  const Eigen::Index n = m.cols();
  if (rank(m) != m.rows()) throw InputError("degenerate generator set");
  if (m.rows() == 0) return IntMatrix(0, n);
  IntMatrix annihilator = integer_kernel(m);
  if (annihilator.rows() == 0) return IntMatrix::Identity(n, n);
  return integer_kernel(annihilator);
}

IntMatrix complete_basis(const IntMatrix& s) {
  const Eigen::Index r = s.rows();
  const Eigen::Index n = s.cols();
  IntMatrix h = s;
  std::vector<Eigen::Index> pivots;
  if (echelon(h, n, true, &pivots) != r) throw InputError("degenerate generator set");
  bool unit_pivots = true;
  for (Eigen::Index i = 0; i < r; ++i)
    if (h(i, pivots[static_cast<std::size_t>(i)]) != 1) unit_pivots = false;
  IntMatrix c(n - r, n);
  if (unit_pivots) {
    Eigen::Index row = 0;
    std::size_t next = 0;
    for (Eigen::Index col = 0; col < n; ++col) {
      if (next < pivots.size() && pivots[next] == col) {
        ++next;
        continue;
      }
      for (Eigen::Index k = 0; k < n; ++k) c(row, k) = (k == col) ? 1 : 0;
      ++row;
    }
    return c;
  }
  // U S^T = [H; 0] with U unimodular; the rows of U^{-T} beyond r complete S.
  IntMatrix aug(n, r + n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < r; ++j) aug(i, j) = s(j, i);
    for (Eigen::Index j = 0; j < n; ++j) aug(i, r + j) = (i == j) ? 1 : 0;
  }
  echelon(aug, r, false);
  RationalMatrix u = to_rational(IntMatrix(aug.rightCols(n)));
  RationalMatrix uinv_t = inverse(u).transpose();
  for (Eigen::Index i = 0; i < n - r; ++i)
    for (Eigen::Index k = 0; k < n; ++k) {
      const Rational& q = uinv_t(r + i, k);
      if (q.get_den() != 1) throw InvariantError("non-integral basis completion");
      c(i, k) = q.get_num();
    }
  // S must generate a saturated module for [S; C] to be unimodular.
  IntMatrix full(n, n);
  full << s, c;
  Rational det = determinant(to_rational(full));
  if (det != 1 && det != -1) throw InputError("quotient has torsion");
  return hermite_normal_form(c);
}

int lex_compare(const IntMatrix& a, const IntMatrix& b) {
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      int c = cmp(a(i, j), b(i, j));
      if (c != 0) return c < 0 ? -1 : 1;
    }
  return 0;
}

SymmetricForm::SymmetricForm(RationalMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) throw InputError("Gram form is not square");
  for (Eigen::Index i = 0; i < entries_.rows(); ++i)
    for (Eigen::Index j = i + 1; j < entries_.cols(); ++j)
      if (entries_(i, j) != entries_(j, i)) throw InputError("Gram form is not symmetric");
}

bool SymmetricForm::is_positive_definite() const {
  // Pivots of symmetric elimination without row swaps are the ratios of
  // consecutive leading principal minors.
  RationalMatrix a = entries_;
  const Eigen::Index n = a.rows();
  for (Eigen::Index c = 0; c < n; ++c) {
    if (a(c, c) <= 0) return false;
    for (Eigen::Index r = c + 1; r < n; ++r) {
      if (a(r, c) == 0) continue;
      Rational f = a(r, c) / a(c, c);
      for (Eigen::Index k = c; k < n; ++k) a(r, k) -= f * a(c, k);
    }
  }
  return true;
}

Rational SymmetricForm::determinant() const { return freedom::determinant(entries_); }

SymmetricForm SymmetricForm::identity(Eigen::Index n) {
  return SymmetricForm(RationalMatrix::Identity(n, n));
}

Rational bilinear(const RationalMatrix& gram, const IntVector& v, const IntVector& w) {
  Rational acc = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) == 0) continue;
    Rational row = 0;
    for (Eigen::Index j = 0; j < w.size(); ++j)
      if (w(j) != 0) row += gram(i, j) * w(j);
    acc += row * v(i);
  }
  return acc;
}

RationalMatrix restrict_form(const RationalMatrix& gram, const IntMatrix& basis) {
  const Eigen::Index r = basis.rows();
  RationalMatrix out(r, r);
  for (Eigen::Index i = 0; i < r; ++i) {
    IntVector bi = basis.row(i).transpose();
    for (Eigen::Index j = i; j < r; ++j) {
      IntVector bj = basis.row(j).transpose();
      out(i, j) = bilinear(gram, bi, bj);
      out(j, i) = out(i, j);
    }
  }
  return out;
}

}  // namespace freedom
