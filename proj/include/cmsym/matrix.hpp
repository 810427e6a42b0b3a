#ifndef CMSYM_MATRIX_HPP
#define CMSYM_MATRIX_HPP

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cmsym/ratfunc.hpp"

namespace cmsym {

// Dense row-major matrix over the rational-function field.
class PolyMatrix {
public:
  PolyMatrix() = default;

  PolyMatrix(const Symbols &syms, std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), syms_(syms),
        entries_(rows * cols, RatFunc::zero(syms)) {}

  PolyMatrix(const Symbols &syms, std::size_t rows, std::size_t cols,
             std::vector<RatFunc> entries)
      : rows_(rows), cols_(cols), syms_(syms), entries_(std::move(entries)) {
    if (entries_.size() != rows * cols)
      throw std::invalid_argument("matrix entry count does not match shape");
    for (const auto &e : entries_)
      require_same(e.symbols(), syms_);
  }

  static PolyMatrix identity(const Symbols &syms, std::size_t n) {
    PolyMatrix m(syms, n, n);
    for (std::size_t i = 0; i < n; ++i)
      m(i, i) = RatFunc::one(syms);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  const Symbols &symbols() const noexcept { return syms_; }
  const std::vector<RatFunc> &entries() const noexcept { return entries_; }

  RatFunc &operator()(std::size_t r, std::size_t c) {
    return entries_[r * cols_ + c];
  }
  const RatFunc &operator()(std::size_t r, std::size_t c) const {
    return entries_[r * cols_ + c];
  }

  friend PolyMatrix operator*(const PolyMatrix &a, const PolyMatrix &b) {
    if (a.cols_ != b.rows_)
      throw std::invalid_argument("matrix product shape mismatch");
    PolyMatrix r(a.syms_, a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < b.cols_; ++j) {
        RatFunc acc = RatFunc::zero(a.syms_);
        for (std::size_t k = 0; k < a.cols_; ++k)
          if (!a(i, k).is_zero() && !b(k, j).is_zero())
            acc += a(i, k) * b(k, j);
        r(i, j) = std::move(acc);
      }
    return r;
  }

  std::vector<RatFunc> apply(const std::vector<RatFunc> &x) const {
    if (x.size() != cols_)
      throw std::invalid_argument("matrix-vector shape mismatch");
    std::vector<RatFunc> y;
    y.reserve(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      RatFunc acc = RatFunc::zero(syms_);
      for (std::size_t k = 0; k < cols_; ++k)
        if (!(*this)(i, k).is_zero() && !x[k].is_zero())
          acc += (*this)(i, k) * x[k];
      y.push_back(std::move(acc));
    }
    return y;
  }

  PolyMatrix rebase(const Symbols &target) const {
    std::vector<RatFunc> e;
    e.reserve(entries_.size());
    for (const auto &x : entries_)
      e.push_back(x.rebase(target));
    return PolyMatrix(target, rows_, cols_, std::move(e));
  }

  PolyMatrix block(const std::vector<std::size_t> &rows,
                   const std::vector<std::size_t> &cols) const {
    PolyMatrix r(syms_, rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j)
        r(i, j) = (*this)(rows[i], cols[j]);
    return r;
  }

private:
  std::size_t rows_ = 0, cols_ = 0;
  Symbols syms_;
  std::vector<RatFunc> entries_;
};

inline bool matrix_eq(const PolyMatrix &a, const PolyMatrix &b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    return false;
  for (std::size_t i = 0; i < a.entries().size(); ++i)
    if (!ratfunc_eq(a.entries()[i], b.entries()[i]))
      return false;
  return true;
}

namespace detail {

using PolyRows = std::vector<std::vector<MultiPoly>>;

// Multiplies each row of [M | rhs] by the product of its distinct
// denominators, producing a polynomial system with the same solutions.
inline PolyRows clear_row_denominators(const PolyMatrix &m,
                                       const std::vector<std::vector<RatFunc>> &rhs) {
  PolyRows out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::vector<const RatFunc *> row;
    for (std::size_t j = 0; j < m.cols(); ++j)
      row.push_back(&m(i, j));
    for (const auto &col : rhs)
      row.push_back(&col[i]);
    std::vector<MultiPoly> dens;
    for (auto *e : row) {
      if (e->den().is_constant())
        continue;
      bool seen = false;
      for (const auto &d : dens)
        seen = seen || d == e->den();
      if (!seen)
        dens.push_back(e->den());
    }
    for (auto *e : row) {
      MultiPoly v = e->num();
      for (const auto &d : dens)
        if (!(d == e->den()))
          v *= d;
      out[i].push_back(std::move(v));
    }
  }
  return out;
}

inline MultiPoly exact_quotient(const MultiPoly &a, const MultiPoly &b) {
  auto q = divide_exact(a, b);
  if (!q)
    throw std::logic_error("fraction-free elimination produced an inexact division");
  return std::move(*q);
}

// Fraction-free row echelon form on the first `pivot_cols` columns; returns
// the rank. Pivots on the first nonzero entry of each column.
inline std::size_t fraction_free_rank(PolyRows a, std::size_t pivot_cols) {
  if (a.empty())
    return 0;
  const std::size_t n = a.size(), w = a[0].size();
  MultiPoly prev = MultiPoly::constant(a[0][0].symbols(), 1);
  std::size_t rank = 0;
  for (std::size_t col = 0; col < pivot_cols && rank < n; ++col) {
    std::size_t p = rank;
    while (p < n && a[p][col].is_zero())
      ++p;
    if (p == n)
      continue;
    std::swap(a[p], a[rank]);
    for (std::size_t i = rank + 1; i < n; ++i) {
      for (std::size_t j = col + 1; j < w; ++j)
        a[i][j] = exact_quotient(a[rank][col] * a[i][j] - a[i][col] * a[rank][j], prev);
      a[i][col] = MultiPoly(a[i][col].symbols());
    }
    prev = a[rank][col];
    ++rank;
  }
  return rank;
}

// Solves M X = R for several right-hand sides at once. Fraction-free
// Gauss-Jordan reduces [P | Q] to [det*I | det*X].
inline std::vector<std::vector<RatFunc>>
solve_columns(const PolyMatrix &m, const std::vector<std::vector<RatFunc>> &rhs) {
  if (!m.is_square())
    throw std::invalid_argument("linear solve requires a square matrix");
  const std::size_t n = m.rows();
  for (const auto &col : rhs)
    if (col.size() != n)
      throw std::invalid_argument("right-hand side length mismatch");
  const Symbols &syms = m.symbols();
  if (n == 0)
    return std::vector<std::vector<RatFunc>>(rhs.size());
  PolyRows a = clear_row_denominators(m, rhs);
  const std::size_t w = n + rhs.size();
  MultiPoly prev = MultiPoly::constant(syms, 1);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && a[p][k].is_zero())
      ++p;
    if (p == n) {
      auto rm = fraction_free_rank(clear_row_denominators(m, {}), n);
      auto ra = fraction_free_rank(clear_row_denominators(m, rhs), n + rhs.size());
      if (ra > rm)
        throw SingularMatrixError("inconsistent linear system",
                                  SingularMatrixError::Kind::inconsistent);
      throw SingularMatrixError("matrix is singular over the rational-function field");
    }
    std::swap(a[p], a[k]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k)
        continue;
      for (std::size_t j = 0; j < w; ++j) {
        if (j == k)
          continue;
        if (a[i][k].is_zero())
          a[i][j] = exact_quotient(a[k][k] * a[i][j], prev);
        else
          a[i][j] = exact_quotient(a[k][k] * a[i][j] - a[i][k] * a[k][j], prev);
      }
      a[i][k] = MultiPoly(syms);
    }
    prev = a[k][k];
  }
  std::vector<std::vector<RatFunc>> x(rhs.size());
  for (std::size_t c = 0; c < rhs.size(); ++c)
    for (std::size_t i = 0; i < n; ++i)
      x[c].push_back(RatFunc(a[i][n + c], prev));
  return x;
}

} // namespace detail

// Exact solution of M x = b over the rational-function field.
inline std::vector<RatFunc> solve_linear(const PolyMatrix &m,
                                         const std::vector<RatFunc> &b) {
  return detail::solve_columns(m, {b}).front();
}

inline PolyMatrix matrix_inverse(const PolyMatrix &t) {
  if (!t.is_square())
    throw std::invalid_argument("inverse requires a square matrix");
  const std::size_t n = t.rows();
  std::vector<std::vector<RatFunc>> cols(n, std::vector<RatFunc>(n, RatFunc::zero(t.symbols())));
  for (std::size_t j = 0; j < n; ++j)
    cols[j][j] = RatFunc::one(t.symbols());
  auto x = detail::solve_columns(t, cols);
  PolyMatrix inv(t.symbols(), n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      inv(i, j) = std::move(x[j][i]);
  return inv;
}

// Determinant via fraction-free elimination of the row-cleared matrix.
inline RatFunc determinant(const PolyMatrix &t) {
  if (!t.is_square())
    throw std::invalid_argument("determinant requires a square matrix");
  const Symbols &syms = t.symbols();
  const std::size_t n = t.rows();
  if (n == 0)
    return RatFunc::one(syms);
  // Row i was scaled by the product of its distinct denominators.
  MultiPoly scale = MultiPoly::constant(syms, 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<MultiPoly> dens;
    for (std::size_t j = 0; j < n; ++j) {
      const auto &d = t(i, j).den();
      if (d.is_constant())
        continue;
      bool seen = false;
      for (const auto &e : dens)
        seen = seen || e == d;
      if (!seen)
        dens.push_back(d);
    }
    for (const auto &d : dens)
      scale *= d;
  }
  auto a = detail::clear_row_denominators(t, {});
  MultiPoly prev = MultiPoly::constant(syms, 1);
  bool negate = false;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && a[p][k].is_zero())
      ++p;
    if (p == n)
      return RatFunc::zero(syms);
    if (p != k) {
      std::swap(a[p], a[k]);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j)
        a[i][j] = detail::exact_quotient(a[k][k] * a[i][j] - a[i][k] * a[k][j], prev);
      a[i][k] = MultiPoly(syms);
    }
    prev = a[k][k];
  }
  return RatFunc(negate ? -prev : prev, scale);
}

} // namespace cmsym

#endif
