#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "idemsum/poly.hpp"

namespace idemsum {

// Exact dense matrix over a FieldCtx, row-major. Sizes in this project stay
// small (at most a couple hundred), so no sparse storage.
class Mat {
 public:
  Mat(FieldPtr f, int rows, int cols)
      : F_(std::move(f)), rows_(rows), cols_(cols),
        e_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0) {
    require(rows >= 0 && cols >= 0, Errc::ShapeMismatch, "negative dimensions");
  }

  static Mat zero(FieldPtr f, int rows, int cols) { return Mat(std::move(f), rows, cols); }

  static Mat identity(FieldPtr f, int n) {
    Mat m(std::move(f), n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  static Mat scalar(FieldPtr f, int n, elem c) {
    Mat m(std::move(f), n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = c;
    return m;
  }

  static Mat diag(FieldPtr f, const std::vector<elem> &d) {
    Mat m(f, static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) m.at(static_cast<int>(i), static_cast<int>(i)) = d[i];
    return m;
  }

  static Mat from_rows(FieldPtr f, const std::vector<std::vector<elem>> &rows) {
    int r = static_cast<int>(rows.size());
    int c = r ? static_cast<int>(rows[0].size()) : 0;
    Mat m(std::move(f), r, c);
    for (int i = 0; i < r; ++i) {
      require(static_cast<int>(rows[static_cast<std::size_t>(i)].size()) == c,
              Errc::ShapeMismatch, "ragged rows");
      for (int j = 0; j < c; ++j) m.at(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return m;
  }

  // H_{n,p}: single 1 on the first row and last (p-th) column.
  static Mat h_block(FieldPtr f, int n, int p) {
    Mat m(std::move(f), n, p);
    if (n > 0 && p > 0) m.at(0, p - 1) = 1;
    return m;
  }

  // F_k = D(0,...,0,1).
  static Mat f_block(FieldPtr f, int k) {
    Mat m(std::move(f), k, k);
    if (k > 0) m.at(k - 1, k - 1) = 1;
    return m;
  }

  // Companion matrix of a monic P = X^n - sum a_k X^k: unit subdiagonal,
  // last column (a_0, ..., a_{n-1}).
  static Mat companion(const Poly &P) {
    require(P.is_monic() && P.degree() >= 1, Errc::NotMonic,
            "companion requires a monic nonconstant polynomial");
    int n = P.degree();
    Mat m(P.field(), n, n);
    const FieldPtr &F = P.field();
    for (int i = 1; i < n; ++i) m.at(i, i - 1) = 1;
    for (int i = 0; i < n; ++i) m.at(i, n - 1) = F->neg(P.coeff(i));
    return m;
  }

  static Mat block_diag(const std::vector<Mat> &blocks) {
    require(!blocks.empty(), Errc::EmptyBlockList, "block-diagonal of nothing");
    int r = 0, c = 0;
    for (const auto &b : blocks) {
      require_same_field(blocks[0].F_, b.F_);
      r += b.rows_;
      c += b.cols_;
    }
    Mat m(blocks[0].F_, r, c);
    int ro = 0, co = 0;
    for (const auto &b : blocks) {
      m.set_block(ro, co, b);
      ro += b.rows_;
      co += b.cols_;
    }
    return m;
  }

  const FieldPtr &field() const { return F_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  elem &at(int i, int j) { return e_[static_cast<std::size_t>(i) * cols_ + j]; }
  elem at(int i, int j) const { return e_[static_cast<std::size_t>(i) * cols_ + j]; }
  const std::vector<elem> &entries() const { return e_; }

  bool operator==(const Mat &o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_;
  }
  bool operator!=(const Mat &o) const { return !(*this == o); }

  bool is_zero() const {
    return std::all_of(e_.begin(), e_.end(), [](elem v) { return v == 0; });
  }

  Mat operator+(const Mat &o) const {
    check_same_shape(o);
    Mat r(F_, rows_, cols_);
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = F_->add(e_[i], o.e_[i]);
    return r;
  }
  Mat operator-(const Mat &o) const {
    check_same_shape(o);
    Mat r(F_, rows_, cols_);
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = F_->sub(e_[i], o.e_[i]);
    return r;
  }
  Mat operator-() const {
    Mat r(F_, rows_, cols_);
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = F_->neg(e_[i]);
    return r;
  }
  Mat operator*(const Mat &o) const {
    require_same_field(F_, o.F_);
    require(cols_ == o.rows_, Errc::ShapeMismatch,
            "product shape mismatch: " + shape_str() + " * " + o.shape_str());
    Mat r(F_, rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        elem a = at(i, k);
        if (a == 0) continue;
        for (int j = 0; j < o.cols_; ++j) {
          elem b = o.at(k, j);
          if (b != 0) r.at(i, j) = F_->add(r.at(i, j), F_->mul(a, b));
        }
      }
    return r;
  }
  Mat scaled(elem s) const {
    Mat r(F_, rows_, cols_);
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = F_->mul(e_[i], s);
    return r;
  }
  Mat transpose() const {
    Mat r(F_, cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
  }

  elem trace() const {
    require(is_square(), Errc::NotSquare, "trace of a non-square matrix");
    elem t = 0;
    for (int i = 0; i < rows_; ++i) t = F_->add(t, at(i, i));
    return t;
  }

  Mat submatrix(int r0, int c0, int r, int c) const {
    Mat m(F_, r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m.at(i, j) = at(r0 + i, c0 + j);
    return m;
  }

  void set_block(int r0, int c0, const Mat &b) {
    for (int i = 0; i < b.rows_; ++i)
      for (int j = 0; j < b.cols_; ++j) at(r0 + i, c0 + j) = b.at(i, j);
  }

  Mat column(int j) const { return submatrix(0, j, rows_, 1); }

  bool is_idempotent() const {
    require(is_square(), Errc::NotSquare, "idempotency of a non-square matrix");
    return (*this) * (*this) == *this;
  }

  // Unit subdiagonal, zeros below it, arbitrary entries on/above the
  // diagonal. Always nonderogatory. A 1x1 matrix is vacuously good cyclic.
  bool is_good_cyclic() const {
    if (!is_square()) fail(Errc::NotSquare, "good-cyclic test on a non-square matrix");
    for (int i = 1; i < rows_; ++i) {
      if (at(i, i - 1) != 1) return false;
      for (int j = 0; j < i - 1; ++j)
        if (at(i, j) != 0) return false;
    }
    return true;
  }

  std::string shape_str() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
  }

  std::string str() const {
    std::string s;
    for (int i = 0; i < rows_; ++i) {
      s += "[";
      for (int j = 0; j < cols_; ++j) {
        if (j) s += " ";
        s += std::to_string(at(i, j));
      }
      s += "]\n";
    }
    return s;
  }

 private:
  void check_same_shape(const Mat &o) const {
    require_same_field(F_, o.F_);
    require(rows_ == o.rows_ && cols_ == o.cols_, Errc::ShapeMismatch,
            "shape mismatch: " + shape_str() + " vs " + o.shape_str());
  }

  FieldPtr F_;
  int rows_, cols_;
  std::vector<elem> e_;
};

struct Elimination {
  Mat rref;
  int rank = 0;
  std::vector<Mat> kernel_basis;  // column vectors spanning {x : Ax = 0}
  Mat transform;                  // invertible, transform * A = rref
  std::vector<int> pivot_cols;
};

// Gauss-Jordan elimination with a tracked row transform.
inline Elimination eliminate(const Mat &A) {
  const FieldPtr &F = A.field();
  Mat R = A;
  Mat T = Mat::identity(F, A.rows());
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < A.cols() && row < A.rows(); ++col) {
    int p = -1;
    for (int i = row; i < A.rows(); ++i)
      if (R.at(i, col) != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    if (p != row) {
      for (int j = 0; j < A.cols(); ++j) std::swap(R.at(p, j), R.at(row, j));
      for (int j = 0; j < A.rows(); ++j) std::swap(T.at(p, j), T.at(row, j));
    }
    elem inv = F->inv(R.at(row, col));
    if (inv != 1) {
      for (int j = 0; j < A.cols(); ++j) R.at(row, j) = F->mul(R.at(row, j), inv);
      for (int j = 0; j < A.rows(); ++j) T.at(row, j) = F->mul(T.at(row, j), inv);
    }
    for (int i = 0; i < A.rows(); ++i) {
      if (i == row) continue;
      elem f = R.at(i, col);
      if (f == 0) continue;
      for (int j = 0; j < A.cols(); ++j)
        R.at(i, j) = F->sub(R.at(i, j), F->mul(f, R.at(row, j)));
      for (int j = 0; j < A.rows(); ++j)
        T.at(i, j) = F->sub(T.at(i, j), F->mul(f, T.at(row, j)));
    }
    pivots.push_back(col);
    ++row;
  }
  Elimination out{std::move(R), row, {}, std::move(T), pivots};
  // kernel basis from the free columns
  std::vector<char> is_pivot(static_cast<std::size_t>(A.cols()), 0);
  for (int c : pivots) is_pivot[static_cast<std::size_t>(c)] = 1;
  for (int free_col = 0; free_col < A.cols(); ++free_col) {
    if (is_pivot[static_cast<std::size_t>(free_col)]) continue;
    Mat v(F, A.cols(), 1);
    v.at(free_col, 0) = 1;
    for (int r = 0; r < out.rank; ++r)
      v.at(pivots[static_cast<std::size_t>(r)], 0) = F->neg(out.rref.at(r, free_col));
    out.kernel_basis.push_back(std::move(v));
  }
  return out;
}

inline int rank(const Mat &A) { return eliminate(A).rank; }

// Solve A x = b; returns the particular solution with free variables zero,
// or nothing when inconsistent.
inline std::optional<Mat> solve(const Mat &A, const Mat &b) {
  require(A.rows() == b.rows() && b.cols() == 1, Errc::ShapeMismatch, "solve shape");
  const FieldPtr &F = A.field();
  Elimination e = eliminate(A);
  Mat tb = e.transform * b;
  for (int i = e.rank; i < A.rows(); ++i)
    if (tb.at(i, 0) != 0) return std::nullopt;
  Mat x(F, A.cols(), 1);
  for (int r = 0; r < e.rank; ++r) x.at(e.pivot_cols[static_cast<std::size_t>(r)], 0) = tb.at(r, 0);
  return x;
}

inline Mat inverse(const Mat &A) {
  require(A.is_square(), Errc::NotSquare, "inverse of a non-square matrix");
  Elimination e = eliminate(A);
  require(e.rank == A.rows(), Errc::ShapeMismatch, "matrix is singular");
  return e.transform;
}

// Characteristic polynomial of a unit-subdiagonal Hessenberg matrix via the
// leading-principal recursion
//   chi_k = (X - a_{k,k}) chi_{k-1} - sum_{i<k} a_{i,k} chi_{i-1},
// returning the full ladder chi_0..chi_n for reuse by the cyclicfit solver.
inline std::pair<Poly, std::vector<Poly>> hessenberg_charpoly(const Mat &A) {
  require(A.is_square(), Errc::NotSquare, "hessenberg_charpoly of non-square");
  const FieldPtr &F = A.field();
  int n = A.rows();
  for (int i = 1; i < n; ++i) {
    if (A.at(i, i - 1) != 1)
      fail(Errc::NotUnitSubdiagonalHessenberg,
           "subdiagonal entry at row " + std::to_string(i + 1) + " is not 1");
    for (int j = 0; j < i - 1; ++j)
      if (A.at(i, j) != 0)
        fail(Errc::NotUnitSubdiagonalHessenberg,
             "nonzero entry below the subdiagonal at (" + std::to_string(i + 1) + "," +
                 std::to_string(j + 1) + ")");
  }
  std::vector<Poly> ladder;
  ladder.reserve(static_cast<std::size_t>(n) + 1);
  ladder.push_back(Poly::one(F));
  for (int k = 1; k <= n; ++k) {
    Poly chi = (Poly::x(F) - Poly::constant(F, A.at(k - 1, k - 1))) * ladder[static_cast<std::size_t>(k - 1)];
    for (int i = 1; i < k; ++i) {
      elem a = A.at(i - 1, k - 1);
      if (a != 0)
        chi = chi - ladder[static_cast<std::size_t>(i - 1)].scaled(a);
    }
    ladder.push_back(std::move(chi));
  }
  return {ladder.back(), ladder};
}

// Horner evaluation of a polynomial at a square matrix.
inline Mat poly_eval(const Poly &f, const Mat &A) {
  require(A.is_square(), Errc::NotSquare, "polynomial of a non-square matrix");
  const FieldPtr &F = A.field();
  int n = A.rows();
  Mat r = Mat::zero(F, n, n);
  for (int i = f.degree(); i >= 0; --i) {
    r = r * A;
    elem c = f.coeff(i);
    if (c != 0) r = r + Mat::scalar(F, n, c);
  }
  return r;
}

// Apply f(A) to a single column vector (cheaper than forming f(A)).
inline Mat poly_apply(const Poly &f, const Mat &A, const Mat &v) {
  const FieldPtr &F = A.field();
  Mat r = Mat::zero(F, v.rows(), 1);
  for (int i = f.degree(); i >= 0; --i) {
    r = A * r;
    elem c = f.coeff(i);
    if (c != 0) r = r + v.scaled(c);
  }
  return r;
}

}  // namespace idemsum
