#pragma once

// Small dense matrices. Exact elimination over rationals, plus a few
// floating helpers backed by Eigen (SVD rank, thin QR).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "gaugeforge/scalar.hpp"

namespace gaugeforge {

/// Row-major dense matrix. For a linear map R^cols -> R^rows, column j is
/// the image of the j-th standard basis vector.
template <class S>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(std::size_t(rows) * cols, S(0)) {
    if (rows < 0 || cols < 0) throw ArgumentError("negative matrix shape");
  }
  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }
  /// Matrix whose rows are the given vectors.
  static Matrix from_rows(const std::vector<std::vector<S>>& rows, int cols = -1) {
    int r = static_cast<int>(rows.size());
    int c = cols >= 0 ? cols : (r ? static_cast<int>(rows[0].size()) : 0);
    Matrix m(r, c);
    for (int i = 0; i < r; ++i) {
      if (static_cast<int>(rows[i].size()) != c) throw ArgumentError("ragged matrix rows");
      for (int j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }
  /// Matrix whose columns are the given vectors.
  static Matrix from_columns(const std::vector<std::vector<S>>& cols, int rows = -1) {
    return from_rows(cols, rows).transposed();
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  S& operator()(int i, int j) { return data_[std::size_t(i) * cols_ + j]; }
  const S& operator()(int i, int j) const { return data_[std::size_t(i) * cols_ + j]; }

  std::vector<S> row(int i) const {
    return std::vector<S>(data_.begin() + std::size_t(i) * cols_,
                          data_.begin() + std::size_t(i + 1) * cols_);
  }
  std::vector<S> column(int j) const {
    std::vector<S> c(rows_);
    for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw ArgumentError("matrix product shape mismatch");
    Matrix c(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int l = 0; l < a.cols_; ++l) {
        if (ScalarTraits<S>::is_zero(a(i, l))) continue;
        for (int j = 0; j < b.cols_; ++j) c(i, j) += a(i, l) * b(l, j);
      }
    return c;
  }

  std::vector<S> apply(const std::vector<S>& v) const {
    if (static_cast<int>(v.size()) != cols_) throw ArgumentError("matrix-vector shape mismatch");
    std::vector<S> out(rows_, S(0));
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<S> data_;
};

using MatrixQ = Matrix<Rational>;
using MatrixD = Matrix<double>;

inline MatrixD to_double(const MatrixQ& m) {
  MatrixD d(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) d(i, j) = m(i, j).get_d();
  return d;
}

/// Reduced row echelon form in place (exact). Returns the pivot columns.
inline std::vector<int> rref(MatrixQ& m) {
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < m.cols() && r < m.rows(); ++c) {
    int p = -1;
    for (int i = r; i < m.rows(); ++i)
      if (sgn(m(i, c)) != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    if (p != r)
      for (int j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    Rational inv = 1 / m(r, c);
    for (int j = c; j < m.cols(); ++j) m(r, j) *= inv;
    for (int i = 0; i < m.rows(); ++i) {
      if (i == r || sgn(m(i, c)) == 0) continue;
      Rational f = m(i, c);
      for (int j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline int rank(MatrixQ m) { return static_cast<int>(rref(m).size()); }

/// Basis of {x : m x = 0}, one vector per free column (exact).
inline std::vector<std::vector<Rational>> nullspace(MatrixQ m) {
  auto pivots = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (int p : pivots) is_pivot[p] = true;
  std::vector<std::vector<Rational>> basis;
  for (int f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> v(m.cols(), Rational(0));
    v[f] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m(static_cast<int>(r), f);
    basis.push_back(std::move(v));
  }
  return basis;
}

template <class S>
S determinant(Matrix<S> m) {
  if (m.rows() != m.cols()) throw ArgumentError("determinant of a non-square matrix");
  int n = m.rows();
  S det(1);
  for (int c = 0; c < n; ++c) {
    int p = -1;
    if constexpr (ScalarTraits<S>::exact) {
      for (int i = c; i < n; ++i)
        if (!ScalarTraits<S>::is_zero(m(i, c))) {
          p = i;
          break;
        }
    } else {
      double best = 0.0;
      for (int i = c; i < n; ++i)
        if (std::fabs(m(i, c)) > best) {
          best = std::fabs(m(i, c));
          p = i;
        }
    }
    if (p < 0 || ScalarTraits<S>::is_zero(m(p, c))) return S(0);
    if (p != c) {
      for (int j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
      det = -det;
    }
    det *= m(c, c);
    for (int i = c + 1; i < n; ++i) {
      if (ScalarTraits<S>::is_zero(m(i, c))) continue;
      S f = m(i, c) / m(c, c);
      for (int j = c; j < n; ++j) m(i, j) -= f * m(c, j);
    }
  }
  return det;
}

template <class S>
S dot(const std::vector<S>& a, const std::vector<S>& b) {
  if (a.size() != b.size()) throw ArgumentError("dot product length mismatch");
  S s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Eigen::MatrixXd to_eigen(const MatrixD& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

/// Right singular vectors of `m` with singular value <= threshold.
inline std::vector<std::vector<double>> numerical_nullspace(const MatrixD& m, double threshold) {
  int cols = m.cols();
  if (m.rows() == 0) {
    std::vector<std::vector<double>> basis;
    for (int j = 0; j < cols; ++j) {
      std::vector<double> e(cols, 0.0);
      e[j] = 1.0;
      basis.push_back(e);
    }
    return basis;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const auto& v = svd.matrixV();
  std::vector<std::vector<double>> basis;
  for (int j = 0; j < cols; ++j) {
    double s = j < sv.size() ? sv(j) : 0.0;
    if (s <= threshold) {
      std::vector<double> col(cols);
      for (int i = 0; i < cols; ++i) col[i] = v(i, j);
      basis.push_back(std::move(col));
    }
  }
  return basis;
}

/// Orthonormal basis of the span of `vectors` (thin Householder QR).
inline std::vector<std::vector<double>> orthonormalize(const std::vector<std::vector<double>>& vectors) {
  if (vectors.empty()) return {};
  int n = static_cast<int>(vectors[0].size());
  int k = static_cast<int>(vectors.size());
  Eigen::MatrixXd a(n, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = vectors[j][i];
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
  std::vector<std::vector<double>> out(k, std::vector<double>(n));
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) out[j][i] = q(i, j);
  return out;
}

}  // namespace gaugeforge
