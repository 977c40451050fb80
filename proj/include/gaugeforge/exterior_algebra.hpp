#pragma once

// Associated spaces, simplicity, minor maps and the oriented Grassmannian.

#include <cmath>
#include <optional>
#include <vector>

#include "gaugeforge/kvector.hpp"
#include "gaugeforge/linalg.hpp"

namespace gaugeforge {

inline constexpr double kUnitTolerance = 1e-12;
inline constexpr double kRankTolerance = 1e-9;

template <class S>
using LinearMap = Matrix<S>;

/// Matrix of v -> v ^ a: column i holds the coordinates of e_i ^ a.
template <class S>
Matrix<S> wedge_operator(const KVector<S>& a) {
  int n = a.n();
  int rows = a.k() + 1 <= n ? static_cast<int>(binomial(n, a.k() + 1)) : 0;
  Matrix<S> m(rows, n);
  if (rows == 0) return m;
  for (int i = 0; i < n; ++i) {
    auto e = KVector<S>::basis(n, {i + 1});
    auto w = wedge(e, a);
    for (int r = 0; r < rows; ++r) m(r, i) = w[r];
  }
  return m;
}

/// Basis of asssp a = {v : v ^ a = 0}, exact.
inline std::vector<std::vector<Rational>> associated_space(const KVectorQ& a) {
  if (a.is_zero()) throw ArgumentError("associated space of the zero k-vector");
  return nullspace(wedge_operator(a));
}

/// Basis of asssp a decided by singular values <= rank_tol * |a|.
inline std::vector<std::vector<double>> associated_space(const KVectorD& a,
                                                         double rank_tol = kRankTolerance) {
  double scale = norm(a);
  if (scale == 0.0) throw ArgumentError("associated space of the zero k-vector");
  return numerical_nullspace(wedge_operator(a), rank_tol * scale);
}

inline bool is_simple(const KVectorQ& a) {
  return static_cast<int>(associated_space(a).size()) == a.k();
}

inline bool is_simple(const KVectorD& a, double rank_tol = kRankTolerance) {
  return static_cast<int>(associated_space(a, rank_tol).size()) == a.k();
}

/// M(f)(lambda) = det of the k x k submatrix of f on rows lambda.
template <class S>
KVector<S> minors(const LinearMap<S>& f) {
  int n = f.rows(), k = f.cols();
  if (k > n) throw ArgumentError("minor map needs an n x k matrix with k <= n");
  KVector<S> out(n, k);
  const auto& masks = basis_masks(n, k);
  for (std::size_t r = 0; r < masks.size(); ++r) {
    Matrix<S> sub(k, k);
    int row = 0;
    for (int i = 0; i < n; ++i) {
      if (!(masks[r] >> i & 1u)) continue;
      for (int j = 0; j < k; ++j) sub(row, j) = f(i, j);
      ++row;
    }
    out[r] = determinant(sub);
  }
  return out;
}

/// The k-th exterior power of f : R^n -> R^m applied to a in /\_k R^n.
template <class S>
KVector<S> induced_map(const LinearMap<S>& f, const KVector<S>& a) {
  if (f.cols() != a.n()) throw ArgumentError("linear map domain does not match k-vector");
  int m = f.rows(), n = a.n(), k = a.k();
  if (k > m) throw ArgumentError("degree exceeds target dimension");
  KVector<S> out(m, k);
  const auto& src = basis_masks(n, k);
  const auto& dst = basis_masks(m, k);
  for (std::size_t s = 0; s < src.size(); ++s) {
    if (ScalarTraits<S>::is_zero(a[s])) continue;
    for (std::size_t d = 0; d < dst.size(); ++d) {
      Matrix<S> sub(k, k);
      int ri = 0;
      for (int i = 0; i < m; ++i) {
        if (!(dst[d] >> i & 1u)) continue;
        int cj = 0;
        for (int j = 0; j < n; ++j) {
          if (!(src[s] >> j & 1u)) continue;
          sub(ri, cj++) = f(i, j);
        }
        ++ri;
      }
      out[d] += determinant(sub) * a[s];
    }
  }
  return out;
}

/// A unit simple k-vector: a point of the oriented Grassmannian G(n, k).
/// Optionally remembers an exact rational orthonormal-or-spanning frame.
class GrassmannPoint {
 public:
  GrassmannPoint() = default;

  explicit GrassmannPoint(KVectorD vec, double unit_tol = kUnitTolerance,
                          double rank_tol = kRankTolerance)
      : vec_(std::move(vec)) {
    double len = norm(vec_);
    if (std::fabs(len - 1.0) > unit_tol)
      throw ArgumentError("Grassmannian point must have unit length (|xi| = " +
                          format_double(len) + ")");
    if (!is_simple(vec_, rank_tol)) throw ArgumentError("Grassmannian point must be simple");
  }

  /// Normalizes a nonzero simple k-vector.
  static GrassmannPoint normalized(KVectorD v, double rank_tol = kRankTolerance) {
    double len = norm(v);
    if (len == 0.0) throw ArgumentError("cannot normalize the zero k-vector");
    v *= 1.0 / len;
    return GrassmannPoint(std::move(v), 1e-9, rank_tol);
  }

  /// v_1 ^ ... ^ v_k / |v_1 ^ ... ^ v_k|.
  static GrassmannPoint from_frame(int n, const std::vector<std::vector<double>>& frame) {
    return normalized(wedge_all<double>(n, frame));
  }

  static GrassmannPoint from_exact(const KVectorQ& unit, std::vector<std::vector<Rational>> frame = {}) {
    GrassmannPoint p(to_double(unit), 1e-9);
    p.exact_ = unit;
    if (!frame.empty()) p.frame_ = std::move(frame);
    return p;
  }

  const KVectorD& vec() const { return vec_; }
  int n() const { return vec_.n(); }
  int k() const { return vec_.k(); }
  const std::optional<KVectorQ>& exact() const { return exact_; }
  const std::optional<std::vector<std::vector<Rational>>>& frame() const { return frame_; }

  GrassmannPoint operator-() const {
    GrassmannPoint p = *this;
    p.vec_ = -p.vec_;
    if (p.exact_) p.exact_ = -*p.exact_;
    if (p.frame_ && !p.frame_->empty())
      for (auto& x : p.frame_->front()) x = -x;
    return p;
  }

 private:
  KVectorD vec_;
  std::optional<KVectorQ> exact_;
  std::optional<std::vector<std::vector<Rational>>> frame_;
};

/// Orthonormal frame v_1..v_k of a Grassmannian point, oriented so that
/// v_1 ^ ... ^ v_k = xi (up to rounding).
inline std::vector<std::vector<double>> orthonormal_frame(const GrassmannPoint& xi) {
  int n = xi.n(), k = xi.k();
  if (k == 0) return {};
  auto basis = associated_space(xi.vec());
  if (static_cast<int>(basis.size()) != k) throw DegeneracyError("point is not simple");
  auto frame = orthonormalize(basis);
  if (inner(wedge_all<double>(n, frame), xi.vec()) < 0)
    for (auto& x : frame[0]) x = -x;
  return frame;
}

}  // namespace gaugeforge
