#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "gaugeforge/multi_index.hpp"
#include "gaugeforge/scalar.hpp"

namespace gaugeforge {

/// A k-vector in the k-th exterior power of R^n, stored densely in the
/// coordinates N(xi)(lambda) = xi . u_lambda over Lambda(n, k) in
/// lexicographic order.
template <class S>
class KVector {
 public:
  using Scalar = S;

  KVector() = default;
  KVector(int n, int k) : n_(n), k_(k) {
    check_degree(n, k);
    coords_.assign(static_cast<std::size_t>(binomial(n, k)), S(0));
  }
  KVector(int n, int k, std::vector<S> coords) : n_(n), k_(k), coords_(std::move(coords)) {
    check_degree(n, k);
    if (coords_.size() != static_cast<std::size_t>(binomial(n, k)))
      throw ArgumentError("coordinate count does not match binomial(n, k)");
  }

  static KVector basis(const MultiIndex& idx) {
    KVector v(idx.n(), idx.k());
    v.coords_[index_rank(idx.n(), idx.mask())] = S(1);
    return v;
  }
  static KVector basis(int n, const std::vector<int>& entries) {
    return basis(MultiIndex::from_entries(n, entries));
  }
  /// The 1-vector with the given coordinates.
  static KVector vector(std::vector<S> coords) {
    int n = static_cast<int>(coords.size());
    return KVector(n, 1, std::move(coords));
  }
  static KVector scalar(int n, S value) { return KVector(n, 0, {std::move(value)}); }

  int n() const { return n_; }
  int k() const { return k_; }
  std::size_t size() const { return coords_.size(); }
  const std::vector<S>& coords() const { return coords_; }
  std::vector<S>& coords() { return coords_; }

  const S& operator[](std::size_t i) const { return coords_[i]; }
  S& operator[](std::size_t i) { return coords_[i]; }
  const S& at(const MultiIndex& idx) const { return coords_.at(rank_of(idx)); }
  S& at(const MultiIndex& idx) { return coords_.at(rank_of(idx)); }

  MultiIndex index(std::size_t i) const { return MultiIndex(n_, basis_masks(n_, k_)[i]); }

  bool is_zero() const {
    for (const auto& c : coords_)
      if (!ScalarTraits<S>::is_zero(c)) return false;
    return true;
  }

  KVector& operator+=(const KVector& o) {
    check_same(o);
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += o.coords_[i];
    return *this;
  }
  KVector& operator-=(const KVector& o) {
    check_same(o);
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= o.coords_[i];
    return *this;
  }
  KVector& operator*=(const S& s) {
    for (auto& c : coords_) c *= s;
    return *this;
  }

  friend KVector operator+(KVector a, const KVector& b) { return a += b; }
  friend KVector operator-(KVector a, const KVector& b) { return a -= b; }
  friend KVector operator*(const S& s, KVector a) { return a *= s; }
  friend KVector operator*(KVector a, const S& s) { return a *= s; }
  friend KVector operator-(KVector a) {
    for (auto& c : a.coords_) c = -c;
    return a;
  }
  friend bool operator==(const KVector& a, const KVector& b) {
    return a.n_ == b.n_ && a.k_ == b.k_ && a.coords_ == b.coords_;
  }

  void check_same(const KVector& o) const {
    if (n_ != o.n_ || k_ != o.k_)
      throw ArgumentError("k-vectors of different (n, k): (" + std::to_string(n_) + "," +
                          std::to_string(k_) + ") vs (" + std::to_string(o.n_) + "," +
                          std::to_string(o.k_) + ")");
  }

 private:
  std::size_t rank_of(const MultiIndex& idx) const {
    if (idx.n() != n_ || idx.k() != k_) throw ArgumentError("multi-index does not match k-vector");
    return static_cast<std::size_t>(index_rank(n_, idx.mask()));
  }

  int n_ = 0;
  int k_ = 0;
  std::vector<S> coords_;
};

using KVectorQ = KVector<Rational>;
using KVectorD = KVector<double>;

template <class S>
KVector<S> wedge(const KVector<S>& a, const KVector<S>& b) {
  if (a.n() != b.n()) throw ArgumentError("wedge of k-vectors in different ambient spaces");
  int n = a.n();
  if (a.k() + b.k() > n) throw ArgumentError("wedge degree exceeds ambient dimension");
  KVector<S> out(n, a.k() + b.k());
  const auto& am = basis_masks(n, a.k());
  const auto& bm = basis_masks(n, b.k());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (ScalarTraits<S>::is_zero(a[i])) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (am[i] & bm[j]) continue;
      if (ScalarTraits<S>::is_zero(b[j])) continue;
      auto r = static_cast<std::size_t>(index_rank(n, am[i] | bm[j]));
      if (merge_sign(am[i], bm[j]) > 0)
        out[r] += a[i] * b[j];
      else
        out[r] -= a[i] * b[j];
    }
  }
  return out;
}

/// v_1 ^ ... ^ v_m of 1-vectors given as coordinate lists.
template <class S>
KVector<S> wedge_all(int n, const std::vector<std::vector<S>>& vs) {
  KVector<S> acc = KVector<S>::scalar(n, S(1));
  for (const auto& v : vs) {
    if (static_cast<int>(v.size()) != n) throw ArgumentError("vector length differs from n");
    acc = wedge(acc, KVector<S>::vector(v));
  }
  return acc;
}

template <class S>
S inner(const KVector<S>& a, const KVector<S>& b) {
  a.check_same(b);
  S s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

template <class S>
double norm(const KVector<S>& a) {
  return std::sqrt(to_double(inner(a, a)));
}

inline double distance(const KVectorD& a, const KVectorD& b) {
  a.check_same(b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

/// Hodge star: *u_lambda = sign(lambda, lambda^c) u_{lambda^c}.
template <class S>
KVector<S> hodge_star(const KVector<S>& a) {
  int n = a.n();
  KVector<S> out(n, n - a.k());
  const auto& masks = basis_masks(n, a.k());
  IndexMask full = (IndexMask{1} << n) - 1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (ScalarTraits<S>::is_zero(a[i])) continue;
    IndexMask c = full & ~masks[i];
    auto r = static_cast<std::size_t>(index_rank(n, c));
    out[r] = merge_sign(masks[i], c) > 0 ? a[i] : S(-a[i]);
  }
  return out;
}

inline KVectorD to_double(const KVectorQ& a) {
  std::vector<double> c;
  c.reserve(a.size());
  for (const auto& x : a.coords()) c.push_back(x.get_d());
  return KVectorD(a.n(), a.k(), std::move(c));
}

inline KVectorQ exact_rational(const KVectorD& a) {
  std::vector<Rational> c;
  c.reserve(a.size());
  for (double x : a.coords()) c.push_back(exact_rational(x));
  return KVectorQ(a.n(), a.k(), std::move(c));
}

}  // namespace gaugeforge
