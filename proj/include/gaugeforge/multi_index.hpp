#pragma once

// Increasing multi-indices lambda in Lambda(n, k) and the lexicographic
// coordinate order shared by every k-vector, file format and report.

#include <array>
#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "gaugeforge/error.hpp"

namespace gaugeforge {

inline constexpr int kMaxDimension = 12;

using IndexMask = std::uint32_t;

/// Strictly increasing list of k integers in {1..n}; stored as a bit mask
/// (bit i-1 set iff i is an entry).
class MultiIndex {
 public:
  MultiIndex() = default;
  MultiIndex(int n, IndexMask mask) : n_(n), mask_(mask) {}

  static MultiIndex from_entries(int n, const std::vector<int>& entries) {
    if (n < 0 || n > kMaxDimension) throw ArgumentError("ambient dimension out of range");
    IndexMask mask = 0;
    int prev = 0;
    for (int e : entries) {
      if (e <= prev || e > n)
        throw ArgumentError("multi-index entries must be strictly increasing in 1.." +
                            std::to_string(n));
      mask |= IndexMask{1} << (e - 1);
      prev = e;
    }
    return MultiIndex(n, mask);
  }

  int n() const { return n_; }
  int k() const { return std::popcount(mask_); }
  IndexMask mask() const { return mask_; }

  std::vector<int> entries() const {
    std::vector<int> out;
    for (int i = 0; i < n_; ++i)
      if (mask_ >> i & 1u) out.push_back(i + 1);
    return out;
  }

  MultiIndex complement() const {
    IndexMask full = n_ == 32 ? ~IndexMask{0} : ((IndexMask{1} << n_) - 1);
    return MultiIndex(n_, full & ~mask_);
  }

  /// Comma-joined entries, e.g. "1,2". The empty index renders as "".
  std::string str() const {
    std::string out;
    for (int e : entries()) {
      if (!out.empty()) out += ',';
      out += std::to_string(e);
    }
    return out;
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  int n_ = 0;
  IndexMask mask_ = 0;
};

inline long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

namespace detail {

struct IndexTables {
  // masks[n][k]: lexicographic list; rank[n][mask]: position within its k.
  std::array<std::array<std::vector<IndexMask>, kMaxDimension + 1>, kMaxDimension + 1> masks;
  std::array<std::vector<int>, kMaxDimension + 1> rank;

  IndexTables() {
    for (int n = 0; n <= kMaxDimension; ++n) {
      rank[n].assign(std::size_t{1} << n, -1);
      for (int k = 0; k <= n; ++k) {
        std::vector<IndexMask> list;
        std::vector<int> c(k);
        for (int i = 0; i < k; ++i) c[i] = i;
        while (true) {
          IndexMask m = 0;
          for (int v : c) m |= IndexMask{1} << v;
          list.push_back(m);
          int i = k - 1;
          while (i >= 0 && c[i] == n - k + i) --i;
          if (i < 0) break;
          ++c[i];
          for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
        }
        for (std::size_t r = 0; r < list.size(); ++r) rank[n][list[r]] = static_cast<int>(r);
        masks[n][k] = std::move(list);
      }
    }
  }
};

inline const IndexTables& tables() {
  static const IndexTables t;
  return t;
}

}  // namespace detail

inline void check_degree(int n, int k) {
  if (n < 0 || n > kMaxDimension)
    throw ArgumentError("ambient dimension must lie in 0.." + std::to_string(kMaxDimension));
  if (k < 0 || k > n) throw ArgumentError("degree must satisfy 0 <= k <= n");
}

/// Masks of Lambda(n, k) in lexicographic order.
inline const std::vector<IndexMask>& basis_masks(int n, int k) {
  check_degree(n, k);
  return detail::tables().masks[n][k];
}

inline int index_rank(int n, IndexMask mask) { return detail::tables().rank[n][mask]; }

inline std::vector<MultiIndex> basis_indices(int n, int k) {
  std::vector<MultiIndex> out;
  for (IndexMask m : basis_masks(n, k)) out.emplace_back(n, m);
  return out;
}

/// Sign of the permutation sorting the concatenation (a, b) of two
/// disjoint increasing index lists: (-1)^{#{i in a, j in b : i > j}}.
inline int merge_sign(IndexMask a, IndexMask b) {
  int inversions = 0;
  IndexMask rest = b;
  while (rest) {
    int j = std::countr_zero(rest);
    rest &= rest - 1;
    IndexMask above = (j >= 31) ? 0 : ~((IndexMask{1} << (j + 1)) - 1);
    inversions += std::popcount(a & above);
  }
  return (inversions & 1) ? -1 : 1;
}

}  // namespace gaugeforge
