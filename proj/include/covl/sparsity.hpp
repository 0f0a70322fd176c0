#ifndef COVL_SPARSITY_HPP
#define COVL_SPARSITY_HPP

#include <algorithm>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "covl/types.hpp"

namespace covl {

/// Sorted set of distinct zero-based atom indices into a dictionary with M atoms.
class SupportSet {
 public:
  SupportSet() = default;

  SupportSet(std::vector<Index> indices, Index m) : idx_(std::move(indices)), m_(m) {
    std::sort(idx_.begin(), idx_.end());
    detail::require(std::adjacent_find(idx_.begin(), idx_.end()) == idx_.end(), ErrorKind::InvalidInput,
                    "support contains duplicate indices");
    detail::require(idx_.empty() || (idx_.front() >= 0 && idx_.back() < m_), ErrorKind::InvalidInput,
                    "support index out of range");
  }

  std::span<const Index> indices() const noexcept { return idx_; }
  std::size_t size() const noexcept { return idx_.size(); }
  bool empty() const noexcept { return idx_.empty(); }
  Index universe() const noexcept { return m_; }

  bool contains(Index i) const { return std::binary_search(idx_.begin(), idx_.end(), i); }

  /// Adds i; returns false when it was already present.
  bool insert(Index i) {
    detail::require(i >= 0 && i < m_, ErrorKind::InvalidInput, "support index out of range");
    auto it = std::lower_bound(idx_.begin(), idx_.end(), i);
    if (it != idx_.end() && *it == i) return false;
    idx_.insert(it, i);
    return true;
  }

  friend bool operator==(const SupportSet& a, const SupportSet& b) { return a.idx_ == b.idx_; }

 private:
  std::vector<Index> idx_;
  Index m_ = 0;
};

/// i is a peak iff v[i] > v[i-1] and v[i] >= v[i+1], with -inf outside the vector.
inline bool is_peak(const RVector& v, Index i) {
  const double left = i > 0 ? v[i - 1] : -std::numeric_limits<double>::infinity();
  const double right = i + 1 < v.size() ? v[i + 1] : -std::numeric_limits<double>::infinity();
  return v[i] > left && v[i] >= right;
}

namespace detail {

// Larger value first, lower index on ties.
inline void rank_by_value(std::vector<Index>& idx, const RVector& v) {
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return v[a] > v[b]; });
}

}  // namespace detail

/// H_K: keeps the K largest elements (peak = false) or the K largest local
/// maxima (peak = true) and zeroes the rest. When fewer than K peaks exist the
/// remaining slots go to the largest entries not yet chosen.
inline std::pair<RVector, SupportSet> hard_threshold(const RVector& gamma, Index k, bool peak) {
  const Index m = gamma.size();
  detail::require(k >= 1, ErrorKind::InvalidInput, "K must be at least 1");
  detail::require(k <= m, ErrorKind::InvalidInput, "K exceeds vector length");

  std::vector<Index> chosen;
  chosen.reserve(static_cast<std::size_t>(k));
  if (peak) {
    std::vector<Index> peaks;
    for (Index i = 0; i < m; ++i)
      if (is_peak(gamma, i)) peaks.push_back(i);
    detail::rank_by_value(peaks, gamma);
    for (Index i : peaks) {
      if (static_cast<Index>(chosen.size()) == k) break;
      chosen.push_back(i);
    }
  }
  if (static_cast<Index>(chosen.size()) < k) {
    std::vector<char> taken(static_cast<std::size_t>(m), 0);
    for (Index i : chosen) taken[static_cast<std::size_t>(i)] = 1;
    std::vector<Index> rest;
    rest.reserve(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i)
      if (!taken[static_cast<std::size_t>(i)]) rest.push_back(i);
    const auto need = static_cast<std::size_t>(k) - chosen.size();
    std::partial_sort(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(need), rest.end(),
                      [&](Index a, Index b) { return gamma[a] > gamma[b] || (gamma[a] == gamma[b] && a < b); });
    chosen.insert(chosen.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(need));
  }

  SupportSet support(std::move(chosen), m);
  RVector out = RVector::Zero(m);
  for (Index i : support.indices()) out[i] = gamma[i];
  return {std::move(out), std::move(support)};
}

}  // namespace covl

#endif  // COVL_SPARSITY_HPP
