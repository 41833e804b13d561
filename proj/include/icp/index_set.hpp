#pragma once

#include "icp/dataset.hpp"

#include <algorithm>
#include <iterator>
#include <string>
#include <vector>

namespace icp {

/// Sorted, duplicate-free list of predictor column indices.
using IndexSet = std::vector<Index>;

inline IndexSet make_index_set(IndexSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

inline IndexSet intersect(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline bool contains(const IndexSet& s, Index k) { return std::binary_search(s.begin(), s.end(), k); }

inline bool is_subset(const IndexSet& sub, const IndexSet& super) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

/// All size-k subsets of `pool` in lexicographic order (of positions in `pool`,
/// which is itself sorted, so also lexicographic in column index).
inline std::vector<IndexSet> combinations(const IndexSet& pool, std::size_t k) {
  std::vector<IndexSet> out;
  const std::size_t n = pool.size();
  if (k > n) return out;
  std::vector<std::size_t> pos(k);
  for (std::size_t i = 0; i < k; ++i) pos[i] = i;
  while (true) {
    IndexSet s(k);
    for (std::size_t i = 0; i < k; ++i) s[i] = pool[pos[i]];
    out.push_back(std::move(s));
    std::size_t i = k;
    while (i > 0 && pos[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++pos[i - 1];
    for (std::size_t j = i; j < k; ++j) pos[j] = pos[j - 1] + 1;
  }
  return out;
}

inline std::vector<std::string> set_names(const Dataset& d, const IndexSet& s) {
  std::vector<std::string> out;
  out.reserve(s.size());
  for (auto k : s) out.push_back(d.names()[static_cast<std::size_t>(k)]);
  return out;
}

}  // namespace icp
