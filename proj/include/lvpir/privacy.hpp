#pragma once

#include <cstdint>
#include <vector>

#include "lvpir/model.hpp"

namespace lvpir {

// Enumeration sweeps all 2^K subsets; beyond this K the planner falls back
// to grouping or full download.
inline constexpr std::size_t kDefaultEnumCap = 24;

/// Every non-empty subset whose posterior equals the prior, i.e. every
/// query a scheme may use without moving the latent distribution.
/// Sorted by (size, members); always contains the full set.
struct ValidSubsetCatalog {
  std::size_t message_count = 0;
  std::vector<QuerySet> subsets;
  std::vector<std::uint64_t> masks;  // aligned with subsets

  bool contains_mask(std::uint64_t mask) const;
};

// True iff averaging the query's columns reproduces the overall column
// average: K * (H b_q) == |q| * (H 1), checked as exact equalities row by
// row with early exit.
bool is_private_subset(const CharMatrix& m, const QuerySet& query);

// The complete catalog { q != empty : is_private_subset(m, q) }.
// Throws TooLargeError when K exceeds max_message_count. The sweep may be
// split across threads; the result is identical for any thread count.
ValidSubsetCatalog enumerate_valid_subsets(const CharMatrix& m,
                                           std::size_t max_message_count = kDefaultEnumCap,
                                           unsigned threads = 1);

}  // namespace lvpir
