#pragma once

#include <cstdint>
#include <vector>

#include "lvpir/privacy.hpp"

namespace lvpir {

enum class PlanKind { Partition, Grouping, FullDownload };

/// A privacy-certified query strategy.
///
/// Partition:    disjoint blocks covering [1..K]; the query for theta is the
///               block containing it.
/// Grouping:     maximal classes of identical matrix columns plus a common
///               divisor of the group sizes; the query picks |G_p|/divisor
///               messages per group uniformly at random.
/// FullDownload: always query [1..K].
struct SchemePlan {
  PlanKind kind = PlanKind::FullDownload;
  std::size_t message_count = 0;
  std::vector<QuerySet> blocks;        // Partition only
  std::vector<QuerySet> groups;        // Grouping only
  std::uint64_t divisor = 0;           // Grouping: gcd of group sizes
  std::vector<std::uint64_t> picks;    // Grouping: per-group download counts

  static SchemePlan full_download(std::size_t message_count);
  // Validates the disjoint-cover structure, not privacy; audits check that.
  static SchemePlan partition(std::size_t message_count, std::vector<QuerySet> blocks);
  static SchemePlan grouping(std::size_t message_count, std::vector<QuerySet> groups,
                             std::uint64_t divisor);

  // Partition: the unique block containing the index.
  const QuerySet& block_containing(std::uint32_t index) const;

  bool operator==(const SchemePlan& other) const;
};

/// Download cost in messages (multiply by L bits per message for bits).
struct CostReport {
  std::vector<Rational> per_message;  // cost when theta = k, 1-based k at [k-1]
  Rational average;
};

CostReport cost_of_plan(const SchemePlan& plan);

struct PlanResult {
  SchemePlan plan;
  CostReport cost;
};

// Minimum sum-of-squared-block-sizes partition of [1..K] into catalog
// members, via exact-cover DP over bitmasks anchored at the lowest
// uncovered index. Among cost ties returns the partition whose block list
// (ordered by minimum element) is lexicographically smallest.
PlanResult solve_exhaustive(const CharMatrix& m, const ValidSubsetCatalog& catalog);

// Maximal classes of exactly-equal columns, each sorted, ordered by their
// minimum element.
std::vector<QuerySet> detect_groups(const CharMatrix& m);

// The grouping scheme: divisor = gcd of group sizes, cost K/divisor for
// every message. Degenerates to full download when the divisor is 1.
PlanResult plan_grouping(const CharMatrix& m);

// Exact rank over the rationals, by fraction-free (Bareiss) elimination.
// rank == K means only the full set is a private subset.
std::size_t column_rank(const CharMatrix& m);

struct PlannerConfig {
  std::size_t enum_cap = kDefaultEnumCap;
  unsigned threads = 1;
};

// Front door: full download in the full-column-rank regime, exhaustive
// search when K fits under the cap, otherwise the cheaper of grouping and
// full download.
PlanResult plan_best(const CharMatrix& m, const PlannerConfig& config = {});

}  // namespace lvpir
