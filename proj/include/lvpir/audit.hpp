#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lvpir/planner.hpp"

namespace lvpir {

inline constexpr std::uint64_t kDefaultMaxEnum = 1000000;

/// One query the plan's sampler can emit, with its exact probability and
/// the exact conditionals it induces.
struct QueryRealization {
  QuerySet query;
  Rational probability;                   // Pr(Q = q) under uniform theta
  std::vector<Rational> theta_posterior;  // Pr(theta = i | Q = q), length K
  LatentDistribution posterior;           // Pr(S | Q = q)
};

// Enumerates every realizable query with probabilities computed from the
// sampler's definition (deterministic blocks, or uniform in-group subsets)
// rather than from the uniformity shortcut it is supposed to satisfy.
// Throws TooManyQueriesError when the count exceeds max_enum.
std::vector<QueryRealization> enumerate_query_distribution(const CharMatrix& m,
                                                           const SchemePlan& plan,
                                                           std::uint64_t max_enum = kDefaultMaxEnum);

struct AuditEntry {
  QuerySet query;
  Rational probability;
  LatentDistribution posterior;
  bool exact_match;
};

struct AuditReport {
  LatentDistribution prior;
  std::vector<AuditEntry> per_query;
  bool pass = false;
  Rational max_tv_distance;               // exact; 0 on PASS
  double mutual_information_bits = 0.0;   // display only, never part of the verdict
};

// Exact privacy audit: every realizable query's posterior must equal the
// prior elementwise. Also checks that realization probabilities sum to 1.
AuditReport audit_exact(const CharMatrix& m, const SchemePlan& plan,
                        std::uint64_t max_enum = kDefaultMaxEnum);

struct SampledGroupStat {
  std::string key;  // query members, or a fingerprint bucket label
  std::uint64_t samples = 0;
  std::vector<std::uint64_t> latent_counts;
  bool tested = false;
  double p_value = 1.0;
  bool rejected = false;
};

struct SampledAuditReport {
  std::uint64_t trials = 0;
  double alpha = 0.0;
  bool fingerprinted = false;
  std::size_t groups_tested = 0;
  std::vector<SampledGroupStat> groups;
  bool pass = false;
};

// Statistical stand-in for audit_exact when enumeration is infeasible:
// samples (theta, S, Q), groups trials by realized query (or by a hash
// bucket when realizations are too numerous) and runs chi-square
// goodness-of-fit of each group's latent histogram against the prior,
// with Bonferroni correction across groups. Deterministic for a given
// seed regardless of thread count.
SampledAuditReport audit_sampled(const CharMatrix& m, const SchemePlan& plan,
                                 std::uint64_t trials, std::uint64_t seed, double alpha = 0.01,
                                 unsigned threads = 1);

}  // namespace lvpir
