#include "lvpir/audit.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include "lvpir/errors.hpp"
#include "lvpir/protocol.hpp"

namespace lvpir {

namespace {

Int binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  Int result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result *= Int(n - k + i);
    result /= Int(i);
  }
  return result;
}

Int count_realizations(const SchemePlan& plan) {
  switch (plan.kind) {
    case PlanKind::FullDownload:
      return 1;
    case PlanKind::Partition:
      return Int(plan.blocks.size());
    case PlanKind::Grouping: {
      Int product = 1;
      for (std::size_t p = 0; p < plan.groups.size(); ++p)
        product *= binomial(plan.groups[p].size(), plan.picks[p]);
      return product;
    }
  }
  throw std::logic_error("unknown plan kind");
}

std::vector<std::vector<std::uint32_t>> k_subsets(const std::vector<std::uint32_t>& pool,
                                                  std::size_t k) {
  std::vector<std::vector<std::uint32_t>> result;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    std::vector<std::uint32_t> subset(k);
    for (std::size_t i = 0; i < k; ++i) subset[i] = pool[idx[i]];
    result.push_back(std::move(subset));
    // advance the combination odometer
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == pool.size() - k + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return result;
}

QueryRealization make_realization(const CharMatrix& m, const QuerySet& query,
                                  const Rational& probability,
                                  std::vector<Rational> theta_posterior) {
  std::vector<Rational> post(m.latent_count(), Rational(0));
  for (auto i : query.members())
    for (std::size_t t = 0; t < m.latent_count(); ++t)
      post[t] += theta_posterior[i - 1] * m.at(t, i - 1);
  return QueryRealization{query, probability, std::move(theta_posterior),
                          LatentDistribution(std::move(post))};
}

std::vector<QueryRealization> enumerate_grouping(const CharMatrix& m, const SchemePlan& plan) {
  const std::size_t message_count = plan.message_count;
  const std::size_t group_count = plan.groups.size();

  // Pr(Q = q | theta = i) depends only on i's group: one specific
  // (picks_p - 1)-subset of the rest of i's group, and one specific
  // picks_p'-subset of every other group.
  std::vector<Rational> prob_given_theta_in_group(group_count);
  for (std::size_t p = 0; p < group_count; ++p) {
    Int ways = binomial(plan.groups[p].size() - 1, plan.picks[p] - 1);
    for (std::size_t q = 0; q < group_count; ++q)
      if (q != p) ways *= binomial(plan.groups[q].size(), plan.picks[q]);
    prob_given_theta_in_group[p] = make_rational(Int(1), ways);
  }
  std::vector<std::size_t> group_of(message_count);
  for (std::size_t p = 0; p < group_count; ++p)
    for (auto i : plan.groups[p].members()) group_of[i - 1] = p;

  std::vector<std::vector<std::vector<std::uint32_t>>> choices(group_count);
  for (std::size_t p = 0; p < group_count; ++p)
    choices[p] = k_subsets(plan.groups[p].members(), plan.picks[p]);

  std::vector<QueryRealization> realizations;
  std::vector<std::size_t> odometer(group_count, 0);
  const Rational inv_message_count = make_rational(Int(1), Int(message_count));
  while (true) {
    std::vector<std::uint32_t> members;
    for (std::size_t p = 0; p < group_count; ++p)
      members.insert(members.end(), choices[p][odometer[p]].begin(),
                     choices[p][odometer[p]].end());
    QuerySet query(message_count, std::move(members));

    Rational prob = 0;
    for (auto i : query.members()) prob += prob_given_theta_in_group[group_of[i - 1]];
    prob *= inv_message_count;

    std::vector<Rational> theta_posterior(message_count, Rational(0));
    for (auto i : query.members())
      theta_posterior[i - 1] = prob_given_theta_in_group[group_of[i - 1]] * inv_message_count / prob;

    realizations.push_back(make_realization(m, query, prob, std::move(theta_posterior)));

    std::size_t p = group_count;
    while (p > 0 && odometer[p - 1] + 1 == choices[p - 1].size()) odometer[--p] = 0;
    if (p == 0) break;
    ++odometer[p - 1];
  }
  return realizations;
}

}  // namespace

std::vector<QueryRealization> enumerate_query_distribution(const CharMatrix& m,
                                                           const SchemePlan& plan,
                                                           std::uint64_t max_enum) {
  if (plan.message_count != m.message_count())
    throw ShapeError("plan and matrix disagree on K");
  if (count_realizations(plan) > Int(max_enum))
    throw TooManyQueriesError("plan has " + count_realizations(plan).str() +
                              " realizable queries, limit is " + std::to_string(max_enum));

  const std::size_t message_count = m.message_count();
  std::vector<QueryRealization> realizations;
  switch (plan.kind) {
    case PlanKind::FullDownload: {
      QuerySet query = QuerySet::full(message_count);
      std::vector<Rational> theta_posterior(message_count,
                                            make_rational(Int(1), Int(message_count)));
      realizations.push_back(make_realization(m, query, Rational(1), std::move(theta_posterior)));
      break;
    }
    case PlanKind::Partition: {
      for (const auto& block : plan.blocks) {
        const Rational prob = make_rational(Int(block.size()), Int(message_count));
        std::vector<Rational> theta_posterior(message_count, Rational(0));
        for (auto i : block.members())
          theta_posterior[i - 1] = make_rational(Int(1), Int(block.size()));
        realizations.push_back(make_realization(m, block, prob, std::move(theta_posterior)));
      }
      break;
    }
    case PlanKind::Grouping:
      realizations = enumerate_grouping(m, plan);
      break;
  }
  return realizations;
}

AuditReport audit_exact(const CharMatrix& m, const SchemePlan& plan, std::uint64_t max_enum) {
  LatentDistribution prior = latent_prior(m);
  auto realizations = enumerate_query_distribution(m, plan, max_enum);

  Rational probability_sum = 0;
  Rational max_tv = 0;
  double mutual_information = 0.0;
  std::vector<AuditEntry> entries;
  entries.reserve(realizations.size());
  bool pass = true;
  for (auto& realization : realizations) {
    probability_sum += realization.probability;
    const bool match = realization.posterior == prior;
    if (!match) {
      pass = false;
      max_tv = std::max(max_tv, total_variation(realization.posterior, prior));
    }
    const double pq = rational_to_double(realization.probability);
    for (std::size_t t = 0; t < prior.size(); ++t) {
      const double post = rational_to_double(realization.posterior.at(t));
      const double pri = rational_to_double(prior.at(t));
      if (post > 0.0 && pri > 0.0) mutual_information += pq * post * std::log2(post / pri);
    }
    entries.push_back(AuditEntry{realization.query, realization.probability,
                                 realization.posterior, match});
  }
  if (probability_sum != 1)
    throw std::logic_error("query realization probabilities sum to " +
                           format_fraction(probability_sum));

  return AuditReport{std::move(prior), std::move(entries), pass, pass ? Rational(0) : max_tv,
                     mutual_information};
}

namespace {

// Exact sampling from a rational distribution: draw uniformly below the
// common denominator and walk the cumulative numerators.
struct ColumnSampler {
  std::vector<std::uint64_t> cumulative;
  std::uint64_t denominator = 0;

  std::size_t draw(SplitMix64& rng) const {
    const std::uint64_t x = rng.below(denominator);
    for (std::size_t t = 0; t < cumulative.size(); ++t)
      if (x < cumulative[t]) return t;
    return cumulative.size() - 1;
  }
};

ColumnSampler make_column_sampler(const CharMatrix& m, std::size_t col) {
  Int common = 1;
  for (std::size_t t = 0; t < m.latent_count(); ++t)
    common = boost::multiprecision::lcm(common, denominator_of(m.at(t, col)));
  if (common > Int(std::numeric_limits<std::uint64_t>::max()))
    throw TooLargeError("column denominator does not fit 64 bits; sampled audit unsupported");
  ColumnSampler sampler;
  sampler.denominator = common.convert_to<std::uint64_t>();
  std::uint64_t running = 0;
  for (std::size_t t = 0; t < m.latent_count(); ++t) {
    const Int numer = numerator_of(m.at(t, col)) * (common / denominator_of(m.at(t, col)));
    running += numer.convert_to<std::uint64_t>();
    sampler.cumulative.push_back(running);
  }
  return sampler;
}

std::uint64_t fnv1a(const std::vector<std::uint32_t>& members) {
  std::uint64_t h = 1469598103934665603ull;
  for (auto v : members) {
    for (int shift = 0; shift < 32; shift += 8) {
      h ^= (v >> shift) & 0xFF;
      h *= 1099511628211ull;
    }
  }
  return h;
}

constexpr std::uint64_t kMaxSampledGroups = 4096;
constexpr std::uint64_t kFingerprintBuckets = 256;
constexpr std::uint64_t kChunkTrials = 8192;

using CountMap = std::map<std::string, std::vector<std::uint64_t>>;

void merge_counts(CountMap& into, const CountMap& from) {
  for (const auto& [key, counts] : from) {
    auto& slot = into[key];
    if (slot.empty()) slot.assign(counts.size(), 0);
    for (std::size_t t = 0; t < counts.size(); ++t) slot[t] += counts[t];
  }
}

}  // namespace

SampledAuditReport audit_sampled(const CharMatrix& m, const SchemePlan& plan,
                                 std::uint64_t trials, std::uint64_t seed, double alpha,
                                 unsigned threads) {
  if (plan.message_count != m.message_count())
    throw ShapeError("plan and matrix disagree on K");
  if (trials < 1) throw ShapeError("need at least one trial");

  const std::size_t latent_count = m.latent_count();
  const std::size_t message_count = m.message_count();
  const bool fingerprinted = count_realizations(plan) > Int(kMaxSampledGroups);

  std::vector<ColumnSampler> samplers;
  samplers.reserve(message_count);
  for (std::size_t k = 0; k < message_count; ++k) samplers.push_back(make_column_sampler(m, k));

  // Fixed-size chunks with per-chunk seeds: counts are identical for any
  // thread count.
  const std::uint64_t chunk_count = (trials + kChunkTrials - 1) / kChunkTrials;
  std::vector<std::uint64_t> chunk_seeds(chunk_count);
  SplitMix64 seeder(seed);
  for (auto& s : chunk_seeds) s = seeder.next();

  auto run_chunk = [&](std::uint64_t chunk) {
    CountMap local;
    SplitMix64 rng(chunk_seeds[chunk]);
    const std::uint64_t begin = chunk * kChunkTrials;
    const std::uint64_t end = std::min(trials, begin + kChunkTrials);
    for (std::uint64_t trial = begin; trial < end; ++trial) {
      const auto theta = static_cast<std::uint32_t>(1 + rng.below(message_count));
      const std::size_t latent = samplers[theta - 1].draw(rng);
      QuerySet query = sample_query(plan, theta, rng);
      std::string key = fingerprinted
                            ? "bucket-" + std::to_string(fnv1a(query.members()) % kFingerprintBuckets)
                            : to_string(query);
      auto& slot = local[key];
      if (slot.empty()) slot.assign(latent_count, 0);
      ++slot[latent];
    }
    return local;
  };

  CountMap counts;
  const unsigned worker_count =
      static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, threads), chunk_count));
  if (worker_count <= 1) {
    for (std::uint64_t chunk = 0; chunk < chunk_count; ++chunk)
      merge_counts(counts, run_chunk(chunk));
  } else {
    std::atomic<std::uint64_t> next_chunk{0};
    std::vector<CountMap> partial(worker_count);
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < worker_count; ++w) {
      workers.emplace_back([&, w] {
        for (std::uint64_t chunk = next_chunk.fetch_add(1); chunk < chunk_count;
             chunk = next_chunk.fetch_add(1))
          merge_counts(partial[w], run_chunk(chunk));
      });
    }
    for (auto& t : workers) t.join();
    for (const auto& p : partial) merge_counts(counts, p);
  }

  const LatentDistribution prior = latent_prior(m);
  std::vector<double> prior_prob(latent_count);
  for (std::size_t t = 0; t < latent_count; ++t) prior_prob[t] = rational_to_double(prior.at(t));

  SampledAuditReport report;
  report.trials = trials;
  report.alpha = alpha;
  report.fingerprinted = fingerprinted;

  for (const auto& [key, group_counts] : counts) {
    SampledGroupStat stat;
    stat.key = key;
    stat.latent_counts = group_counts;
    for (auto c : group_counts) stat.samples += c;

    std::size_t cells = 0;
    bool enough = true;
    double chi2 = 0.0;
    bool impossible_seen = false;
    for (std::size_t t = 0; t < latent_count; ++t) {
      const double expected = static_cast<double>(stat.samples) * prior_prob[t];
      if (prior_prob[t] == 0.0) {
        if (group_counts[t] > 0) impossible_seen = true;  // mass where the prior has none
        continue;
      }
      ++cells;
      if (expected < 5.0) enough = false;
      const double diff = static_cast<double>(group_counts[t]) - expected;
      chi2 += diff * diff / expected;
    }
    stat.tested = enough && cells >= 2;
    if (stat.tested) {
      boost::math::chi_squared dist(static_cast<double>(cells - 1));
      stat.p_value = boost::math::cdf(boost::math::complement(dist, chi2));
    }
    if (impossible_seen) {
      stat.tested = true;
      stat.p_value = 0.0;
    }
    report.groups.push_back(std::move(stat));
  }

  for (const auto& g : report.groups)
    if (g.tested) ++report.groups_tested;
  const double corrected =
      report.groups_tested > 0 ? alpha / static_cast<double>(report.groups_tested) : alpha;
  report.pass = true;
  for (auto& g : report.groups) {
    g.rejected = g.tested && g.p_value < corrected;
    if (g.rejected) report.pass = false;
  }
  return report;
}

}  // namespace lvpir
