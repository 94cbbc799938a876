#include "lvpir/planner.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "lvpir/errors.hpp"

namespace lvpir {

namespace {

void check_disjoint_cover(std::size_t message_count, const std::vector<QuerySet>& parts,
                          const char* what) {
  std::vector<std::uint8_t> seen(message_count, 0);
  for (const auto& part : parts) {
    if (part.message_count() != message_count)
      throw ShapeError(std::string(what) + " universe mismatch");
    for (auto i : part.members()) {
      if (seen[i - 1]) throw ShapeError(std::string(what) + "s overlap at index " + std::to_string(i));
      seen[i - 1] = 1;
    }
  }
  for (std::size_t i = 0; i < message_count; ++i)
    if (!seen[i])
      throw ShapeError(std::string(what) + "s do not cover index " + std::to_string(i + 1));
}

}  // namespace

SchemePlan SchemePlan::full_download(std::size_t message_count) {
  if (message_count == 0) throw ShapeError("empty message range");
  SchemePlan plan;
  plan.kind = PlanKind::FullDownload;
  plan.message_count = message_count;
  return plan;
}

SchemePlan SchemePlan::partition(std::size_t message_count, std::vector<QuerySet> blocks) {
  check_disjoint_cover(message_count, blocks, "partition block");
  std::sort(blocks.begin(), blocks.end());  // blocks are disjoint: sorts by minimum element
  SchemePlan plan;
  plan.kind = PlanKind::Partition;
  plan.message_count = message_count;
  plan.blocks = std::move(blocks);
  return plan;
}

SchemePlan SchemePlan::grouping(std::size_t message_count, std::vector<QuerySet> groups,
                                std::uint64_t divisor) {
  check_disjoint_cover(message_count, groups, "group");
  if (divisor == 0) throw ShapeError("grouping divisor must be positive");
  std::sort(groups.begin(), groups.end());
  SchemePlan plan;
  plan.kind = PlanKind::Grouping;
  plan.message_count = message_count;
  plan.divisor = divisor;
  plan.picks.reserve(groups.size());
  for (const auto& g : groups) {
    if (g.size() % divisor != 0)
      throw ShapeError("divisor " + std::to_string(divisor) + " does not divide group size " +
                       std::to_string(g.size()));
    plan.picks.push_back(g.size() / divisor);
  }
  plan.groups = std::move(groups);
  return plan;
}

const QuerySet& SchemePlan::block_containing(std::uint32_t index) const {
  for (const auto& block : blocks)
    if (block.contains(index)) return block;
  throw IndexError("no partition block contains index " + std::to_string(index));
}

bool SchemePlan::operator==(const SchemePlan& other) const {
  return kind == other.kind && message_count == other.message_count && blocks == other.blocks &&
         groups == other.groups && divisor == other.divisor && picks == other.picks;
}

CostReport cost_of_plan(const SchemePlan& plan) {
  const std::size_t message_count = plan.message_count;
  CostReport report;
  report.per_message.assign(message_count, Rational(0));
  switch (plan.kind) {
    case PlanKind::Partition:
      for (const auto& block : plan.blocks) {
        const Rational cost = block.size();
        for (auto i : block.members()) report.per_message[i - 1] = cost;
      }
      break;
    case PlanKind::Grouping: {
      const Rational cost = make_rational(Int(message_count), Int(plan.divisor));
      std::fill(report.per_message.begin(), report.per_message.end(), cost);
      break;
    }
    case PlanKind::FullDownload:
      std::fill(report.per_message.begin(), report.per_message.end(), Rational(message_count));
      break;
  }
  Rational sum = 0;
  for (const auto& c : report.per_message) sum += c;
  report.average = sum / Int(message_count);
  return report;
}

namespace {

// Exact-cover DP state: the set of still-uncovered indices. The candidate
// blocks for a state are the catalog members whose minimum element is the
// lowest uncovered index.
struct ExactCover {
  std::size_t message_count;
  std::vector<std::vector<std::uint64_t>> by_anchor;  // candidate masks per anchor bit
  std::unordered_map<std::uint64_t, std::uint32_t> memo;

  explicit ExactCover(const ValidSubsetCatalog& catalog)
      : message_count(catalog.message_count), by_anchor(catalog.message_count) {
    for (auto mask : catalog.masks)
      by_anchor[static_cast<std::size_t>(std::countr_zero(mask))].push_back(mask);
  }

  std::uint32_t best_cost(std::uint64_t rest) {
    if (rest == 0) return 0;
    if (auto it = memo.find(rest); it != memo.end()) return it->second;
    const std::size_t anchor = static_cast<std::size_t>(std::countr_zero(rest));
    std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
    for (auto mask : by_anchor[anchor]) {
      if ((mask & ~rest) != 0) continue;
      const std::uint32_t size = static_cast<std::uint32_t>(std::popcount(mask));
      const std::uint32_t sub = best_cost(rest & ~mask);
      if (sub != std::numeric_limits<std::uint32_t>::max())
        best = std::min(best, size * size + sub);
    }
    memo.emplace(rest, best);
    return best;
  }

  // Reconstruct the cost-optimal partition that is lexicographically
  // smallest as a block list ordered by minimum element. At each state the
  // chosen block is the list's next element, so picking the smallest
  // optimal block greedily is exact.
  std::vector<std::uint64_t> reconstruct() {
    std::vector<std::uint64_t> chosen;
    std::uint64_t rest = (std::uint64_t{1} << message_count) - 1;
    while (rest) {
      const std::uint32_t target = best_cost(rest);
      const std::size_t anchor = static_cast<std::size_t>(std::countr_zero(rest));
      const std::uint64_t* pick = nullptr;
      for (const auto& mask : by_anchor[anchor]) {
        if ((mask & ~rest) != 0) continue;
        const std::uint32_t size = static_cast<std::uint32_t>(std::popcount(mask));
        const std::uint32_t sub = best_cost(rest & ~mask);
        if (sub == std::numeric_limits<std::uint32_t>::max() || size * size + sub != target)
          continue;
        if (!pick || sequence_less(mask, *pick)) pick = &mask;
      }
      if (!pick) throw std::logic_error("exact cover lost an optimal block during reconstruction");
      chosen.push_back(*pick);
      rest &= ~*pick;
    }
    return chosen;
  }

  static bool sequence_less(std::uint64_t a, std::uint64_t b) {
    while (a && b) {
      const int la = std::countr_zero(a), lb = std::countr_zero(b);
      if (la != lb) return la < lb;
      a &= a - 1;
      b &= b - 1;
    }
    return a == 0 && b != 0;  // proper prefix
  }
};

}  // namespace

PlanResult solve_exhaustive(const CharMatrix& m, const ValidSubsetCatalog& catalog) {
  if (catalog.message_count != m.message_count())
    throw ShapeError("catalog does not belong to this matrix");
  ExactCover solver(catalog);
  std::vector<QuerySet> blocks;
  for (auto mask : solver.reconstruct())
    blocks.push_back(QuerySet::from_mask(m.message_count(), mask));
  SchemePlan plan = SchemePlan::partition(m.message_count(), std::move(blocks));
  return PlanResult{plan, cost_of_plan(plan)};
}

std::vector<QuerySet> detect_groups(const CharMatrix& m) {
  std::vector<std::vector<std::uint32_t>> members;
  std::vector<std::vector<Rational>> representatives;
  for (std::size_t k = 0; k < m.message_count(); ++k) {
    auto col = m.column(k);
    bool placed = false;
    for (std::size_t g = 0; g < representatives.size() && !placed; ++g) {
      if (representatives[g] == col) {
        members[g].push_back(static_cast<std::uint32_t>(k + 1));
        placed = true;
      }
    }
    if (!placed) {
      representatives.push_back(std::move(col));
      members.push_back({static_cast<std::uint32_t>(k + 1)});
    }
  }
  // First-occurrence order is minimum-element order.
  std::vector<QuerySet> groups;
  groups.reserve(members.size());
  for (auto& g : members) groups.emplace_back(m.message_count(), std::move(g));
  return groups;
}

PlanResult plan_grouping(const CharMatrix& m) {
  auto groups = detect_groups(m);
  std::uint64_t divisor = 0;
  for (const auto& g : groups) divisor = std::gcd(divisor, static_cast<std::uint64_t>(g.size()));
  SchemePlan plan = SchemePlan::grouping(m.message_count(), std::move(groups), divisor);
  return PlanResult{plan, cost_of_plan(plan)};
}

std::size_t column_rank(const CharMatrix& m) {
  const std::size_t rows = m.latent_count(), cols = m.message_count();
  // Row scaling by the common denominator preserves rank and keeps the
  // elimination over the integers.
  std::vector<std::vector<Int>> a(rows, std::vector<Int>(cols));
  for (std::size_t t = 0; t < rows; ++t) {
    Int common = 1;
    for (std::size_t k = 0; k < cols; ++k)
      common = boost::multiprecision::lcm(common, denominator_of(m.at(t, k)));
    for (std::size_t k = 0; k < cols; ++k)
      a[t][k] = numerator_of(m.at(t, k)) * (common / denominator_of(m.at(t, k)));
  }

  std::size_t rank = 0;
  Int previous_pivot = 1;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t pivot_row = rank;
    while (pivot_row < rows && a[pivot_row][col] == 0) ++pivot_row;
    if (pivot_row == rows) continue;
    std::swap(a[rank], a[pivot_row]);
    for (std::size_t i = rank + 1; i < rows; ++i) {
      for (std::size_t j = col + 1; j < cols; ++j) {
        Int value = a[rank][col] * a[i][j] - a[i][col] * a[rank][j];
        Int quotient, remainder;
        boost::multiprecision::divide_qr(value, previous_pivot, quotient, remainder);
        if (remainder != 0) throw std::logic_error("fraction-free elimination lost exactness");
        a[i][j] = quotient;
      }
      a[i][col] = 0;
    }
    previous_pivot = a[rank][col];
    ++rank;
  }
  return rank;
}

PlanResult plan_best(const CharMatrix& m, const PlannerConfig& config) {
  const std::size_t message_count = m.message_count();
  if (column_rank(m) == message_count) {
    SchemePlan plan = SchemePlan::full_download(message_count);
    return PlanResult{plan, cost_of_plan(plan)};
  }
  if (message_count <= config.enum_cap) {
    auto catalog = enumerate_valid_subsets(m, config.enum_cap, config.threads);
    return solve_exhaustive(m, catalog);
  }
  PlanResult grouped = plan_grouping(m);
  if (grouped.plan.divisor > 1) return grouped;
  SchemePlan plan = SchemePlan::full_download(message_count);
  return PlanResult{plan, cost_of_plan(plan)};
}

}  // namespace lvpir
