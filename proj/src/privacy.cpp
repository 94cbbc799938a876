#include "lvpir/privacy.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <thread>
#include <unordered_set>

#include "lvpir/errors.hpp"

namespace lvpir {

bool ValidSubsetCatalog::contains_mask(std::uint64_t mask) const {
  return std::find(masks.begin(), masks.end(), mask) != masks.end();
}

bool is_private_subset(const CharMatrix& m, const QuerySet& query) {
  if (query.message_count() != m.message_count())
    throw ShapeError("query universe does not match matrix column count");
  const Int k_count = m.message_count();
  const Int q_size = query.size();
  for (std::size_t t = 0; t < m.latent_count(); ++t) {
    Rational in_query = 0;
    Rational row_total = 0;
    for (std::size_t k = 0; k < m.message_count(); ++k) row_total += m.at(t, k);
    for (auto i : query.members()) in_query += m.at(t, i - 1);
    if (k_count * in_query != q_size * row_total) return false;  // early exit on first row
  }
  return true;
}

namespace {

// Rows rescaled to integers over a per-row common denominator. The subset
// condition K * sum_q(n) == |q| * sum_all(n) is denominator-free.
struct IntRows {
  std::vector<std::vector<Int>> values;  // [row][col]
  std::vector<Int> totals;
};

IntRows integer_rows(const CharMatrix& m) {
  IntRows rows;
  rows.values.resize(m.latent_count());
  rows.totals.resize(m.latent_count());
  for (std::size_t t = 0; t < m.latent_count(); ++t) {
    Int common = 1;
    for (std::size_t k = 0; k < m.message_count(); ++k)
      common = boost::multiprecision::lcm(common, denominator_of(m.at(t, k)));
    auto& row = rows.values[t];
    row.resize(m.message_count());
    Int total = 0;
    for (std::size_t k = 0; k < m.message_count(); ++k) {
      row[k] = numerator_of(m.at(t, k)) * (common / denominator_of(m.at(t, k)));
      total += row[k];
    }
    rows.totals[t] = total;
  }
  return rows;
}

template <typename I>
std::vector<std::uint64_t> sweep_range(const std::vector<std::vector<I>>& rows,
                                       const std::vector<I>& totals, std::size_t message_count,
                                       std::uint64_t begin, std::uint64_t end) {
  std::vector<std::uint64_t> found;
  const I k_count = static_cast<I>(message_count);
  for (std::uint64_t mask = begin; mask < end; ++mask) {
    const I subset_size = static_cast<I>(std::popcount(mask));
    bool ok = true;
    for (std::size_t t = 0; t < rows.size() && ok; ++t) {
      I sum = 0;
      for (std::uint64_t bits = mask; bits; bits &= bits - 1)
        sum += rows[t][static_cast<std::size_t>(std::countr_zero(bits))];
      ok = k_count * sum == subset_size * totals[t];
    }
    if (ok) found.push_back(mask);
  }
  return found;
}

template <typename I>
std::vector<std::uint64_t> sweep_all(const std::vector<std::vector<I>>& rows,
                                     const std::vector<I>& totals, std::size_t message_count,
                                     unsigned threads) {
  const std::uint64_t total_masks = std::uint64_t{1} << message_count;
  if (threads <= 1 || total_masks < (std::uint64_t{1} << 16))
    return sweep_range(rows, totals, message_count, 1, total_masks);

  const std::uint64_t chunk = (total_masks + threads - 1) / threads;
  std::vector<std::vector<std::uint64_t>> partial(threads);
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < threads; ++w) {
    const std::uint64_t begin = std::max<std::uint64_t>(1, w * chunk);
    const std::uint64_t end = std::min(total_masks, (w + 1) * chunk);
    if (begin >= end) continue;
    workers.emplace_back([&, w, begin, end] {
      partial[w] = sweep_range(rows, totals, message_count, begin, end);
    });
  }
  for (auto& t : workers) t.join();
  std::vector<std::uint64_t> found;
  for (auto& p : partial) found.insert(found.end(), p.begin(), p.end());
  return found;
}

// Catalog order: size first, then the sorted member sequences compared
// lexicographically.
bool mask_less(std::uint64_t a, std::uint64_t b) {
  const int pa = std::popcount(a), pb = std::popcount(b);
  if (pa != pb) return pa < pb;
  while (a && b) {
    const int la = std::countr_zero(a), lb = std::countr_zero(b);
    if (la != lb) return la < lb;
    a &= a - 1;
    b &= b - 1;
  }
  return false;  // equal size and equal prefix means identical masks
}

}  // namespace

ValidSubsetCatalog enumerate_valid_subsets(const CharMatrix& m, std::size_t max_message_count,
                                           unsigned threads) {
  const std::size_t message_count = m.message_count();
  if (message_count > max_message_count)
    throw TooLargeError("K = " + std::to_string(message_count) +
                        " exceeds the enumeration cap of " + std::to_string(max_message_count) +
                        "; use a grouping or full-download plan");
  if (message_count >= 63) throw TooLargeError("subset enumeration requires K < 63");

  IntRows rows = integer_rows(m);

  // A word-sized row table suffices when K * row_total cannot overflow.
  bool fits = true;
  const Int limit = Int(std::numeric_limits<std::int64_t>::max()) / Int(message_count + 1);
  for (const auto& total : rows.totals)
    if (total > limit) fits = false;

  std::vector<std::uint64_t> masks;
  if (fits) {
    std::vector<std::vector<std::int64_t>> small(rows.values.size());
    std::vector<std::int64_t> small_totals(rows.totals.size());
    for (std::size_t t = 0; t < rows.values.size(); ++t) {
      small[t].resize(message_count);
      for (std::size_t k = 0; k < message_count; ++k)
        small[t][k] = rows.values[t][k].convert_to<std::int64_t>();
      small_totals[t] = rows.totals[t].convert_to<std::int64_t>();
    }
    masks = sweep_all(small, small_totals, message_count, threads);
  } else {
    masks = sweep_all(rows.values, rows.totals, message_count, threads);
  }

  std::sort(masks.begin(), masks.end(), mask_less);

  // Complement closure: q valid and proper implies [1..K] \ q valid.
  const std::uint64_t full = (std::uint64_t{1} << message_count) - 1;
  std::unordered_set<std::uint64_t> present(masks.begin(), masks.end());
  if (!present.count(full)) throw std::logic_error("full set missing from valid-subset catalog");
  for (auto mask : masks) {
    if (mask != full && !present.count(full & ~mask))
      throw std::logic_error("valid-subset catalog is not complement-closed");
  }

  ValidSubsetCatalog catalog;
  catalog.message_count = message_count;
  catalog.masks = std::move(masks);
  catalog.subsets.reserve(catalog.masks.size());
  for (auto mask : catalog.masks)
    catalog.subsets.push_back(QuerySet::from_mask(message_count, mask));
  return catalog;
}

}  // namespace lvpir
