#include <doctest.h>

#include <algorithm>

#include "corpus.hpp"
#include "fixtures.hpp"
#include "lvpir/errors.hpp"
#include "lvpir/privacy.hpp"
#include "oracles.hpp"

using namespace lvpir;

TEST_SUITE("privacy") {

TEST_CASE("mirrored matrix: balanced singleton and mirrored pair are private") {
  CharMatrix m = fixtures::example1();
  CHECK(is_private_subset(m, QuerySet(3, {3})));
  CHECK(is_private_subset(m, QuerySet(3, {1, 2})));
  CHECK_FALSE(is_private_subset(m, QuerySet(3, {1})));
  CHECK_FALSE(is_private_subset(m, QuerySet(3, {2})));
  CHECK_FALSE(is_private_subset(m, QuerySet(3, {1, 3})));
  CHECK(is_private_subset(m, QuerySet::full(3)));
}

TEST_CASE("distinct-column matrix: planted pairs are private") {
  CharMatrix m = fixtures::example3();
  CHECK(is_private_subset(m, QuerySet(4, {1, 2})));
  CHECK(is_private_subset(m, QuerySet(4, {3, 4})));
  CHECK_FALSE(is_private_subset(m, QuerySet(4, {1, 3})));
  CHECK_FALSE(is_private_subset(m, QuerySet(4, {1})));
}

TEST_CASE("full set is private for any matrix") {
  SplitMix64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const std::size_t message_count = 1 + rng.below(8);
    CharMatrix m = corpus::random_stochastic(1 + rng.below(4), message_count, rng);
    CHECK(is_private_subset(m, QuerySet::full(message_count)));
  }
}

TEST_CASE("catalog for the mirrored matrix") {
  ValidSubsetCatalog catalog = enumerate_valid_subsets(fixtures::example1());
  REQUIRE(catalog.subsets.size() == 3);
  CHECK(catalog.subsets[0] == QuerySet(3, {3}));
  CHECK(catalog.subsets[1] == QuerySet(3, {1, 2}));
  CHECK(catalog.subsets[2] == QuerySet(3, {1, 2, 3}));
}

TEST_CASE("full-column-rank catalog contains only the full set") {
  ValidSubsetCatalog catalog = enumerate_valid_subsets(fixtures::identity(4));
  REQUIRE(catalog.subsets.size() == 1);
  CHECK(catalog.subsets[0] == QuerySet::full(4));
}

TEST_CASE("identical columns admit every non-empty subset") {
  ValidSubsetCatalog catalog = enumerate_valid_subsets(fixtures::identical_columns(3, 4));
  CHECK(catalog.subsets.size() == 15);
}

TEST_CASE("enumeration cap") {
  CHECK_THROWS_AS(enumerate_valid_subsets(fixtures::identical_columns(2, 6), 5), TooLargeError);
}

TEST_CASE("catalog matches the direct-definition oracle") {
  SplitMix64 rng(17);
  std::vector<CharMatrix> instances;
  for (int i = 0; i < 8; ++i)
    instances.push_back(corpus::random_stochastic(2 + rng.below(3), 1 + rng.below(12), rng, 5));
  for (int i = 0; i < 4; ++i) instances.push_back(corpus::planted_groups(rng));
  for (int i = 0; i < 4; ++i) instances.push_back(corpus::planted_dependencies(rng));
  instances.push_back(fixtures::example1());
  instances.push_back(fixtures::example2());
  instances.push_back(fixtures::example3());

  for (const auto& m : instances) {
    const auto oracle = oracles::valid_mask_table(m);
    ValidSubsetCatalog catalog = enumerate_valid_subsets(m);
    // soundness
    for (auto mask : catalog.masks) CHECK(oracle[mask]);
    // completeness
    std::size_t oracle_count = 0;
    for (std::uint64_t mask = 1; mask < oracle.size(); ++mask)
      if (oracle[mask]) ++oracle_count;
    CHECK(catalog.subsets.size() == oracle_count);
  }
}

TEST_CASE("complement closure on random instances") {
  SplitMix64 rng(23);
  for (int i = 0; i < 10; ++i) {
    const std::size_t message_count = 2 + rng.below(7);
    CharMatrix m = corpus::random_stochastic(2 + rng.below(3), message_count, rng, 5);
    ValidSubsetCatalog catalog = enumerate_valid_subsets(m);
    const std::uint64_t full = (std::uint64_t{1} << message_count) - 1;
    for (auto mask : catalog.masks) {
      if (mask == full) continue;
      CHECK(catalog.contains_mask(full & ~mask));
    }
  }
}

TEST_CASE("relabeling messages permutes the catalog") {
  CharMatrix m = fixtures::example1();
  // swap columns 1 and 3
  CharMatrix swapped = parse_matrix("2 3\n0.5 0.9 0.1\n0.5 0.1 0.9\n");
  ValidSubsetCatalog catalog = enumerate_valid_subsets(swapped);
  REQUIRE(catalog.subsets.size() == 3);
  CHECK(catalog.subsets[0] == QuerySet(3, {1}));
  CHECK(catalog.subsets[1] == QuerySet(3, {2, 3}));
  CHECK(catalog.subsets[2] == QuerySet(3, {1, 2, 3}));
}

TEST_CASE("threaded sweep agrees with single-threaded") {
  // large enough to cross the threading threshold
  CharMatrix m = fixtures::identical_columns(2, 17);
  ValidSubsetCatalog single = enumerate_valid_subsets(m, 24, 1);
  ValidSubsetCatalog threaded = enumerate_valid_subsets(m, 24, 4);
  CHECK(single.masks == threaded.masks);
  CHECK(single.subsets.size() == (std::uint64_t{1} << 17) - 1);
}

}  // TEST_SUITE
