#include <doctest.h>

#include "fixtures.hpp"
#include "lvpir/serialize.hpp"

using namespace lvpir;

TEST_SUITE("serialize") {

TEST_CASE("rational JSON") {
  Json j = rational_to_json(make_rational(5, 3));
  CHECK(j.dump() == R"({"den":3,"num":5})");
  CHECK(rational_from_json(j) == make_rational(5, 3));

  // values beyond int64 survive as strings
  Rational huge = make_rational(Int("123456789012345678901234567890"), Int(7));
  CHECK(rational_from_json(rational_to_json(huge)) == huge);
}

TEST_CASE("plan JSON forms") {
  SchemePlan partition = SchemePlan::partition(3, {QuerySet(3, {1, 2}), QuerySet(3, {3})});
  CHECK(plan_to_json(partition).dump() == R"({"blocks":[[1,2],[3]],"kind":"partition"})");

  SchemePlan grouping =
      SchemePlan::grouping(6, {QuerySet(6, {1, 2, 3, 4}), QuerySet(6, {5, 6})}, 2);
  CHECK(plan_to_json(grouping).dump() ==
        R"({"groups":[[1,2,3,4],[5,6]],"kind":"grouping","picks":[2,1],"rho":2})");

  CHECK(plan_to_json(SchemePlan::full_download(9)).dump() == R"({"kind":"full"})");
}

TEST_CASE("plan JSON round trips") {
  SchemePlan partition = SchemePlan::partition(3, {QuerySet(3, {1, 2}), QuerySet(3, {3})});
  CHECK(plan_from_json(plan_to_json(partition), 3) == partition);

  SchemePlan grouping =
      SchemePlan::grouping(6, {QuerySet(6, {1, 2, 3, 4}), QuerySet(6, {5, 6})}, 2);
  CHECK(plan_from_json(plan_to_json(grouping), 6) == grouping);

  CHECK(plan_from_json(plan_to_json(SchemePlan::full_download(4)), 4) ==
        SchemePlan::full_download(4));
}

TEST_CASE("plan JSON validation") {
  CHECK_THROWS_AS(plan_from_json(Json{{"kind", "nonsense"}}, 3), ParseError);
  // blocks must cover [1..K]
  CHECK_THROWS_AS(plan_from_json(Json::parse(R"({"kind":"partition","blocks":[[1,2]]})"), 3),
                  ShapeError);
  // picks must match rho
  CHECK_THROWS_AS(
      plan_from_json(
          Json::parse(R"({"kind":"grouping","groups":[[1,2],[3,4]],"rho":2,"picks":[2,1]})"), 4),
      ParseError);
}

TEST_CASE("catalog JSON uses 1-based canonical order") {
  ValidSubsetCatalog catalog = enumerate_valid_subsets(fixtures::example1());
  CHECK(catalog_to_json(catalog).dump() == R"({"K":3,"subsets":[[3],[1,2],[1,2,3]]})");
}

TEST_CASE("plans serialize byte-identically across separate computations") {
  CharMatrix m = fixtures::example3();
  auto first = plan_best(m);
  auto second = plan_best(m);
  CHECK(plan_to_json(first.plan).dump() == plan_to_json(second.plan).dump());
  CHECK(cost_to_json(first.cost).dump() == cost_to_json(second.cost).dump());
}

TEST_CASE("transcript JSON is stable") {
  RetrievalTranscript t{2, QuerySet(3, {1, 2}), 16, {0xAB, 0x01}, 77};
  CHECK(transcript_to_json(t).dump() ==
        R"({"answer_bits":16,"decoded":"ab01","query":[1,2],"seed":77,"theta":2})");
}

}  // TEST_SUITE
