#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>

#include "fixtures.hpp"
#include "lvpir/errors.hpp"
#include "lvpir/protocol.hpp"

using namespace lvpir;

namespace {

Database make_db(std::size_t message_count, std::size_t message_bits, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<std::vector<std::uint8_t>> messages(message_count);
  for (auto& msg : messages) {
    msg.resize(message_bits / 8);
    for (auto& byte : msg) byte = static_cast<std::uint8_t>(rng.below(256));
  }
  return Database::create(message_count, message_bits, std::move(messages));
}

SchemePlan example1_plan() {
  return SchemePlan::partition(3, {QuerySet(3, {1, 2}), QuerySet(3, {3})});
}

SchemePlan example2_plan() {
  return SchemePlan::grouping(6, {QuerySet(6, {1, 2, 3, 4}), QuerySet(6, {5, 6})}, 2);
}

}  // namespace

TEST_SUITE("protocol") {

TEST_CASE("database file round trip") {
  Database db = make_db(3, 16, 99);
  const auto path = std::filesystem::temp_directory_path() / "lvpir_test_db.bin";
  db.save_file(path.string());
  Database loaded = Database::load_file(path.string());
  CHECK(loaded.message_count == 3);
  CHECK(loaded.message_bits == 16);
  CHECK(loaded.messages == db.messages);
  std::filesystem::remove(path);
}

TEST_CASE("database validation") {
  CHECK_THROWS_AS(Database::create(1, 12, {{0}}), ShapeError);     // not a byte multiple
  CHECK_THROWS_AS(Database::create(2, 8, {{0}}), ShapeError);      // wrong message count
  CHECK_THROWS_AS(Database::create(1, 8, {{0, 1}}), ShapeError);   // payload too long
}

TEST_CASE("partition queries are deterministic") {
  SchemePlan plan = example1_plan();
  SplitMix64 rng(1);
  CHECK(sample_query(plan, 3, rng) == QuerySet(3, {3}));
  CHECK(sample_query(plan, 1, rng) == QuerySet(3, {1, 2}));
  CHECK(sample_query(plan, 2, rng) == QuerySet(3, {1, 2}));
  CHECK_THROWS_AS(sample_query(plan, 4, rng), IndexError);
  CHECK_THROWS_AS(sample_query(plan, 0, rng), IndexError);
}

TEST_CASE("full-download queries everything") {
  SchemePlan plan = SchemePlan::full_download(5);
  SplitMix64 rng(1);
  CHECK(sample_query(plan, 2, rng) == QuerySet::full(5));
}

TEST_CASE("grouping queries contain theta and honor the pick sizes") {
  SchemePlan plan = example2_plan();
  SplitMix64 rng(42);
  for (std::uint32_t theta = 1; theta <= 6; ++theta) {
    for (int i = 0; i < 50; ++i) {
      QuerySet q = sample_query(plan, theta, rng);
      CHECK(q.contains(theta));
      CHECK(q.size() == 3);
      std::size_t in_first = 0, in_second = 0;
      for (auto idx : q.members()) (idx <= 4 ? in_first : in_second)++;
      CHECK(in_first == 2);
      CHECK(in_second == 1);
    }
  }
}

TEST_CASE("grouping sampler is uniform over its realizations") {
  // theta = 1: one of 3 partners in the first group times one of 2 choices
  // in the second group = 6 equally likely queries.
  SchemePlan plan = example2_plan();
  SplitMix64 rng(7);
  std::map<std::vector<std::uint32_t>, int> counts;
  const int trials = 60000;
  for (int i = 0; i < trials; ++i) counts[sample_query(plan, 1, rng).members()]++;
  REQUIRE(counts.size() == 6);
  for (const auto& [members, count] : counts) {
    // 5 sigma around trials/6 for a binomial(trials, 1/6)
    const double expected = trials / 6.0;
    const double sigma = std::sqrt(trials * (1.0 / 6.0) * (5.0 / 6.0));
    CHECK(std::abs(count - expected) < 5 * sigma);
  }
}

TEST_CASE("same seed, same query") {
  SchemePlan plan = example2_plan();
  SplitMix64 a(123), b(123);
  CHECK(sample_query(plan, 2, a) == sample_query(plan, 2, b));
}

TEST_CASE("answers are ascending payload copies") {
  Database db = make_db(3, 8, 5);
  Answer ans = answer_query(db, QuerySet(3, {1, 3}));
  CHECK(ans.total_bits() == 16);
  CHECK(ans.payloads[0] == db.messages[0]);
  CHECK(ans.payloads[1] == db.messages[2]);

  Answer whole = answer_query(db, QuerySet::full(3));
  CHECK(whole.total_bits() == 3 * 8);

  CHECK_THROWS_AS(answer_query(db, QuerySet(4, {4})), IndexError);
}

TEST_CASE("decode picks theta's payload") {
  Database db = make_db(3, 8, 6);
  QuerySet q(3, {1, 3});
  Answer ans = answer_query(db, q);
  CHECK(decode_answer(ans, q, 3) == db.messages[2]);
  CHECK(decode_answer(ans, q, 1) == db.messages[0]);
  CHECK_THROWS_AS(decode_answer(ans, q, 2), NotInQueryError);
}

TEST_CASE("request frames round trip") {
  QuerySet q(6, {1, 2, 5});
  auto frame = encode_request(q);
  CHECK(frame.size() == 7 + 3 * 4);
  CHECK(frame[0] == 0x4C);  // 'L'
  CHECK(frame[1] == 0x56);  // 'V'
  CHECK(frame[2] == 0x50);  // 'P'
  CHECK(frame[3] == 0x49);  // 'I'
  CHECK(decode_request(frame, 6) == q);
}

TEST_CASE("malformed request frames are rejected with reasons") {
  Database db = make_db(6, 8, 7);
  DatabaseServer server(db);
  auto good = encode_request(QuerySet(6, {2, 4}));

  auto expect_reason = [&](std::vector<std::uint8_t> frame, WireReason reason) {
    auto reply = server.handle(frame);
    REQUIRE(is_error_frame(reply));
    REQUIRE(reply.size() == 2);
    CHECK(reply[1] == static_cast<std::uint8_t>(reason));
  };

  auto bad_magic = good;
  bad_magic[0] = 0xFF;
  expect_reason(bad_magic, WireReason::BadMagic);

  auto bad_version = good;
  bad_version[4] = 9;
  expect_reason(bad_version, WireReason::BadVersion);

  auto truncated = good;
  truncated.resize(9);
  expect_reason(truncated, WireReason::Truncated);

  auto trailing = good;
  trailing.push_back(0);
  expect_reason(trailing, WireReason::TrailingBytes);

  expect_reason(encode_request(QuerySet(9, {7, 9})), WireReason::IndexOutOfRange);

  auto descending = encode_request(QuerySet(6, {2, 4}));
  std::swap(descending[10], descending[14]);  // low bytes of the two indices
  expect_reason(descending, WireReason::NonAscending);

  auto empty_count = good;
  empty_count.resize(7);
  empty_count[5] = empty_count[6] = 0;
  expect_reason(empty_count, WireReason::BadCount);
}

TEST_CASE("server answers well-formed requests") {
  Database db = make_db(6, 8, 8);
  DatabaseServer server(db);
  QuerySet q(6, {1, 6});
  auto reply = server.handle(encode_request(q));
  REQUIRE_FALSE(is_error_frame(reply));
  Answer ans = decode_response(reply);
  CHECK(ans.message_bits == 8);
  CHECK(ans.payloads.size() == 2);
  CHECK(ans.payloads[1] == db.messages[5]);
}

TEST_CASE("decoding an error frame raises the server's reason") {
  auto frame = error_frame(WireReason::NonAscending);
  try {
    decode_response(frame);
    FAIL("expected WireError");
  } catch (const WireError& e) {
    CHECK(e.reason == WireReason::NonAscending);
  }
}

TEST_CASE("retrieval decodes the stored message and accounts bits") {
  Database db = make_db(3, 8, 9);
  SchemePlan plan = example1_plan();
  RetrievalTranscript t3 = retrieve(db, plan, 3, 1234);
  CHECK(t3.answer_bits == 8);
  CHECK(t3.decoded == db.messages[2]);
  RetrievalTranscript t1 = retrieve(db, plan, 1, 1234);
  CHECK(t1.answer_bits == 16);
  CHECK(t1.decoded == db.messages[0]);

  Database db2 = make_db(6, 8, 10);
  SchemePlan grouping = example2_plan();
  for (std::uint32_t theta = 1; theta <= 6; ++theta) {
    RetrievalTranscript t = retrieve(db2, grouping, theta, 777 + theta);
    CHECK(t.answer_bits == 24);
    CHECK(t.decoded == db2.messages[theta - 1]);
    CHECK(t.seed == 777 + theta);
  }
}

TEST_CASE("transcripts replay from their seed") {
  Database db = make_db(6, 8, 11);
  SchemePlan plan = example2_plan();
  RetrievalTranscript a = retrieve(db, plan, 4, 2024);
  RetrievalTranscript b = retrieve(db, plan, 4, 2024);
  CHECK(a.query == b.query);
  CHECK(a.decoded == b.decoded);
}

TEST_CASE("measured cost matches the exact expectation") {
  Database db = make_db(3, 8, 12);
  SchemePlan plan = example1_plan();
  CostMeasurement m = measure_average_cost(db, plan, 3000, 555);
  CHECK(m.expected_bits == make_rational(40, 3));  // (5/3) * 8
  // empirical mean within 3 sigma of 40/3 (binomial between 8 and 16 bits)
  const double mean = rational_to_double(m.mean_bits);
  const double sigma = 8.0 * std::sqrt(2.0 / 9.0) / std::sqrt(3000.0);
  CHECK(std::abs(mean - 40.0 / 3.0) < 3 * sigma);
}

TEST_CASE("full download has zero variance") {
  Database db = make_db(4, 8, 13);
  CostMeasurement m = measure_average_cost(db, SchemePlan::full_download(4), 50, 1);
  CHECK(m.mean_bits == 32);
  CHECK(m.expected_bits == 32);
}

}  // TEST_SUITE
