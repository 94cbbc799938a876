#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lvpir/errors.hpp"
#include "lvpir/planner.hpp"
#include "lvpir/rng.hpp"

namespace lvpir {

/// K opaque messages of L bits each (L a multiple of 8), immutable after
/// load and shareable read-only.
struct Database {
  std::size_t message_count = 0;
  std::size_t message_bits = 0;
  std::vector<std::vector<std::uint8_t>> messages;

  static Database create(std::size_t message_count, std::size_t message_bits,
                         std::vector<std::vector<std::uint8_t>> messages);
  // File layout: ASCII line "K L_bits\n" then the K message payloads
  // concatenated raw.
  static Database load_file(const std::string& path);
  void save_file(const std::string& path) const;
};

/// The server's reply: the payloads of the queried indices in ascending
/// index order. A deterministic function of (query, messages).
struct Answer {
  std::size_t message_bits = 0;
  std::vector<std::vector<std::uint8_t>> payloads;

  std::size_t total_bits() const { return payloads.size() * message_bits; }
};

struct RetrievalTranscript {
  std::uint32_t theta = 0;
  QuerySet query;
  std::size_t answer_bits = 0;
  std::vector<std::uint8_t> decoded;
  std::uint64_t seed = 0;
};

// The query for the requested index under the plan. Partition and full
// plans are deterministic; grouping plans draw uniform in-group subsets
// that always include theta. Throws IndexError for theta outside [1..K].
QuerySet sample_query(const SchemePlan& plan, std::uint32_t theta, SplitMix64& rng);

Answer answer_query(const Database& db, const QuerySet& query);

// The payload at theta's position in the ascending query order. Throws
// NotInQueryError when theta was not queried.
std::vector<std::uint8_t> decode_answer(const Answer& answer, const QuerySet& query,
                                        std::uint32_t theta);

// One full round trip through the wire format: sample, frame, serve,
// unframe, decode. Reproducible from (plan, theta, seed).
RetrievalTranscript retrieve(const Database& db, const SchemePlan& plan, std::uint32_t theta,
                             std::uint64_t seed);

struct CostMeasurement {
  std::uint64_t trials = 0;
  Rational mean_bits;      // empirical average over the trials
  Rational expected_bits;  // exact expectation from the plan's cost report
};

// Runs `trials` retrievals with theta uniform on [1..K]; trial seeds are
// derived from the master seed so reruns are identical.
CostMeasurement measure_average_cost(const Database& db, const SchemePlan& plan,
                                     std::uint64_t trials, std::uint64_t seed,
                                     const std::function<void(const RetrievalTranscript&)>&
                                         on_transcript = nullptr);

// Wire format, big-endian.
//   Request:  0x4C565049 "LVPI" | version u8 = 1 | count u16
//             | count x u32 1-based indices, strictly ascending
//   Response: 0x4C565052 "LVPR" | version u8 = 1 | count u16 | L_bits u32
//             | payloads concatenated in request order
//   Error:    0xEE | reason u8
enum class WireReason : std::uint8_t {
  BadMagic = 1,
  BadVersion = 2,
  Truncated = 3,
  BadCount = 4,
  NonAscending = 5,
  IndexOutOfRange = 6,
  TrailingBytes = 7,
};

struct WireError : Error {
  WireReason reason;
  WireError(WireReason r, const std::string& message) : Error(message), reason(r) {}
};

std::vector<std::uint8_t> encode_request(const QuerySet& query);
QuerySet decode_request(std::span<const std::uint8_t> frame, std::size_t message_count);
std::vector<std::uint8_t> encode_response(const Answer& answer);
Answer decode_response(std::span<const std::uint8_t> frame);
std::vector<std::uint8_t> error_frame(WireReason reason);
bool is_error_frame(std::span<const std::uint8_t> frame);

/// Stateless per-request server: answers well-formed requests, returns an
/// error frame for malformed ones. Never throws on bad input.
class DatabaseServer {
 public:
  explicit DatabaseServer(const Database& db) : db_(&db) {}
  std::vector<std::uint8_t> handle(std::span<const std::uint8_t> request) const;

 private:
  const Database* db_;
};

}  // namespace lvpir
