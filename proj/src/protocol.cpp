#include "lvpir/protocol.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace lvpir {

Database Database::create(std::size_t message_count, std::size_t message_bits,
                          std::vector<std::vector<std::uint8_t>> messages) {
  if (message_count < 1) throw ShapeError("database needs at least one message");
  if (message_bits < 8 || message_bits % 8 != 0)
    throw ShapeError("message size must be a positive multiple of 8 bits");
  if (messages.size() != message_count)
    throw ShapeError("database holds " + std::to_string(messages.size()) + " messages, header says " +
                     std::to_string(message_count));
  for (const auto& msg : messages)
    if (msg.size() != message_bits / 8)
      throw ShapeError("message payload size does not match declared L_bits");
  Database db;
  db.message_count = message_count;
  db.message_bits = message_bits;
  db.messages = std::move(messages);
  return db;
}

Database Database::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open database file '" + path + "'");
  std::string header;
  if (!std::getline(in, header)) throw ParseError("missing database header");
  std::istringstream hs(header);
  std::size_t message_count = 0, message_bits = 0;
  if (!(hs >> message_count >> message_bits))
    throw ParseError("malformed database header, expected 'K L_bits'");
  std::string rest;
  if (hs >> rest) throw ParseError("trailing tokens in database header");
  if (message_bits < 8 || message_bits % 8 != 0)
    throw ShapeError("L_bits must be a positive multiple of 8");

  const std::size_t bytes_per_message = message_bits / 8;
  std::vector<std::vector<std::uint8_t>> messages(message_count);
  for (auto& msg : messages) {
    msg.resize(bytes_per_message);
    in.read(reinterpret_cast<char*>(msg.data()), static_cast<std::streamsize>(bytes_per_message));
    if (static_cast<std::size_t>(in.gcount()) != bytes_per_message)
      throw ShapeError("database file truncated");
  }
  if (in.peek() != std::ifstream::traits_type::eof())
    throw ShapeError("database file has trailing bytes");
  return create(message_count, message_bits, std::move(messages));
}

void Database::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write database file '" + path + "'");
  out << message_count << " " << message_bits << "\n";
  for (const auto& msg : messages)
    out.write(reinterpret_cast<const char*>(msg.data()), static_cast<std::streamsize>(msg.size()));
}

QuerySet sample_query(const SchemePlan& plan, std::uint32_t theta, SplitMix64& rng) {
  if (theta < 1 || theta > plan.message_count)
    throw IndexError("theta " + std::to_string(theta) + " outside [1.." +
                     std::to_string(plan.message_count) + "]");
  switch (plan.kind) {
    case PlanKind::FullDownload:
      return QuerySet::full(plan.message_count);
    case PlanKind::Partition:
      return plan.block_containing(theta);
    case PlanKind::Grouping: {
      std::vector<std::uint32_t> members;
      for (std::size_t p = 0; p < plan.groups.size(); ++p) {
        const auto& group = plan.groups[p];
        const std::size_t picks = plan.picks[p];
        if (group.contains(theta)) {
          std::vector<std::uint32_t> others;
          for (auto i : group.members())
            if (i != theta) others.push_back(i);
          members.push_back(theta);
          auto extra = sample_subset(rng, std::move(others), picks - 1);
          members.insert(members.end(), extra.begin(), extra.end());
        } else {
          auto picked = sample_subset(rng, group.members(), picks);
          members.insert(members.end(), picked.begin(), picked.end());
        }
      }
      return QuerySet(plan.message_count, std::move(members));
    }
  }
  throw std::logic_error("unknown plan kind");
}

Answer answer_query(const Database& db, const QuerySet& query) {
  if (query.message_count() != db.message_count)
    throw IndexError("query universe does not match database size");
  Answer answer;
  answer.message_bits = db.message_bits;
  answer.payloads.reserve(query.size());
  for (auto i : query.members()) answer.payloads.push_back(db.messages[i - 1]);
  return answer;
}

std::vector<std::uint8_t> decode_answer(const Answer& answer, const QuerySet& query,
                                        std::uint32_t theta) {
  const auto& members = query.members();
  const auto it = std::lower_bound(members.begin(), members.end(), theta);
  if (it == members.end() || *it != theta)
    throw NotInQueryError("requested index " + std::to_string(theta) + " is not in the query");
  const auto position = static_cast<std::size_t>(it - members.begin());
  if (answer.payloads.size() != members.size())
    throw ShapeError("answer entry count does not match query size");
  return answer.payloads[position];
}

namespace {

constexpr std::uint32_t kRequestMagic = 0x4C565049;   // "LVPI"
constexpr std::uint32_t kResponseMagic = 0x4C565052;  // "LVPR"
constexpr std::uint8_t kVersion = 1;
constexpr std::uint8_t kErrorByte = 0xEE;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

struct Reader {
  std::span<const std::uint8_t> data;
  std::size_t pos = 0;

  bool need(std::size_t n) const { return pos + n <= data.size(); }
  std::uint8_t u8() { return data[pos++]; }
  std::uint16_t u16() {
    std::uint16_t v = static_cast<std::uint16_t>(data[pos] << 8 | data[pos + 1]);
    pos += 2;
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v = (std::uint32_t{data[pos]} << 24) | (std::uint32_t{data[pos + 1]} << 16) |
                      (std::uint32_t{data[pos + 2]} << 8) | std::uint32_t{data[pos + 3]};
    pos += 4;
    return v;
  }
};

}  // namespace

std::vector<std::uint8_t> encode_request(const QuerySet& query) {
  if (query.size() > 0xFFFF) throw TooLargeError("query does not fit a u16 count");
  std::vector<std::uint8_t> frame;
  frame.reserve(7 + 4 * query.size());
  put_u32(frame, kRequestMagic);
  frame.push_back(kVersion);
  put_u16(frame, static_cast<std::uint16_t>(query.size()));
  for (auto i : query.members()) put_u32(frame, i);
  return frame;
}

QuerySet decode_request(std::span<const std::uint8_t> frame, std::size_t message_count) {
  Reader r{frame};
  if (!r.need(7)) throw WireError(WireReason::Truncated, "request frame too short");
  if (r.u32() != kRequestMagic) throw WireError(WireReason::BadMagic, "bad request magic");
  if (r.u8() != kVersion) throw WireError(WireReason::BadVersion, "unsupported version");
  const std::uint16_t count = r.u16();
  if (count == 0) throw WireError(WireReason::BadCount, "empty query");
  if (!r.need(std::size_t{4} * count))
    throw WireError(WireReason::Truncated, "request frame shorter than its count");
  std::vector<std::uint32_t> members;
  members.reserve(count);
  std::uint32_t previous = 0;
  for (std::uint16_t i = 0; i < count; ++i) {
    const std::uint32_t index = r.u32();
    if (index <= previous) throw WireError(WireReason::NonAscending, "indices not strictly ascending");
    if (index > message_count)
      throw WireError(WireReason::IndexOutOfRange, "index " + std::to_string(index) + " > K");
    members.push_back(index);
    previous = index;
  }
  if (r.pos != frame.size()) throw WireError(WireReason::TrailingBytes, "trailing bytes after request");
  return QuerySet(message_count, std::move(members));
}

std::vector<std::uint8_t> encode_response(const Answer& answer) {
  if (answer.payloads.size() > 0xFFFF) throw TooLargeError("answer does not fit a u16 count");
  std::vector<std::uint8_t> frame;
  frame.reserve(11 + answer.payloads.size() * (answer.message_bits / 8));
  put_u32(frame, kResponseMagic);
  frame.push_back(kVersion);
  put_u16(frame, static_cast<std::uint16_t>(answer.payloads.size()));
  put_u32(frame, static_cast<std::uint32_t>(answer.message_bits));
  for (const auto& payload : answer.payloads)
    frame.insert(frame.end(), payload.begin(), payload.end());
  return frame;
}

Answer decode_response(std::span<const std::uint8_t> frame) {
  if (is_error_frame(frame)) {
    const auto reason = frame.size() >= 2 ? static_cast<WireReason>(frame[1]) : WireReason::Truncated;
    throw WireError(reason, "server rejected the request (reason " +
                                std::to_string(static_cast<int>(reason)) + ")");
  }
  Reader r{frame};
  if (!r.need(11)) throw WireError(WireReason::Truncated, "response frame too short");
  if (r.u32() != kResponseMagic) throw WireError(WireReason::BadMagic, "bad response magic");
  if (r.u8() != kVersion) throw WireError(WireReason::BadVersion, "unsupported version");
  const std::uint16_t count = r.u16();
  const std::uint32_t message_bits = r.u32();
  if (message_bits < 8 || message_bits % 8 != 0)
    throw WireError(WireReason::BadCount, "bad L_bits in response");
  const std::size_t bytes_per_message = message_bits / 8;
  if (!r.need(std::size_t{count} * bytes_per_message))
    throw WireError(WireReason::Truncated, "response frame shorter than its count");
  Answer answer;
  answer.message_bits = message_bits;
  answer.payloads.resize(count);
  for (auto& payload : answer.payloads) {
    payload.assign(frame.begin() + static_cast<std::ptrdiff_t>(r.pos),
                   frame.begin() + static_cast<std::ptrdiff_t>(r.pos + bytes_per_message));
    r.pos += bytes_per_message;
  }
  if (r.pos != frame.size())
    throw WireError(WireReason::TrailingBytes, "trailing bytes after response");
  return answer;
}

std::vector<std::uint8_t> error_frame(WireReason reason) {
  return {kErrorByte, static_cast<std::uint8_t>(reason)};
}

bool is_error_frame(std::span<const std::uint8_t> frame) {
  return !frame.empty() && frame[0] == kErrorByte;
}

std::vector<std::uint8_t> DatabaseServer::handle(std::span<const std::uint8_t> request) const {
  try {
    QuerySet query = decode_request(request, db_->message_count);
    return encode_response(answer_query(*db_, query));
  } catch (const WireError& e) {
    return error_frame(e.reason);
  } catch (const Error&) {
    return error_frame(WireReason::BadCount);
  }
}

RetrievalTranscript retrieve(const Database& db, const SchemePlan& plan, std::uint32_t theta,
                             std::uint64_t seed) {
  if (plan.message_count != db.message_count)
    throw ShapeError("plan and database disagree on K");
  SplitMix64 rng(seed);
  QuerySet query = sample_query(plan, theta, rng);

  DatabaseServer server(db);
  const auto request = encode_request(query);
  const auto response = server.handle(request);
  Answer answer = decode_response(response);

  RetrievalTranscript transcript{theta, query, answer.total_bits(),
                                 decode_answer(answer, query, theta), seed};
  return transcript;
}

CostMeasurement measure_average_cost(const Database& db, const SchemePlan& plan,
                                     std::uint64_t trials, std::uint64_t seed,
                                     const std::function<void(const RetrievalTranscript&)>&
                                         on_transcript) {
  if (trials < 1) throw ShapeError("need at least one trial");
  SplitMix64 master(seed);
  Int total_bits = 0;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    const auto theta = static_cast<std::uint32_t>(1 + master.below(db.message_count));
    const std::uint64_t trial_seed = master.next();
    RetrievalTranscript transcript = retrieve(db, plan, theta, trial_seed);
    total_bits += transcript.answer_bits;
    if (on_transcript) on_transcript(transcript);
  }
  CostMeasurement result;
  result.trials = trials;
  result.mean_bits = make_rational(total_bits, Int(trials));
  result.expected_bits = cost_of_plan(plan).average * Int(db.message_bits);
  return result;
}

}  // namespace lvpir
