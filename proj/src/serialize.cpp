#include "lvpir/serialize.hpp"

#include <fstream>
#include <limits>

#include "lvpir/errors.hpp"

namespace lvpir {

namespace {

Json int_to_json(const Int& value) {
  static const Int kMin = Int(std::numeric_limits<std::int64_t>::min());
  static const Int kMax = Int(std::numeric_limits<std::int64_t>::max());
  if (value >= kMin && value <= kMax) return value.convert_to<std::int64_t>();
  return value.str();
}

Int int_from_json(const Json& j) {
  if (j.is_number_integer()) return Int(j.get<std::int64_t>());
  if (j.is_string()) return Int(j.get<std::string>());
  throw ParseError("expected integer or integer string in JSON");
}

std::vector<std::uint32_t> members_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("expected an index array");
  std::vector<std::uint32_t> members;
  for (const auto& v : j) members.push_back(v.get<std::uint32_t>());
  return members;
}

std::string to_hex(const std::vector<std::uint8_t>& bytes) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 0xF]);
  }
  return s;
}

}  // namespace

Json rational_to_json(const Rational& r) {
  return Json{{"num", int_to_json(numerator_of(r))}, {"den", int_to_json(denominator_of(r))}};
}

Rational rational_from_json(const Json& j) {
  return make_rational(int_from_json(j.at("num")), int_from_json(j.at("den")));
}

Json catalog_to_json(const ValidSubsetCatalog& catalog) {
  Json subsets = Json::array();
  for (const auto& q : catalog.subsets) subsets.push_back(q.members());
  return Json{{"K", catalog.message_count}, {"subsets", subsets}};
}

Json plan_to_json(const SchemePlan& plan) {
  switch (plan.kind) {
    case PlanKind::FullDownload:
      return Json{{"kind", "full"}};
    case PlanKind::Partition: {
      Json blocks = Json::array();
      for (const auto& b : plan.blocks) blocks.push_back(b.members());
      return Json{{"kind", "partition"}, {"blocks", blocks}};
    }
    case PlanKind::Grouping: {
      Json groups = Json::array();
      for (const auto& g : plan.groups) groups.push_back(g.members());
      return Json{{"kind", "grouping"}, {"groups", groups}, {"rho", plan.divisor},
                  {"picks", plan.picks}};
    }
  }
  throw std::logic_error("unknown plan kind");
}

SchemePlan plan_from_json(const Json& j, std::size_t message_count) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "full") return SchemePlan::full_download(message_count);
  if (kind == "partition") {
    std::vector<QuerySet> blocks;
    for (const auto& b : j.at("blocks")) blocks.emplace_back(message_count, members_from_json(b));
    return SchemePlan::partition(message_count, std::move(blocks));
  }
  if (kind == "grouping") {
    std::vector<QuerySet> groups;
    for (const auto& g : j.at("groups")) groups.emplace_back(message_count, members_from_json(g));
    const auto divisor = j.at("rho").get<std::uint64_t>();
    SchemePlan plan = SchemePlan::grouping(message_count, std::move(groups), divisor);
    if (j.contains("picks")) {
      const auto picks = j.at("picks").get<std::vector<std::uint64_t>>();
      if (picks != plan.picks) throw ParseError("plan picks are inconsistent with rho");
    }
    return plan;
  }
  throw ParseError("unknown plan kind '" + kind + "'");
}

SchemePlan load_plan_file(const std::string& path, std::size_t message_count) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open plan file '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ParseError("malformed plan JSON: " + std::string(e.what()));
  }
  return plan_from_json(j, message_count);
}

Json cost_to_json(const CostReport& cost) {
  Json per_message = Json::array();
  for (const auto& c : cost.per_message) per_message.push_back(rational_to_json(c));
  return Json{{"per_message", per_message}, {"average", rational_to_json(cost.average)}};
}

Json distribution_to_json(const LatentDistribution& d) {
  Json probs = Json::array();
  for (const auto& p : d.probs()) probs.push_back(rational_to_json(p));
  return probs;
}

Json audit_report_to_json(const AuditReport& report) {
  Json queries = Json::array();
  for (const auto& entry : report.per_query) {
    queries.push_back(Json{{"query", entry.query.members()},
                           {"probability", rational_to_json(entry.probability)},
                           {"posterior", distribution_to_json(entry.posterior)},
                           {"exact_match", entry.exact_match}});
  }
  return Json{{"mode", "exact"},
              {"prior", distribution_to_json(report.prior)},
              {"per_query", queries},
              {"verdict", report.pass ? "PASS" : "FAIL"},
              {"max_tv_distance", rational_to_json(report.max_tv_distance)},
              {"mutual_information_bits", report.mutual_information_bits}};
}

Json sampled_report_to_json(const SampledAuditReport& report) {
  Json groups = Json::array();
  for (const auto& g : report.groups) {
    groups.push_back(Json{{"key", g.key},
                          {"samples", g.samples},
                          {"latent_counts", g.latent_counts},
                          {"tested", g.tested},
                          {"p_value", g.p_value},
                          {"rejected", g.rejected}});
  }
  return Json{{"mode", "sampled"},
              {"trials", report.trials},
              {"alpha", report.alpha},
              {"fingerprinted", report.fingerprinted},
              {"groups_tested", report.groups_tested},
              {"groups", groups},
              {"verdict", report.pass ? "PASS" : "FAIL"}};
}

Json transcript_to_json(const RetrievalTranscript& transcript) {
  return Json{{"theta", transcript.theta},
              {"seed", transcript.seed},
              {"query", transcript.query.members()},
              {"answer_bits", transcript.answer_bits},
              {"decoded", to_hex(transcript.decoded)}};
}

}  // namespace lvpir
