#pragma once

#include <json.hpp>

#include "lvpir/audit.hpp"
#include "lvpir/protocol.hpp"

namespace lvpir {

using Json = nlohmann::json;

// {"num": n, "den": d}; values that fit int64 are emitted as JSON numbers,
// larger ones as decimal strings.
Json rational_to_json(const Rational& r);
Rational rational_from_json(const Json& j);

Json catalog_to_json(const ValidSubsetCatalog& catalog);

// {"kind":"partition","blocks":[[1,2],[3]]}
// {"kind":"grouping","groups":[[1,2,3,4],[5,6]],"rho":2,"picks":[2,1]}
// {"kind":"full"}
Json plan_to_json(const SchemePlan& plan);
// message_count resolves the "full" kind and validates the others.
SchemePlan plan_from_json(const Json& j, std::size_t message_count);
SchemePlan load_plan_file(const std::string& path, std::size_t message_count);

Json cost_to_json(const CostReport& cost);
Json distribution_to_json(const LatentDistribution& d);
Json audit_report_to_json(const AuditReport& report);
Json sampled_report_to_json(const SampledAuditReport& report);
Json transcript_to_json(const RetrievalTranscript& transcript);

}  // namespace lvpir
