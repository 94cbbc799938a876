// lvpir: plan, audit and simulate single-database retrieval schemes that
// hide a latent attribute of the requested index.
//
// Exit codes: 0 success or audit PASS, 2 input/capability error, 3 audit FAIL.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>

#include "lvpir/serialize.hpp"

namespace {

using namespace lvpir;

struct RunConfig {
  std::string matrix_path;
  std::string db_path;
  std::string plan_path;
  std::string out_path;
  std::string transcripts_path;
  std::string scheme = "auto";
  std::string output = "text";
  std::uint64_t seed = 1;
  std::uint64_t trials = 1000;         // simulate
  std::uint64_t audit_trials = 100000; // sampled audit
  std::size_t enum_cap = kDefaultEnumCap;
  std::uint64_t max_enum = kDefaultMaxEnum;
  double alpha = 0.01;
  unsigned threads = 1;
};

void emit(const RunConfig& config, const Json& document, const std::string& text) {
  if (config.output == "json")
    std::cout << document.dump(2) << "\n";
  else
    std::cout << text;
}

PlanResult resolve_plan(const CharMatrix& matrix, const RunConfig& config) {
  if (!config.plan_path.empty()) {
    SchemePlan plan = load_plan_file(config.plan_path, matrix.message_count());
    return PlanResult{plan, cost_of_plan(plan)};
  }
  if (config.scheme == "auto")
    return plan_best(matrix, PlannerConfig{config.enum_cap, config.threads});
  if (config.scheme == "es") {
    auto catalog = enumerate_valid_subsets(matrix, config.enum_cap, config.threads);
    return solve_exhaustive(matrix, catalog);
  }
  if (config.scheme == "group") return plan_grouping(matrix);
  if (config.scheme == "full") {
    SchemePlan plan = SchemePlan::full_download(matrix.message_count());
    return PlanResult{plan, cost_of_plan(plan)};
  }
  throw Error("unknown scheme '" + config.scheme + "'");
}

std::string describe_plan(const PlanResult& result) {
  std::string text;
  switch (result.plan.kind) {
    case PlanKind::FullDownload:
      text = "plan: full download of all " + std::to_string(result.plan.message_count) +
             " messages\n";
      break;
    case PlanKind::Partition: {
      text = "plan: partition into " + std::to_string(result.plan.blocks.size()) + " blocks:";
      for (const auto& b : result.plan.blocks) text += " " + to_string(b);
      text += "\n";
      break;
    }
    case PlanKind::Grouping: {
      text = "plan: grouping with divisor " + std::to_string(result.plan.divisor) + ", groups:";
      for (std::size_t p = 0; p < result.plan.groups.size(); ++p)
        text += " " + to_string(result.plan.groups[p]) + " pick " +
                std::to_string(result.plan.picks[p]);
      text += "\n";
      break;
    }
  }
  text += "average cost: " + format_rational(result.cost.average) + " messages\n";
  return text;
}

int cmd_plan(const RunConfig& config) {
  CharMatrix matrix = load_matrix_file(config.matrix_path);
  PlanResult result = resolve_plan(matrix, config);
  Json document{{"K", matrix.message_count()},
                {"T", matrix.latent_count()},
                {"plan", plan_to_json(result.plan)},
                {"cost", cost_to_json(result.cost)}};
  emit(config, document, describe_plan(result));
  if (!config.out_path.empty()) {
    std::ofstream out(config.out_path);
    if (!out) throw Error("cannot write plan file '" + config.out_path + "'");
    out << plan_to_json(result.plan).dump(2) << "\n";
  }
  return 0;
}

int cmd_audit(const RunConfig& config) {
  CharMatrix matrix = load_matrix_file(config.matrix_path);
  PlanResult result = resolve_plan(matrix, config);
  try {
    AuditReport report = audit_exact(matrix, result.plan, config.max_enum);
    std::string text = "exact audit over " + std::to_string(report.per_query.size()) +
                       " query realizations: " + (report.pass ? "PASS" : "FAIL") + "\n";
    if (!report.pass)
      text += "max total-variation distance: " + format_rational(report.max_tv_distance) + "\n";
    emit(config, audit_report_to_json(report), text);
    return report.pass ? 0 : 3;
  } catch (const TooManyQueriesError&) {
    std::cerr << "too many realizations for the exact audit; sampling " << config.audit_trials
              << " trials\n";
    SampledAuditReport report = audit_sampled(matrix, result.plan, config.audit_trials,
                                              config.seed, config.alpha, config.threads);
    std::string text = "sampled audit, " + std::to_string(report.trials) + " trials, " +
                       std::to_string(report.groups_tested) +
                       " groups tested: " + (report.pass ? "PASS" : "FAIL") + "\n";
    emit(config, sampled_report_to_json(report), text);
    return report.pass ? 0 : 3;
  }
}

int cmd_simulate(const RunConfig& config) {
  CharMatrix matrix = load_matrix_file(config.matrix_path);
  Database db = Database::load_file(config.db_path);
  if (db.message_count != matrix.message_count())
    throw ShapeError("database and matrix disagree on K");
  PlanResult result = resolve_plan(matrix, config);

  std::optional<std::ofstream> transcripts;
  if (!config.transcripts_path.empty()) {
    transcripts.emplace(config.transcripts_path);
    if (!*transcripts)
      throw Error("cannot write transcripts file '" + config.transcripts_path + "'");
  }
  auto sink = [&](const RetrievalTranscript& t) {
    if (transcripts) *transcripts << transcript_to_json(t).dump() << "\n";
  };
  CostMeasurement measurement =
      measure_average_cost(db, result.plan, config.trials, config.seed, sink);

  Json document{{"K", db.message_count},
                {"L_bits", db.message_bits},
                {"plan", plan_to_json(result.plan)},
                {"trials", measurement.trials},
                {"seed", config.seed},
                {"mean_bits", rational_to_json(measurement.mean_bits)},
                {"expected_bits", rational_to_json(measurement.expected_bits)}};
  std::string text = "simulated " + std::to_string(measurement.trials) +
                     " retrievals: mean download " + format_rational(measurement.mean_bits) +
                     " bits, exact expectation " + format_rational(measurement.expected_bits) +
                     " bits\n";
  emit(config, document, text);
  return 0;
}

int cmd_check_matrix(const RunConfig& config) {
  CharMatrix matrix = load_matrix_file(config.matrix_path);
  const std::size_t rank = column_rank(matrix);
  auto groups = detect_groups(matrix);
  std::uint64_t divisor = 0;
  for (const auto& g : groups) divisor = std::gcd(divisor, static_cast<std::uint64_t>(g.size()));
  LatentDistribution prior = latent_prior(matrix);

  Json group_json = Json::array();
  Json sizes = Json::array();
  for (const auto& g : groups) {
    group_json.push_back(g.members());
    sizes.push_back(g.size());
  }
  Json document{{"T", matrix.latent_count()},
                {"K", matrix.message_count()},
                {"column_rank", rank},
                {"full_column_rank", rank == matrix.message_count()},
                {"groups", group_json},
                {"group_sizes", sizes},
                {"rho", divisor},
                {"prior", distribution_to_json(prior)}};

  std::string text = "T=" + std::to_string(matrix.latent_count()) +
                     " K=" + std::to_string(matrix.message_count()) +
                     " rank=" + std::to_string(rank) +
                     (rank == matrix.message_count() ? " (full column rank)" : "") + "\n";
  text += "groups:";
  for (const auto& g : groups) text += " " + to_string(g);
  text += "\nrho=" + std::to_string(divisor) + "\nprior:";
  for (const auto& p : prior.probs()) text += " " + format_fraction(p);
  text += "\n";
  emit(config, document, text);
  return 0;
}

void add_common_flags(CLI::App* cmd, RunConfig& config, bool with_matrix = true) {
  if (with_matrix)
    cmd->add_option("--matrix", config.matrix_path, "characteristic matrix file")->required();
  cmd->add_option("--output", config.output, "output format")
      ->check(CLI::IsMember({"text", "json"}));
  cmd->add_option("--threads", config.threads, "worker threads for enumeration/sampling");
}

void add_scheme_flags(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("--scheme", config.scheme, "planning strategy")
      ->check(CLI::IsMember({"auto", "es", "group", "full"}));
  cmd->add_option("--plan", config.plan_path, "use a previously saved plan JSON instead");
  cmd->add_option("--enum-cap", config.enum_cap, "max K for subset enumeration");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"latent-variable private information retrieval planner and simulator"};
  app.require_subcommand(1);
  RunConfig config;

  auto* plan = app.add_subcommand("plan", "compute a privacy-certified query plan");
  add_common_flags(plan, config);
  add_scheme_flags(plan, config);
  plan->add_option("--out", config.out_path, "write the plan JSON to this file");

  auto* audit = app.add_subcommand("audit", "verify that a plan leaks nothing about the latent variable");
  add_common_flags(audit, config);
  add_scheme_flags(audit, config);
  audit->add_option("--max-enum", config.max_enum, "realization cap for the exact audit");
  audit->add_option("--trials", config.audit_trials, "trials for the sampled audit");
  audit->add_option("--seed", config.seed, "sampled-audit RNG seed");
  audit->add_option("--alpha", config.alpha, "sampled-audit significance level");

  auto* simulate = app.add_subcommand("simulate", "run seeded retrievals against a database file");
  add_common_flags(simulate, config);
  add_scheme_flags(simulate, config);
  simulate->add_option("--db", config.db_path, "database file")->required();
  simulate->add_option("--trials", config.trials, "number of retrievals")->capture_default_str();
  simulate->add_option("--seed", config.seed, "master RNG seed");
  simulate->add_option("--transcripts", config.transcripts_path, "write JSONL transcripts here");

  auto* check = app.add_subcommand("check-matrix", "validate a matrix and report rank/group structure");
  add_common_flags(check, config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (plan->parsed()) return cmd_plan(config);
    if (audit->parsed()) return cmd_audit(config);
    if (simulate->parsed()) return cmd_simulate(config);
    if (check->parsed()) return cmd_check_matrix(config);
  } catch (const TooLargeError& e) {
    std::cerr << "error: " << e.what() << "\nhint: retry with --scheme group or --scheme full\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
