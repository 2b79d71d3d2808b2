#include <csignal>
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "tcurator/control_plane.hpp"
#include "tcurator/error.hpp"
#include "tcurator/pipeline.hpp"

using namespace tcurator;

namespace {

enum Exit { kOk = 0, kConfigInvalid = 1, kInputUnreadable = 2, kStageFailure = 3 };

int exit_code(const Error& e) {
  switch (e.code()) {
    case ErrorCode::FileNotReadable: return kInputUnreadable;
    case ErrorCode::InvalidConfig:
    case ErrorCode::UnknownOperator:
    case ErrorCode::MissingDependency:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidThreshold:
    case ErrorCode::InvalidRange:
    case ErrorCode::InvalidKnowledgeBase: return kConfigInvalid;
    default: return kStageFailure;
  }
}

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

void print_result(const CurationResult& r) {
  for (const auto& op : r.stats.per_operator) {
    std::cout << op.name << ": " << op.trusted << "/" << op.input << " trusted, rate "
              << op.rate_of_trust.to_percent_string(2) << "%\n";
  }
  const auto first = r.stats.per_operator.empty() ? 0 : r.stats.per_operator.front().input;
  std::cout << "run " << r.run_id << ": " << r.stats.final_trusted << " of " << first
            << " queries trusted, overall rate " << r.stats.overall_rate.to_percent_string(2) << "%";
  if (r.lines_read > 0) {
    std::cout << " (" << r.lines_read << " lines, " << r.rejected_entries << " entries rejected, " << r.line_errors
              << " unparseable lines)";
  }
  std::cout << "\n";
}

ApiServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust-based curation of SPARQL query logs"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Execute a curation pipeline");
  std::string config;
  std::vector<std::string> inputs;
  std::string format = "combined", query_param = "query", out, out_format = "ndjson", stats_out, db, run_id = "run";
  std::string blacklist, orgmap, topics, vocab, vocab_prefixes;
  std::vector<std::string> operators;
  bool dry_run = false;
  run->add_option("--config", config, "Pipeline YAML file");
  run->add_option("--input", inputs, "Input log; the first is curated, later ones are donors");
  run->add_option("--format", format, "Log format: combined or tsv");
  run->add_option("--query-param", query_param, "Query-string parameter holding the query");
  run->add_option("--out", out, "Curated query output file");
  run->add_option("--out-format", out_format, "Output format: ndjson or text");
  run->add_option("--stats-out", stats_out, "Statistics YAML file");
  run->add_option("--blacklist", blacklist, "Blacklisted addresses");
  run->add_option("--orgmap", orgmap, "Organization map CSV");
  run->add_option("--topics", topics, "Topic reference base CSV");
  run->add_option("--vocab", vocab, "Reference vocabulary term list");
  run->add_option("--vocab-prefixes", vocab_prefixes, "Prefix table for the vocabulary");
  run->add_option("--operators", operators, "Operators to run (default: all applicable)")->delimiter(',');
  run->add_option("--run-id", run_id, "Run identifier for inline runs");
  run->add_option("--db", db, "Store file for checkpoints and loaded queries");
  run->add_flag("--dry-run", dry_run, "Validate and print the operator order");
  run->get_option("--input")->excludes("--config");

  auto* res = app.add_subcommand("resume", "Resume a stored run from its checkpoints");
  std::string resume_db, resume_id, from;
  res->add_option("--db", resume_db, "Store file")->required();
  res->add_option("--run-id", resume_id, "Run identifier")->required();
  res->add_option("--from", from, "Stage to re-execute from");

  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  std::string addr = env_or("TCURATOR_ADDR", "127.0.0.1:8080");
  std::string serve_db = env_or("TCURATOR_DB", "tcurator.db");
  serve->add_option("--addr", addr, "Bind address host:port (TCURATOR_ADDR)");
  serve->add_option("--db", serve_db, "Store file (TCURATOR_DB)");

  app.add_subcommand("operators", "Print the operator registry as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("operators")) {
      std::cout << registry_to_json().dump(2) << "\n";
      return kOk;
    }

    if (app.got_subcommand("serve")) {
      const auto [host, port] = parse_address(addr);
      RunManager runs(serve_db);
      ApiServer server(runs);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on " << host << ":" << port << " (store " << serve_db << ")\n";
      if (!server.listen(host, port)) {
        std::cerr << "error: cannot bind " << addr << "\n";
        return kConfigInvalid;
      }
      return kOk;
    }

    if (app.got_subcommand("resume")) {
      Store store(resume_db);
      std::optional<OperatorKind> stage;
      if (!from.empty()) {
        stage = parse_operator(from);
        if (!stage) throw Error(ErrorCode::UnknownOperator, from);
      }
      print_result(resume(store, resume_id, stage));
      return kOk;
    }

    PipelineSpec spec;
    if (!config.empty()) {
      try {
        spec = load_pipeline(config);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::FileNotReadable) throw Error(ErrorCode::InvalidConfig, "cannot read " + config);
        throw;
      }
      if (!db.empty()) spec.store = db;
      if (!out.empty()) spec.output.path = out;
      if (!stats_out.empty()) spec.output.stats = stats_out;
      if (run->count("--out-format") > 0) {
        auto ff = parse_file_format(out_format);
        if (!ff) throw Error(ErrorCode::InvalidConfig, "unknown output format '" + out_format + "'");
        spec.output.format = *ff;
      }
    } else {
      if (inputs.empty()) throw Error(ErrorCode::InvalidConfig, "either --config or --input is required");
      spec.run_id = run_id;
      auto kind = parse_log_format(format);
      if (!kind) throw Error(ErrorCode::InvalidConfig, "unknown log format '" + format + "'");
      for (const auto& in : inputs) {
        InputSpec is;
        is.path = in;
        is.format.kind = *kind;
        is.format.query_param = query_param;
        spec.inputs.push_back(std::move(is));
      }
      if (operators.empty()) {
        for (auto op : all_operators()) {
          if (op == OperatorKind::LogsEnrichment && inputs.size() < 2) continue;
          spec.operators.push_back(OperatorConfig{op, nlohmann::json::object()});
        }
      } else {
        for (const auto& name : operators) {
          auto op = parse_operator(name);
          if (!op) throw Error(ErrorCode::UnknownOperator, name);
          spec.operators.push_back(OperatorConfig{*op, nlohmann::json::object()});
        }
      }
      auto opt = [](const std::string& s) -> std::optional<std::filesystem::path> {
        if (s.empty()) return std::nullopt;
        return s;
      };
      spec.kb = {opt(blacklist), opt(orgmap), opt(topics), opt(vocab), opt(vocab_prefixes)};
      spec.output.path = opt(out);
      auto ff = parse_file_format(out_format);
      if (!ff) throw Error(ErrorCode::InvalidConfig, "unknown output format '" + out_format + "'");
      spec.output.format = *ff;
      spec.output.stats = opt(stats_out);
      spec.store = opt(db);
    }

    if (dry_run) {
      for (const auto& c : validate_pipeline(spec).operators) std::cout << to_string(c.kind) << "\n";
      return kOk;
    }
    print_result(run_pipeline(spec));
    return kOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kStageFailure;
  }
}
