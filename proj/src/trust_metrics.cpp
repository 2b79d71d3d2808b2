#include "tcurator/trust_metrics.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <sstream>

#include "tcurator/error.hpp"

namespace tcurator {

Rational rate_of_trust(std::size_t input_count, std::size_t trusted_count) {
  if (trusted_count > input_count) {
    throw Error(ErrorCode::TrustedExceedsInput,
                std::to_string(trusted_count) + " trusted out of " + std::to_string(input_count) + " input");
  }
  if (input_count == 0) return {};
  return Rational(input_count - trusted_count, input_count);
}

Rational overall_rate(std::size_t first_input, std::size_t final_trusted) {
  return rate_of_trust(first_input, std::min(first_input, final_trusted));
}

RunStatistics accumulate(std::string run_id, const std::vector<OperatorOutcome>& outcomes) {
  RunStatistics stats;
  stats.run_id = std::move(run_id);
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    if (o.external_input > o.input_count) {
      throw Error(ErrorCode::BrokenChain, std::string(to_string(o.op)) + ": external input exceeds input");
    }
    if (i > 0) {
      const auto expected = outcomes[i - 1].trusted.size();
      const auto chained = o.input_count - o.external_input;
      if (chained != expected) {
        throw Error(ErrorCode::BrokenChain, std::string(to_string(o.op)) + " received " + std::to_string(chained) +
                                                " queries but " + std::string(to_string(outcomes[i - 1].op)) +
                                                " trusted " + std::to_string(expected));
      }
    }
    stats.per_operator.push_back(OperatorStats{std::string(to_string(o.op)), o.input_count, o.trusted.size(),
                                               o.untrusted.size(), rate_of_trust(o.input_count, o.trusted.size()),
                                               o.duration, o.external_input});
  }
  if (!outcomes.empty()) {
    stats.final_trusted = outcomes.back().trusted.size();
    stats.overall_rate = overall_rate(outcomes.front().input_count, stats.final_trusted);
  }
  return stats;
}

std::string stats_to_yaml(const RunStatistics& stats) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "run_id" << YAML::Value << YAML::DoubleQuoted << stats.run_id;
  out << YAML::Key << "operators" << YAML::Value;
  if (stats.per_operator.empty()) {
    out << YAML::Flow << YAML::BeginSeq << YAML::EndSeq;
  } else {
    out << YAML::BeginSeq;
    for (const auto& op : stats.per_operator) {
      out << YAML::BeginMap;
      out << YAML::Key << "name" << YAML::Value << op.name;
      out << YAML::Key << "input" << YAML::Value << op.input;
      out << YAML::Key << "trusted" << YAML::Value << op.trusted;
      out << YAML::Key << "untrusted" << YAML::Value << op.untrusted;
      out << YAML::Key << "rate_of_trust" << YAML::Value << op.rate_of_trust.to_percent_string(2);
      out << YAML::Key << "duration_ms" << YAML::Value << op.duration.count();
      if (op.external_input > 0) out << YAML::Key << "external_input" << YAML::Value << op.external_input;
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::Key << "final_trusted" << YAML::Value << stats.final_trusted;
  out << YAML::Key << "overall_rate_of_trust" << YAML::Value << stats.overall_rate.to_percent_string(2);
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

RunStatistics stats_from_yaml(const std::string& text) {
  try {
    const auto doc = YAML::Load(text);
    if (!doc.IsMap()) throw Error(ErrorCode::InvalidConfig, "stats document is not a mapping");
    RunStatistics stats;
    stats.run_id = doc["run_id"].as<std::string>();
    const auto ops = doc["operators"];
    if (!ops || !ops.IsSequence()) throw Error(ErrorCode::InvalidConfig, "stats document lacks an operators list");
    for (const auto& n : ops) {
      OperatorStats op;
      op.name = n["name"].as<std::string>();
      op.input = n["input"].as<std::size_t>();
      op.trusted = n["trusted"].as<std::size_t>();
      op.untrusted = n["untrusted"].as<std::size_t>();
      op.duration = std::chrono::milliseconds(n["duration_ms"].as<long long>());
      if (n["external_input"]) op.external_input = n["external_input"].as<std::size_t>();
      op.rate_of_trust = rate_of_trust(op.input, op.trusted);
      stats.per_operator.push_back(std::move(op));
    }
    stats.final_trusted = doc["final_trusted"].as<std::size_t>();
    if (!stats.per_operator.empty()) stats.overall_rate = overall_rate(stats.per_operator.front().input, stats.final_trusted);
    return stats;
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("stats YAML: ") + e.what());
  }
}

void emit_stats(const RunStatistics& stats, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::WriteFailure, path.string());
  out << stats_to_yaml(stats);
  out.flush();
  if (!out) throw Error(ErrorCode::WriteFailure, path.string());
}

RunStatistics load_stats(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotReadable, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return stats_from_yaml(ss.str());
}

nlohmann::json stats_to_json(const RunStatistics& stats) {
  nlohmann::json ops = nlohmann::json::array();
  for (const auto& op : stats.per_operator) {
    nlohmann::json o = {{"name", op.name},
                        {"input", op.input},
                        {"trusted", op.trusted},
                        {"untrusted", op.untrusted},
                        {"rate_of_trust", std::stod(op.rate_of_trust.to_percent_string(2))},
                        {"duration_ms", op.duration.count()}};
    if (op.external_input > 0) o["external_input"] = op.external_input;
    ops.push_back(std::move(o));
  }
  return {{"run_id", stats.run_id},
          {"operators", std::move(ops)},
          {"final_trusted", stats.final_trusted},
          {"overall_rate_of_trust", std::stod(stats.overall_rate.to_percent_string(2))}};
}

}  // namespace tcurator
