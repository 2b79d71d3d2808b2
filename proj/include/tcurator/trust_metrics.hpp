#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "tcurator/model.hpp"
#include "tcurator/rational.hpp"

namespace tcurator {

/// (input − trusted) / input as an exact fraction, 0 for empty input.
/// Throws TrustedExceedsInput.
Rational rate_of_trust(std::size_t input_count, std::size_t trusted_count);

struct OperatorStats {
  std::string name;
  std::size_t input = 0;
  std::size_t trusted = 0;
  std::size_t untrusted = 0;
  Rational rate_of_trust;
  std::chrono::milliseconds duration{0};
  std::size_t external_input = 0;

  friend bool operator==(const OperatorStats&, const OperatorStats&) = default;
};

struct RunStatistics {
  std::string run_id;
  std::vector<OperatorStats> per_operator;
  std::size_t final_trusted = 0;
  Rational overall_rate;

  friend bool operator==(const RunStatistics&, const RunStatistics&) = default;
};

/// Requires every stage's chained input (input − external_input) to equal
/// the previous stage's trusted count; throws BrokenChain otherwise.
RunStatistics accumulate(std::string run_id, const std::vector<OperatorOutcome>& outcomes);

/// Run-level rate against the first stage's input. Adoptions that push the
/// final count above the first input clamp the rate at 0.
Rational overall_rate(std::size_t first_input, std::size_t final_trusted);

/// Rates are written as percentages rounded half-up to 2 decimals.
std::string stats_to_yaml(const RunStatistics& stats);
/// Throws InvalidConfig on a document that does not follow the schema.
RunStatistics stats_from_yaml(const std::string& text);

/// Throws WriteFailure.
void emit_stats(const RunStatistics& stats, const std::filesystem::path& path);
/// Throws FileNotReadable or InvalidConfig.
RunStatistics load_stats(const std::filesystem::path& path);

nlohmann::json stats_to_json(const RunStatistics& stats);

}  // namespace tcurator
