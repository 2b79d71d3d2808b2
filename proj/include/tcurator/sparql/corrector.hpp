#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tcurator/sparql/ast.hpp"

namespace tcurator::sparql {

enum class RepairRule : std::uint8_t {
  KeywordTypo,
  BalanceBraces,
  MissingDotBetweenPatterns,
  StripTrailingSemicolon,
  CloseUnterminatedIri,
  CloseUnterminatedString,
};

const char* to_string(RepairRule rule) noexcept;
std::optional<RepairRule> parse_repair_rule(std::string_view name) noexcept;

struct SyntaxCorrection {
  std::string text;
  std::vector<RepairRule> applied;
  /// Issues of the returned text; empty when it parses.
  std::vector<SyntaxIssue> issues;

  bool repaired() const noexcept { return !applied.empty(); }
  bool parses() const noexcept { return issues.empty(); }
};

/// Runs the repair table in order, each rule at most once, stopping as soon
/// as the text parses. Input that already parses comes back unchanged; input
/// that cannot be repaired comes back unchanged with its original issues.
SyntaxCorrection correct_syntax(std::string_view text);

/// Closest keyword at edit distance one, when exactly one exists.
std::optional<std::string> keyword_typo_fix(std::string_view word);

}  // namespace tcurator::sparql
