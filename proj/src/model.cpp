#include "tcurator/model.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <unordered_set>

#include "tcurator/error.hpp"

namespace tcurator {
namespace {

constexpr std::array<std::string_view, kOperatorCount> kOperatorNames = {
    "Extract",        "FormatConvert",   "RobotCleaner",     "BusinessAcademic", "VulnerableEliminator",
    "Deduplicator",   "SyntacticCorrector", "SemanticCorrector", "TopicClustering", "SchemaRanking",
    "ComplexityFilter", "ExpertiseFilter", "AnalyticSelector", "LogsJoin",         "LogsEnrichment",
    "Load",
};

constexpr std::array<OperatorKind, kOperatorCount> kAllOperators = {
    OperatorKind::Extract,          OperatorKind::FormatConvert,      OperatorKind::RobotCleaner,
    OperatorKind::BusinessAcademic, OperatorKind::VulnerableEliminator, OperatorKind::Deduplicator,
    OperatorKind::SyntacticCorrector, OperatorKind::SemanticCorrector, OperatorKind::TopicClustering,
    OperatorKind::SchemaRanking,    OperatorKind::ComplexityFilter,   OperatorKind::ExpertiseFilter,
    OperatorKind::AnalyticSelector, OperatorKind::LogsJoin,           OperatorKind::LogsEnrichment,
    OperatorKind::Load,
};

constexpr std::array<std::string_view, 0> kNoLabels = {};
constexpr std::array<std::string_view, 2> kFormatLabels = {"Parsed", "ParseFailed"};
constexpr std::array<std::string_view, 2> kRobotLabels = {"Robot", "Human"};
constexpr std::array<std::string_view, 3> kOriginLabels = {"Business", "Academic", "Unknown"};
constexpr std::array<std::string_view, 1> kVulnerableLabels = {"Blacklisted"};
constexpr std::array<std::string_view, 3> kSyntaxLabels = {"Valid", "Repaired", "Unrepairable"};
constexpr std::array<std::string_view, 3> kSemanticLabels = {"Clean", "Repaired", "Unrepaired"};
constexpr std::array<std::string_view, 3> kSchemaLabels = {"Informative", "Redundant", "NonInformative"};
constexpr std::array<std::string_view, 7> kShapeLabels = {"Point", "Star",         "Chain",       "Tree",
                                                          "Cycle", "Disconnected", "Unanalyzable"};
constexpr std::array<std::string_view, 3> kExpertiseLabels = {"Beginner", "Intermediate", "Expert"};
constexpr std::array<std::string_view, 2> kAnalyticLabels = {"Analytic", "Standard"};

}  // namespace

std::string_view to_string(OperatorKind op) noexcept { return kOperatorNames[static_cast<std::size_t>(op)]; }

std::optional<OperatorKind> parse_operator(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kOperatorNames.size(); ++i) {
    if (kOperatorNames[i] == name) return kAllOperators[i];
  }
  return std::nullopt;
}

std::span<const OperatorKind> all_operators() noexcept { return kAllOperators; }

std::optional<std::span<const std::string_view>> declared_labels(OperatorKind op) noexcept {
  switch (op) {
    case OperatorKind::Extract:
    case OperatorKind::Deduplicator:
    case OperatorKind::Load: return std::span<const std::string_view>(kNoLabels);
    case OperatorKind::FormatConvert: return std::span<const std::string_view>(kFormatLabels);
    case OperatorKind::RobotCleaner: return std::span<const std::string_view>(kRobotLabels);
    case OperatorKind::BusinessAcademic: return std::span<const std::string_view>(kOriginLabels);
    case OperatorKind::VulnerableEliminator: return std::span<const std::string_view>(kVulnerableLabels);
    case OperatorKind::SyntacticCorrector: return std::span<const std::string_view>(kSyntaxLabels);
    case OperatorKind::SemanticCorrector: return std::span<const std::string_view>(kSemanticLabels);
    case OperatorKind::SchemaRanking: return std::span<const std::string_view>(kSchemaLabels);
    case OperatorKind::ComplexityFilter: return std::span<const std::string_view>(kShapeLabels);
    case OperatorKind::ExpertiseFilter: return std::span<const std::string_view>(kExpertiseLabels);
    case OperatorKind::AnalyticSelector: return std::span<const std::string_view>(kAnalyticLabels);
    case OperatorKind::TopicClustering:
    case OperatorKind::LogsJoin:
    case OperatorKind::LogsEnrichment: return std::nullopt;
  }
  return std::nullopt;
}

QueryId make_query_id(std::string_view source_log, std::size_t line_number, std::string_view text) {
  // FNV-1a 64 over the three fields with separators.
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](std::string_view bytes) {
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= 0xFF;
    h *= 1099511628211ull;
  };
  mix(source_log);
  mix(std::to_string(line_number));
  mix(text);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return QueryId{buf};
}

std::size_t CuratedQuery::boolean_annotation_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(annotations.begin(), annotations.end(), [](const TrustAnnotation& a) {
    return a.degree.kind == TrustDegree::Kind::Boolean;
  }));
}

std::optional<std::string> CuratedQuery::label_from(OperatorKind op) const {
  for (auto it = annotations.rbegin(); it != annotations.rend(); ++it) {
    if (it->op == op && it->degree.kind == TrustDegree::Kind::Categorical) return it->degree.label;
  }
  return std::nullopt;
}

CuratedQuery annotate(CuratedQuery query, OperatorKind op, TrustDegree degree, Instant at) {
  if (degree.kind == TrustDegree::Kind::Categorical) {
    if (degree.label.empty()) throw Error(ErrorCode::InvalidDegree, "empty categorical label");
    if (auto labels = declared_labels(op)) {
      if (std::find(labels->begin(), labels->end(), degree.label) == labels->end()) {
        throw Error(ErrorCode::InvalidDegree,
                    "label '" + degree.label + "' not declared by " + std::string(to_string(op)));
      }
    }
  }
  query.annotations.push_back(TrustAnnotation{op, std::move(degree), at});
  return query;
}

OperatorOutcome make_outcome(OperatorKind op, std::vector<QueryId> trusted, std::vector<QueryId> untrusted) {
  std::unordered_set<QueryId> seen(trusted.begin(), trusted.end());
  for (const auto& id : untrusted) {
    if (seen.contains(id)) throw Error(ErrorCode::OverlappingPartition, "query " + id.value + " on both sides");
  }
  OperatorOutcome out;
  out.op = op;
  out.input_count = trusted.size() + untrusted.size();
  out.rate_of_trust = out.input_count == 0 ? Rational{} : Rational(out.input_count - trusted.size(), out.input_count);
  out.trusted = std::move(trusted);
  out.untrusted = std::move(untrusted);
  return out;
}

StageOutput partition(OperatorKind op, std::vector<CuratedQuery> queries, const std::vector<bool>& keep,
                      const std::vector<std::string>& labels, Instant at) {
  if (keep.size() != queries.size() || (!labels.empty() && labels.size() != queries.size())) {
    throw Error(ErrorCode::InvalidArgument, "partition decision size mismatch");
  }
  StageOutput out;
  std::vector<QueryId> trusted_ids;
  std::vector<QueryId> untrusted_ids;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    auto q = annotate(std::move(queries[i]), op, TrustDegree::boolean(keep[i]), at);
    if (!labels.empty() && !labels[i].empty()) q = annotate(std::move(q), op, TrustDegree::categorical(labels[i]), at);
    if (keep[i]) {
      trusted_ids.push_back(q.id);
      out.trusted.push_back(std::move(q));
    } else {
      untrusted_ids.push_back(q.id);
      out.untrusted.push_back(std::move(q));
    }
  }
  out.outcome = make_outcome(op, std::move(trusted_ids), std::move(untrusted_ids));
  return out;
}

}  // namespace tcurator
