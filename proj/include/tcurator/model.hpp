#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tcurator/ip.hpp"
#include "tcurator/rational.hpp"
#include "tcurator/sparql/ast.hpp"
#include "tcurator/time.hpp"

namespace tcurator {

/// The sixteen curation operators, declared in canonical pipeline order.
enum class OperatorKind : std::uint8_t {
  Extract,
  FormatConvert,
  RobotCleaner,
  BusinessAcademic,
  VulnerableEliminator,
  Deduplicator,
  SyntacticCorrector,
  SemanticCorrector,
  TopicClustering,
  SchemaRanking,
  ComplexityFilter,
  ExpertiseFilter,
  AnalyticSelector,
  LogsJoin,
  LogsEnrichment,
  Load,
};

inline constexpr std::size_t kOperatorCount = 16;

std::string_view to_string(OperatorKind op) noexcept;
std::optional<OperatorKind> parse_operator(std::string_view name) noexcept;
std::span<const OperatorKind> all_operators() noexcept;

/// Closed label vocabulary of an operator's categorical annotations, or
/// nullopt when the operator emits data-dependent labels (topics, provenance).
std::optional<std::span<const std::string_view>> declared_labels(OperatorKind op) noexcept;

struct QueryId {
  std::string value;

  friend auto operator<=>(const QueryId&, const QueryId&) = default;
};

/// Stable content hash of (source_log, line, decoded text).
QueryId make_query_id(std::string_view source_log, std::size_t line_number, std::string_view text);

struct RawLogEntry {
  IpAddress ip;
  Timestamp timestamp;
  std::string method;
  std::string raw_request;
  int status = 200;
  std::optional<std::string> user_agent;
  std::string source_log;
  std::size_t line_number = 0;

  friend bool operator==(const RawLogEntry&, const RawLogEntry&) = default;
};

struct TrustDegree {
  enum class Kind : std::uint8_t { Boolean, Categorical };

  Kind kind = Kind::Boolean;
  bool value = false;  // Boolean: true <=> TrustQ
  std::string label;   // Categorical

  static TrustDegree boolean(bool trusted) { return {Kind::Boolean, trusted, {}}; }
  static TrustDegree categorical(std::string label) { return {Kind::Categorical, false, std::move(label)}; }

  friend bool operator==(const TrustDegree&, const TrustDegree&) = default;
};

struct TrustAnnotation {
  OperatorKind op = OperatorKind::Extract;
  TrustDegree degree;
  Instant applied_at{};

  friend bool operator==(const TrustAnnotation&, const TrustAnnotation&) = default;
};

struct Unparsed {
  friend bool operator==(Unparsed, Unparsed) { return true; }
};
using ParseFailure = std::vector<sparql::SyntaxIssue>;
using ParseState = std::variant<Unparsed, sparql::ParsedQuery, ParseFailure>;

struct CuratedQuery {
  QueryId id;
  std::string text;
  RawLogEntry entry;
  ParseState parse;
  std::optional<sparql::QueryFeatures> features;
  std::vector<TrustAnnotation> annotations;
  std::string source_log;

  const sparql::ParsedQuery* parsed() const noexcept { return std::get_if<sparql::ParsedQuery>(&parse); }
  bool parse_failed() const noexcept { return std::holds_alternative<ParseFailure>(parse); }
  std::size_t boolean_annotation_count() const noexcept;
  /// Most recent categorical label emitted by `op`, if any.
  std::optional<std::string> label_from(OperatorKind op) const;
};

/// Returns `query` with one more annotation. Throws InvalidDegree for a
/// categorical label outside the operator's declared set.
CuratedQuery annotate(CuratedQuery query, OperatorKind op, TrustDegree degree, Instant at = now_ms());

struct OperatorOutcome {
  OperatorKind op = OperatorKind::Extract;
  std::size_t input_count = 0;
  std::vector<QueryId> trusted;
  std::vector<QueryId> untrusted;
  Rational rate_of_trust;
  std::chrono::milliseconds duration{0};
  /// Queries that entered from outside the chain (donor logs for enrichment).
  std::size_t external_input = 0;
};

/// Throws OverlappingPartition when an id appears on both sides.
OperatorOutcome make_outcome(OperatorKind op, std::vector<QueryId> trusted, std::vector<QueryId> untrusted);

struct QueryLog {
  std::string id;
  std::string source_dataset;
  std::vector<CuratedQuery> entries;
};

/// An operator's partition of its input. `trusted` keeps input order.
struct StageOutput {
  OperatorOutcome outcome;
  std::vector<CuratedQuery> trusted;
  std::vector<CuratedQuery> untrusted;
};

/// Annotates each query Boolean(decision[i]) (plus the optional categorical
/// label) and splits the input accordingly.
StageOutput partition(OperatorKind op, std::vector<CuratedQuery> queries, const std::vector<bool>& keep,
                      const std::vector<std::string>& labels, Instant at);

}  // namespace tcurator

template <>
struct std::hash<tcurator::QueryId> {
  std::size_t operator()(const tcurator::QueryId& id) const noexcept { return std::hash<std::string>{}(id.value); }
};
