#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tcurator/model.hpp"

namespace tcurator {

/// Sorted, de-duplicated constant terms of a query's triple patterns. IRIs
/// are written `<expanded>`, literals in their normalized lexical form.
using TermSet = std::vector<std::string>;

TermSet term_set(const sparql::ParsedQuery& q);

/// |a ∩ b| / |a ∪ b|; 0 when both are empty.
double jaccard(const TermSet& a, const TermSet& b);

double query_similarity(const sparql::ParsedQuery& a, const sparql::ParsedQuery& b);

/// The query's parse if it has one; an unparsed query is parsed on the fly.
std::optional<sparql::ParsedQuery> analysis_view(const CuratedQuery& q);

/// Inverted index term -> document numbers, used to avoid all-pairs scans.
class TermIndex {
 public:
  void add(std::size_t doc, const TermSet& terms);
  /// Documents sharing at least one term with `terms`, ascending.
  std::vector<std::size_t> candidates(const TermSet& terms) const;
  std::size_t size() const noexcept { return docs_; }

 private:
  std::unordered_map<std::string, std::vector<std::size_t>> postings_;
  std::size_t docs_ = 0;
};

struct JoinPair {
  QueryId a;
  QueryId b;
  double similarity = 0;

  friend bool operator==(const JoinPair&, const JoinPair&) = default;
};

/// One-to-one matching of cross-log pairs with similarity >= theta, taken
/// greedily by descending similarity, ties by id order. Throws
/// InvalidThreshold unless 0 < theta <= 1.
std::vector<JoinPair> join_logs(const QueryLog& a, const QueryLog& b, double theta);

struct EnrichmentResult {
  QueryLog log;  // target entries followed by adopted copies
  std::size_t adopted_count = 0;
  std::vector<CuratedQuery> rejected;  // donor queries not adopted
  OperatorOutcome outcome;
};

/// Adopts donor queries whose best similarity to any target query reaches
/// theta, tagged Categorical("Enriched:<donor-id>"). Throws InvalidThreshold
/// unless 0 < theta <= 1.
EnrichmentResult enrich_log(const QueryLog& target, const std::vector<QueryLog>& donors, double theta,
                            Instant at = now_ms());

}  // namespace tcurator
