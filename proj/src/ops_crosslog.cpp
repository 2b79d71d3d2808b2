#include "tcurator/ops_crosslog.hpp"

#include <algorithm>
#include <tuple>

#include "tcurator/error.hpp"
#include "tcurator/sparql/parser.hpp"

namespace tcurator {
namespace {

void check_theta(double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw Error(ErrorCode::InvalidThreshold, "similarity threshold must lie in (0, 1], got " + std::to_string(theta));
  }
}

std::vector<TermSet> term_sets(const QueryLog& log) {
  std::vector<TermSet> out;
  out.reserve(log.entries.size());
  for (const auto& q : log.entries) {
    auto view = analysis_view(q);
    out.push_back(view ? term_set(*view) : TermSet{});
  }
  return out;
}

}  // namespace

TermSet term_set(const sparql::ParsedQuery& q) {
  TermSet out;
  for (const auto& tp : q.triple_patterns) {
    for (const auto* t : {&tp.subject, &tp.predicate, &tp.object}) {
      if (t->kind == sparql::TermKind::Iri) out.push_back(t->resolved ? "<" + t->value + ">" : t->value);
      else if (t->kind == sparql::TermKind::Literal) out.push_back(t->value);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double jaccard(const TermSet& a, const TermSet& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else {
      ++common;
      ++i;
      ++j;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

double query_similarity(const sparql::ParsedQuery& a, const sparql::ParsedQuery& b) {
  return jaccard(term_set(a), term_set(b));
}

std::optional<sparql::ParsedQuery> analysis_view(const CuratedQuery& q) {
  if (const auto* p = q.parsed()) return *p;
  if (q.parse_failed()) return std::nullopt;
  auto r = sparql::parse_query(q.text);
  if (auto* p = std::get_if<sparql::ParsedQuery>(&r)) return std::move(*p);
  return std::nullopt;
}

void TermIndex::add(std::size_t doc, const TermSet& terms) {
  for (const auto& t : terms) postings_[t].push_back(doc);
  ++docs_;
}

std::vector<std::size_t> TermIndex::candidates(const TermSet& terms) const {
  std::vector<std::size_t> out;
  for (const auto& t : terms) {
    auto it = postings_.find(t);
    if (it != postings_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<JoinPair> join_logs(const QueryLog& a, const QueryLog& b, double theta) {
  check_theta(theta);
  const auto sa = term_sets(a);
  const auto sb = term_sets(b);
  TermIndex index;
  for (std::size_t j = 0; j < sb.size(); ++j) index.add(j, sb[j]);

  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    for (auto j : index.candidates(sa[i])) {
      const double s = jaccard(sa[i], sb[j]);
      if (s >= theta) pairs.emplace_back(s, i, j);
    }
  }
  std::sort(pairs.begin(), pairs.end(), [&](const auto& x, const auto& y) {
    if (std::get<0>(x) != std::get<0>(y)) return std::get<0>(x) > std::get<0>(y);
    const auto& ax = a.entries[std::get<1>(x)].id;
    const auto& ay = a.entries[std::get<1>(y)].id;
    if (ax != ay) return ax < ay;
    return b.entries[std::get<2>(x)].id < b.entries[std::get<2>(y)].id;
  });
  std::vector<bool> used_a(sa.size(), false);
  std::vector<bool> used_b(sb.size(), false);
  std::vector<JoinPair> out;
  for (const auto& [s, i, j] : pairs) {
    if (used_a[i] || used_b[j]) continue;
    used_a[i] = used_b[j] = true;
    out.push_back({a.entries[i].id, b.entries[j].id, s});
  }
  return out;
}

EnrichmentResult enrich_log(const QueryLog& target, const std::vector<QueryLog>& donors, double theta, Instant at) {
  check_theta(theta);
  const auto st = term_sets(target);
  TermIndex index;
  for (std::size_t i = 0; i < st.size(); ++i) index.add(i, st[i]);

  EnrichmentResult out;
  out.log.id = target.id;
  out.log.source_dataset = target.source_dataset;
  std::vector<QueryId> trusted;
  std::vector<QueryId> untrusted;
  for (const auto& q : target.entries) {
    out.log.entries.push_back(annotate(q, OperatorKind::LogsEnrichment, TrustDegree::boolean(true), at));
    trusted.push_back(q.id);
  }
  std::size_t external = 0;
  std::vector<CuratedQuery> adopted;
  for (const auto& donor : donors) {
    const auto sd = term_sets(donor);
    for (std::size_t k = 0; k < donor.entries.size(); ++k) {
      ++external;
      double best = 0.0;
      for (auto i : index.candidates(sd[k])) best = std::max(best, jaccard(sd[k], st[i]));
      const auto& q = donor.entries[k];
      if (!sd[k].empty() && best >= theta) {
        auto copy = annotate(q, OperatorKind::LogsEnrichment, TrustDegree::boolean(true), at);
        copy = annotate(std::move(copy), OperatorKind::LogsEnrichment,
                        TrustDegree::categorical("Enriched:" + donor.id), at);
        copy.source_log = target.id;
        trusted.push_back(copy.id);
        adopted.push_back(std::move(copy));
      } else {
        untrusted.push_back(q.id);
        out.rejected.push_back(annotate(q, OperatorKind::LogsEnrichment, TrustDegree::boolean(false), at));
      }
    }
  }
  out.adopted_count = adopted.size();
  for (auto& q : adopted) out.log.entries.push_back(std::move(q));
  out.outcome = make_outcome(OperatorKind::LogsEnrichment, std::move(trusted), std::move(untrusted));
  out.outcome.external_input = external;
  return out;
}

}  // namespace tcurator
