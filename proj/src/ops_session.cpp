#include "tcurator/ops_session.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "tcurator/error.hpp"
#include "tcurator/ops_crosslog.hpp"
#include "tcurator/ops_single.hpp"
#include "tcurator/sparql/canonical.hpp"
#include "tcurator/sparql/features.hpp"
#include "tcurator/sparql/lexer.hpp"

namespace tcurator {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::size_t> session_of(const std::vector<Session>& sessions, std::size_t n) {
  std::vector<std::size_t> owner(n, SIZE_MAX);
  for (std::size_t s = 0; s < sessions.size(); ++s) {
    for (auto m : sessions[s].members) {
      if (m >= n) throw Error(ErrorCode::InvalidArgument, "session member index out of range");
      owner[m] = s;
    }
  }
  if (std::find(owner.begin(), owner.end(), SIZE_MAX) != owner.end()) {
    throw Error(ErrorCode::InvalidArgument, "sessions do not cover every query");
  }
  return owner;
}

bool failed_before_correction(const CuratedQuery& q) {
  if (auto label = q.label_from(OperatorKind::FormatConvert)) return *label == "ParseFailed";
  if (q.parsed()) return false;
  return !analysis_view(q);
}

}  // namespace

std::vector<Session> sessionize(const std::vector<CuratedQuery>& queries, std::chrono::milliseconds gap) {
  if (gap.count() <= 0) throw Error(ErrorCode::InvalidArgument, "session gap must be positive");
  std::map<IpAddress, std::vector<std::size_t>> by_ip;
  for (std::size_t i = 0; i < queries.size(); ++i) by_ip[queries[i].entry.ip].push_back(i);
  std::vector<Session> out;
  for (auto& [ip, idx] : by_ip) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return queries[a].entry.timestamp.utc < queries[b].entry.timestamp.utc;
    });
    Session cur{ip, {}, {}, {}};
    for (auto i : idx) {
      const auto t = queries[i].entry.timestamp.utc;
      if (!cur.members.empty() && t - cur.end > gap) {
        out.push_back(std::move(cur));
        cur = Session{ip, {}, {}, {}};
      }
      if (cur.members.empty()) cur.start = t;
      cur.end = t;
      cur.members.push_back(i);
    }
    if (!cur.members.empty()) out.push_back(std::move(cur));
  }
  std::stable_sort(out.begin(), out.end(), [](const Session& a, const Session& b) {
    if (a.start != b.start) return a.start < b.start;
    return a.ip < b.ip;
  });
  return out;
}

SessionTraffic session_traffic(const Session& s, const std::vector<CuratedQuery>& queries) {
  SessionTraffic t;
  const std::size_t n = s.members.size();
  if (n < 2) return t;
  const double minutes = std::chrono::duration<double, std::ratio<60>>(s.end - s.start).count();
  t.rate_per_minute = minutes > 0 ? static_cast<double>(n - 1) / minutes : std::numeric_limits<double>::infinity();
  std::vector<double> gaps;
  gaps.reserve(n - 1);
  for (std::size_t k = 1; k < n; ++k) {
    gaps.push_back(static_cast<double>(
        (queries[s.members[k]].entry.timestamp.utc - queries[s.members[k - 1]].entry.timestamp.utc).count()));
  }
  const double mean = std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size());
  if (mean <= 0) return t;
  double var = 0;
  for (double g : gaps) var += (g - mean) * (g - mean);
  var /= static_cast<double>(gaps.size());
  t.cv = std::sqrt(var) / mean;
  return t;
}

bool agent_matches(const std::optional<std::string>& agent, const std::vector<std::string>& patterns) {
  if (!agent) return false;
  const auto a = lower(*agent);
  return std::any_of(patterns.begin(), patterns.end(),
                     [&](const std::string& p) { return !p.empty() && a.find(lower(p)) != std::string::npos; });
}

bool is_robotic(const Session& s, const std::vector<CuratedQuery>& queries, const RobotConfig& cfg) {
  for (auto m : s.members) {
    if (agent_matches(queries[m].entry.user_agent, cfg.agent_patterns)) return true;
  }
  if (s.members.size() < cfg.min_session_length || s.members.size() < 2) return false;
  const auto t = session_traffic(s, queries);
  return t.rate_per_minute > cfg.rate_threshold || t.cv < cfg.regularity_cv;
}

StageOutput clean_robots(std::vector<CuratedQuery> queries, const std::vector<Session>& sessions,
                         const RobotConfig& cfg, Instant at) {
  const auto owner = session_of(sessions, queries.size());
  std::vector<bool> robotic(sessions.size());
  for (std::size_t s = 0; s < sessions.size(); ++s) robotic[s] = is_robotic(sessions[s], queries, cfg);
  std::vector<bool> keep(queries.size());
  std::vector<std::string> labels(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    keep[i] = !robotic[owner[i]];
    labels[i] = keep[i] ? "Human" : "Robot";
  }
  return partition(OperatorKind::RobotCleaner, std::move(queries), keep, labels, at);
}

StageOutput clean_robots(std::vector<CuratedQuery> queries, const RobotConfig& cfg, Instant at) {
  auto sessions = sessionize(queries, cfg.gap);
  return clean_robots(std::move(queries), sessions, cfg, at);
}

const char* to_string(ExpertiseLevel level) noexcept {
  switch (level) {
    case ExpertiseLevel::Beginner: return "Beginner";
    case ExpertiseLevel::Intermediate: return "Intermediate";
    case ExpertiseLevel::Expert: return "Expert";
  }
  return "Beginner";
}

std::optional<ExpertiseLevel> parse_expertise_level(std::string_view name) noexcept {
  for (auto l : {ExpertiseLevel::Beginner, ExpertiseLevel::Intermediate, ExpertiseLevel::Expert}) {
    if (name == to_string(l)) return l;
  }
  return std::nullopt;
}

ExpertiseLevel infer_expertise(const Session& s, const std::vector<CuratedQuery>& queries) {
  long deep = 0;
  long agg = 0;
  long fail = 0;
  for (auto m : s.members) {
    const auto& q = queries[m];
    if (failed_before_correction(q)) ++fail;
    std::optional<sparql::QueryFeatures> f = q.features;
    if (!f) {
      if (auto view = analysis_view(q)) f = sparql::extract_features(*view);
    }
    if (!f) continue;
    if (f->shape == sparql::QueryShape::Tree || f->shape == sparql::QueryShape::Cycle || f->depth >= 3) ++deep;
    if (f->has_aggregate) ++agg;
  }
  const long score = 2 * deep + agg - fail;
  const long n = static_cast<long>(s.members.size());
  if (score >= n) return ExpertiseLevel::Expert;
  if (score <= 0) return ExpertiseLevel::Beginner;
  return ExpertiseLevel::Intermediate;
}

StageOutput filter_expertise(std::vector<CuratedQuery> queries, const std::vector<Session>& sessions,
                             const std::set<ExpertiseLevel>& keep, Instant at) {
  const auto owner = session_of(sessions, queries.size());
  std::vector<ExpertiseLevel> level(sessions.size());
  for (std::size_t s = 0; s < sessions.size(); ++s) level[s] = infer_expertise(sessions[s], queries);
  std::vector<bool> decision(queries.size());
  std::vector<std::string> labels(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    decision[i] = keep.contains(level[owner[i]]);
    labels[i] = to_string(level[owner[i]]);
  }
  return partition(OperatorKind::ExpertiseFilter, std::move(queries), decision, labels, at);
}

StageOutput filter_expertise(std::vector<CuratedQuery> queries, const std::set<ExpertiseLevel>& keep,
                             std::chrono::milliseconds gap, Instant at) {
  auto sessions = sessionize(queries, gap);
  return filter_expertise(std::move(queries), sessions, keep, at);
}

std::optional<DedupMode> parse_dedup_mode(std::string_view name) noexcept {
  if (name == "Exact") return DedupMode::Exact;
  if (name == "Canonical") return DedupMode::Canonical;
  return std::nullopt;
}

std::string dedup_key(const CuratedQuery& q, DedupMode mode) {
  if (mode == DedupMode::Canonical) {
    if (auto view = analysis_view(q)) return "c:" + sparql::canonicalize(*view);
  }
  return "t:" + q.text;
}

StageOutput deduplicate(std::vector<CuratedQuery> queries, DedupMode mode, Instant at) {
  std::vector<std::size_t> order(queries.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return queries[a].entry.timestamp.utc < queries[b].entry.timestamp.utc;
  });
  std::unordered_set<std::string> seen;
  std::vector<bool> keep(queries.size(), false);
  for (auto i : order) keep[i] = seen.insert(dedup_key(queries[i], mode)).second;
  return partition(OperatorKind::Deduplicator, std::move(queries), keep, {}, at);
}

void TopicReferenceBase::add(std::string iri, std::string topic) {
  topics.insert(topic);
  term_topics[std::move(iri)] = std::move(topic);
}

TopicReferenceBase TopicReferenceBase::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotReadable, path.string());
  TopicReferenceBase base;
  std::string line;
  bool header = true;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    const auto comma = t.rfind(',');
    if (comma == std::string::npos) {
      throw Error(ErrorCode::InvalidKnowledgeBase, path.string() + ":" + std::to_string(n) + ": expected iri,topic");
    }
    auto iri = trim(t.substr(0, comma));
    if (iri.size() >= 2 && iri.front() == '<' && iri.back() == '>') iri = iri.substr(1, iri.size() - 2);
    auto topic = trim(t.substr(comma + 1));
    if (iri.empty() || topic.empty()) {
      throw Error(ErrorCode::InvalidKnowledgeBase, path.string() + ":" + std::to_string(n) + ": empty field");
    }
    base.add(std::move(iri), std::move(topic));
  }
  return base;
}

std::string assign_topic(const CuratedQuery& q, const TopicReferenceBase& base) {
  auto view = analysis_view(q);
  if (!view) return std::string(kUnknownTopic);
  std::set<std::string> iris;
  for (const auto& tp : view->triple_patterns) {
    for (const auto* t : {&tp.subject, &tp.predicate, &tp.object}) {
      if (t->kind == sparql::TermKind::Iri && t->resolved) iris.insert(t->value);
    }
  }
  std::map<std::string, std::size_t> votes;
  for (const auto& iri : iris) {
    auto it = base.term_topics.find(iri);
    if (it != base.term_topics.end()) ++votes[it->second];
  }
  std::string best(kUnknownTopic);
  std::size_t most = 0;
  for (const auto& [topic, count] : votes) {
    if (count > most) {
      most = count;
      best = topic;
    }
  }
  return best;
}

std::unordered_map<QueryId, std::string> cluster_topics(const std::vector<CuratedQuery>& queries,
                                                        const TopicReferenceBase& base) {
  std::unordered_map<QueryId, std::string> out;
  for (const auto& q : queries) out.emplace(q.id, assign_topic(q, base));
  return out;
}

StageOutput filter_topics(std::vector<CuratedQuery> queries, const std::unordered_map<QueryId, std::string>& topics,
                          const std::set<std::string>& keep, Instant at) {
  std::vector<bool> decision(queries.size());
  std::vector<std::string> labels(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    auto it = topics.find(queries[i].id);
    if (it == topics.end()) throw Error(ErrorCode::InvalidArgument, "no topic assigned to " + queries[i].id.value);
    decision[i] = keep.contains(it->second);
    labels[i] = it->second;
  }
  return partition(OperatorKind::TopicClustering, std::move(queries), decision, labels, at);
}

std::size_t informativeness(const sparql::ParsedQuery& q) {
  std::size_t constants = 0;
  for (const auto& tp : q.triple_patterns) {
    constants += tp.subject.is_constant() + tp.predicate.is_constant() + tp.object.is_constant();
  }
  return q.triple_patterns.size() + constants;
}

StageOutput rank_schema(std::vector<CuratedQuery> queries, double theta, Instant at) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw Error(ErrorCode::InvalidThreshold, "similarity threshold must lie in [0, 1], got " + std::to_string(theta));
  }
  const std::size_t n = queries.size();
  std::vector<std::optional<TermSet>> terms(n);
  std::vector<std::size_t> score(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto view = analysis_view(queries[i]);
    if (!view || view->triple_patterns.empty()) continue;
    terms[i] = term_set(*view);
    score[i] = informativeness(*view);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });

  std::vector<bool> keep(n, false);
  std::vector<std::string> labels(n, "NonInformative");
  TermIndex index;
  std::vector<std::size_t> accepted;
  for (auto i : order) {
    if (!terms[i]) continue;
    bool redundant = false;
    if (theta <= 0.0) {
      redundant = !accepted.empty();
    } else {
      for (auto doc : index.candidates(*terms[i])) {
        if (jaccard(*terms[i], *terms[accepted[doc]]) >= theta) {
          redundant = true;
          break;
        }
      }
    }
    if (redundant) {
      labels[i] = "Redundant";
      continue;
    }
    keep[i] = true;
    labels[i] = "Informative";
    index.add(accepted.size(), *terms[i]);
    accepted.push_back(i);
  }
  return partition(OperatorKind::SchemaRanking, std::move(queries), keep, labels, at);
}

}  // namespace tcurator
