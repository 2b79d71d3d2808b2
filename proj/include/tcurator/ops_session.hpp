#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "tcurator/model.hpp"

namespace tcurator {

/// Queries of one IP with no inter-arrival gap above the session threshold.
/// `members` index into the query vector the session was built from, in
/// timestamp order (input order breaks ties).
struct Session {
  IpAddress ip;
  std::vector<std::size_t> members;
  Instant start{};
  Instant end{};
};

inline constexpr std::chrono::milliseconds kDefaultSessionGap = std::chrono::minutes(30);

/// Throws InvalidArgument when gap <= 0. Sessions are ordered by start,
/// then IP.
std::vector<Session> sessionize(const std::vector<CuratedQuery>& queries,
                                std::chrono::milliseconds gap = kDefaultSessionGap);

struct RobotConfig {
  double rate_threshold = 60.0;  // queries per minute
  double regularity_cv = 0.1;
  std::vector<std::string> agent_patterns{"bot", "crawler", "spider"};
  std::size_t min_session_length = 10;
  std::chrono::milliseconds gap = kDefaultSessionGap;
};

struct SessionTraffic {
  double rate_per_minute = 0;  // infinite for a zero-length session of n >= 2
  double cv = 0;               // population stddev / mean of the gaps
};

SessionTraffic session_traffic(const Session& s, const std::vector<CuratedQuery>& queries);
bool agent_matches(const std::optional<std::string>& agent, const std::vector<std::string>& patterns);
bool is_robotic(const Session& s, const std::vector<CuratedQuery>& queries, const RobotConfig& cfg);

StageOutput clean_robots(std::vector<CuratedQuery> queries, const std::vector<Session>& sessions,
                         const RobotConfig& cfg, Instant at = now_ms());
/// Sessionizes with cfg.gap first.
StageOutput clean_robots(std::vector<CuratedQuery> queries, const RobotConfig& cfg = {}, Instant at = now_ms());

enum class ExpertiseLevel : std::uint8_t { Beginner, Intermediate, Expert };

const char* to_string(ExpertiseLevel level) noexcept;
std::optional<ExpertiseLevel> parse_expertise_level(std::string_view name) noexcept;

/// score = 2·deep + aggregates − parse failures, over the session size n:
/// Expert when score >= n, Beginner when score <= 0.
ExpertiseLevel infer_expertise(const Session& s, const std::vector<CuratedQuery>& queries);

StageOutput filter_expertise(std::vector<CuratedQuery> queries, const std::vector<Session>& sessions,
                             const std::set<ExpertiseLevel>& keep, Instant at = now_ms());
StageOutput filter_expertise(std::vector<CuratedQuery> queries, const std::set<ExpertiseLevel>& keep,
                             std::chrono::milliseconds gap = kDefaultSessionGap, Instant at = now_ms());

enum class DedupMode : std::uint8_t { Exact, Canonical };

std::optional<DedupMode> parse_dedup_mode(std::string_view name) noexcept;
/// Canonical text when the query parses, its raw text otherwise.
std::string dedup_key(const CuratedQuery& q, DedupMode mode);

StageOutput deduplicate(std::vector<CuratedQuery> queries, DedupMode mode = DedupMode::Canonical,
                        Instant at = now_ms());

struct TopicReferenceBase {
  std::map<std::string, std::string, std::less<>> term_topics;  // expanded IRI -> topic
  std::set<std::string> topics;

  void add(std::string iri, std::string topic);
  /// CSV `iri,topic` with a header row. Throws FileNotReadable / InvalidKnowledgeBase.
  static TopicReferenceBase load(const std::filesystem::path& path);
};

inline constexpr std::string_view kUnknownTopic = "Unknown";

std::string assign_topic(const CuratedQuery& q, const TopicReferenceBase& base);
std::unordered_map<QueryId, std::string> cluster_topics(const std::vector<CuratedQuery>& queries,
                                                        const TopicReferenceBase& base);

StageOutput filter_topics(std::vector<CuratedQuery> queries, const std::unordered_map<QueryId, std::string>& topics,
                          const std::set<std::string>& keep, Instant at = now_ms());

/// pattern_count + number of constant term positions.
std::size_t informativeness(const sparql::ParsedQuery& q);

/// Throws InvalidThreshold unless 0 <= theta <= 1.
StageOutput rank_schema(std::vector<CuratedQuery> queries, double theta = 0.8, Instant at = now_ms());

}  // namespace tcurator
