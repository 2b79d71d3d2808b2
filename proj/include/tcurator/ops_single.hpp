#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "tcurator/ip.hpp"
#include "tcurator/model.hpp"

namespace tcurator {

enum class OriginCategory : std::uint8_t { Business, Academic, Unknown };

const char* to_string(OriginCategory c) noexcept;
std::optional<OriginCategory> parse_origin_category(std::string_view name) noexcept;

struct OrgBlock {
  CidrBlock block;
  OriginCategory category = OriginCategory::Unknown;
  std::string organization;
};

/// Offline replacement for live WHOIS lookups: a blacklist of addresses and
/// blocks plus a block -> organization category map.
class IpKnowledgeBase {
 public:
  IpKnowledgeBase() = default;
  /// Throws InvalidKnowledgeBase when two org blocks of equal prefix length overlap.
  IpKnowledgeBase(std::vector<CidrBlock> blacklist, std::vector<OrgBlock> org_map);

  /// Blacklist: one IP or CIDR per line, '#' comments. Org map: CSV
  /// `cidr,category,organization` with a header row. Throws FileNotReadable
  /// or InvalidKnowledgeBase.
  static IpKnowledgeBase load(const std::optional<std::filesystem::path>& blacklist,
                              const std::optional<std::filesystem::path>& org_map);

  bool is_blacklisted(const IpAddress& ip) const;
  /// Longest-prefix match in the org map.
  const OrgBlock* lookup(const IpAddress& ip) const;

  const std::vector<CidrBlock>& blacklist() const noexcept { return blacklist_; }
  const std::vector<OrgBlock>& org_map() const noexcept { return org_map_; }

 private:
  std::vector<CidrBlock> blacklist_;
  std::unordered_set<IpAddress> exact_;
  std::vector<CidrBlock> ranges_;
  std::vector<OrgBlock> org_map_;  // sorted by descending prefix length
};

/// Boundary for origin lookups, so a live resolver can replace the file-based one.
class OriginResolver {
 public:
  virtual ~OriginResolver() = default;
  virtual OriginCategory resolve(const IpAddress& ip) const = 0;
};

class KnowledgeBaseResolver final : public OriginResolver {
 public:
  explicit KnowledgeBaseResolver(const IpKnowledgeBase& kb) : kb_(kb) {}
  OriginCategory resolve(const IpAddress& ip) const override;

 private:
  const IpKnowledgeBase& kb_;
};

OriginCategory classify_origin(const IpAddress& ip, const IpKnowledgeBase& kb);

StageOutput filter_origin(std::vector<CuratedQuery> queries, const OriginResolver& resolver,
                          const std::set<OriginCategory>& keep, Instant at = now_ms());
StageOutput filter_origin(std::vector<CuratedQuery> queries, const IpKnowledgeBase& kb,
                          const std::set<OriginCategory>& keep, Instant at = now_ms());

StageOutput eliminate_vulnerable(std::vector<CuratedQuery> queries, const IpKnowledgeBase& kb, Instant at = now_ms());

inline constexpr std::size_t kUnboundedDepth = std::numeric_limits<std::size_t>::max();

/// Throws InvalidRange when min_depth > max_depth.
StageOutput filter_complexity(std::vector<CuratedQuery> queries, const std::set<sparql::QueryShape>& keep_shapes,
                              std::size_t min_depth = 0, std::size_t max_depth = kUnboundedDepth,
                              Instant at = now_ms());

enum class AnalyticKeep : std::uint8_t { Analytic, Standard, Both };

std::optional<AnalyticKeep> parse_analytic_keep(std::string_view name) noexcept;
bool is_analytic(const CuratedQuery& q);
StageOutput select_analytic(std::vector<CuratedQuery> queries, AnalyticKeep keep, Instant at = now_ms());

/// Features of a parsed query, computing them when the stage that normally
/// fills them was skipped.
std::optional<sparql::QueryFeatures> features_of(const CuratedQuery& q);

}  // namespace tcurator
