#include "tcurator/ops_single.hpp"

#include <algorithm>
#include <fstream>

#include "tcurator/error.hpp"
#include "tcurator/sparql/features.hpp"

namespace tcurator {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

}  // namespace

const char* to_string(OriginCategory c) noexcept {
  switch (c) {
    case OriginCategory::Business: return "Business";
    case OriginCategory::Academic: return "Academic";
    case OriginCategory::Unknown: return "Unknown";
  }
  return "Unknown";
}

std::optional<OriginCategory> parse_origin_category(std::string_view name) noexcept {
  for (auto c : {OriginCategory::Business, OriginCategory::Academic, OriginCategory::Unknown}) {
    if (name == to_string(c)) return c;
  }
  return std::nullopt;
}

IpKnowledgeBase::IpKnowledgeBase(std::vector<CidrBlock> blacklist, std::vector<OrgBlock> org_map)
    : blacklist_(std::move(blacklist)), org_map_(std::move(org_map)) {
  for (const auto& b : blacklist_) {
    if (b.prefix_length == b.network.bit_width()) exact_.insert(b.network);
    else ranges_.push_back(b);
  }
  for (std::size_t i = 0; i < org_map_.size(); ++i) {
    for (std::size_t j = i + 1; j < org_map_.size(); ++j) {
      const auto& a = org_map_[i].block;
      const auto& b = org_map_[j].block;
      if (a.prefix_length == b.prefix_length && a.overlaps(b)) {
        throw Error(ErrorCode::InvalidKnowledgeBase,
                    "org map blocks " + a.to_string() + " and " + b.to_string() + " overlap at equal length");
      }
    }
  }
  std::stable_sort(org_map_.begin(), org_map_.end(), [](const OrgBlock& x, const OrgBlock& y) {
    return x.block.prefix_length > y.block.prefix_length;
  });
}

IpKnowledgeBase IpKnowledgeBase::load(const std::optional<std::filesystem::path>& blacklist,
                                      const std::optional<std::filesystem::path>& org_map) {
  std::vector<CidrBlock> black;
  std::vector<OrgBlock> orgs;
  std::string line;
  if (blacklist) {
    std::ifstream in(*blacklist);
    if (!in) throw Error(ErrorCode::FileNotReadable, blacklist->string());
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      auto t = trim(line.substr(0, line.find('#')));
      if (t.empty()) continue;
      auto block = CidrBlock::parse(t);
      if (!block) {
        throw Error(ErrorCode::InvalidKnowledgeBase, blacklist->string() + ":" + std::to_string(n) + ": bad entry '" + t + "'");
      }
      black.push_back(*block);
    }
  }
  if (org_map) {
    std::ifstream in(*org_map);
    if (!in) throw Error(ErrorCode::FileNotReadable, org_map->string());
    std::size_t n = 0;
    bool header = true;
    while (std::getline(in, line)) {
      ++n;
      if (trim(line).empty() || trim(line).front() == '#') continue;
      if (header) {
        header = false;
        continue;
      }
      auto cols = split_csv(line);
      const auto where = org_map->string() + ":" + std::to_string(n);
      if (cols.size() < 2) throw Error(ErrorCode::InvalidKnowledgeBase, where + ": expected cidr,category,organization");
      auto block = CidrBlock::parse(cols[0]);
      if (!block) throw Error(ErrorCode::InvalidKnowledgeBase, where + ": bad CIDR '" + cols[0] + "'");
      auto cat = parse_origin_category(cols[1]);
      if (!cat || *cat == OriginCategory::Unknown) {
        throw Error(ErrorCode::InvalidKnowledgeBase, where + ": category must be Business or Academic");
      }
      orgs.push_back({*block, *cat, cols.size() > 2 ? cols[2] : std::string()});
    }
  }
  return IpKnowledgeBase(std::move(black), std::move(orgs));
}

bool IpKnowledgeBase::is_blacklisted(const IpAddress& ip) const {
  if (exact_.contains(ip)) return true;
  return std::any_of(ranges_.begin(), ranges_.end(), [&](const CidrBlock& b) { return b.contains(ip); });
}

const OrgBlock* IpKnowledgeBase::lookup(const IpAddress& ip) const {
  for (const auto& o : org_map_) {
    if (o.block.contains(ip)) return &o;
  }
  return nullptr;
}

OriginCategory KnowledgeBaseResolver::resolve(const IpAddress& ip) const { return classify_origin(ip, kb_); }

OriginCategory classify_origin(const IpAddress& ip, const IpKnowledgeBase& kb) {
  const auto* hit = kb.lookup(ip);
  return hit ? hit->category : OriginCategory::Unknown;
}

StageOutput filter_origin(std::vector<CuratedQuery> queries, const OriginResolver& resolver,
                          const std::set<OriginCategory>& keep, Instant at) {
  std::vector<bool> decision;
  std::vector<std::string> labels;
  decision.reserve(queries.size());
  labels.reserve(queries.size());
  for (const auto& q : queries) {
    const auto cat = resolver.resolve(q.entry.ip);
    decision.push_back(keep.contains(cat));
    labels.emplace_back(to_string(cat));
  }
  return partition(OperatorKind::BusinessAcademic, std::move(queries), decision, labels, at);
}

StageOutput filter_origin(std::vector<CuratedQuery> queries, const IpKnowledgeBase& kb,
                          const std::set<OriginCategory>& keep, Instant at) {
  return filter_origin(std::move(queries), KnowledgeBaseResolver(kb), keep, at);
}

StageOutput eliminate_vulnerable(std::vector<CuratedQuery> queries, const IpKnowledgeBase& kb, Instant at) {
  std::vector<bool> decision;
  std::vector<std::string> labels;
  for (const auto& q : queries) {
    const bool bad = kb.is_blacklisted(q.entry.ip);
    decision.push_back(!bad);
    labels.emplace_back(bad ? "Blacklisted" : "");
  }
  return partition(OperatorKind::VulnerableEliminator, std::move(queries), decision, labels, at);
}

std::optional<sparql::QueryFeatures> features_of(const CuratedQuery& q) {
  if (q.features) return q.features;
  if (const auto* p = q.parsed()) return sparql::extract_features(*p);
  return std::nullopt;
}

StageOutput filter_complexity(std::vector<CuratedQuery> queries, const std::set<sparql::QueryShape>& keep_shapes,
                              std::size_t min_depth, std::size_t max_depth, Instant at) {
  if (min_depth > max_depth) {
    throw Error(ErrorCode::InvalidRange,
                "min_depth " + std::to_string(min_depth) + " exceeds max_depth " + std::to_string(max_depth));
  }
  std::vector<bool> decision;
  std::vector<std::string> labels;
  for (const auto& q : queries) {
    auto f = features_of(q);
    if (!f) {
      decision.push_back(false);
      labels.emplace_back("Unanalyzable");
      continue;
    }
    decision.push_back(keep_shapes.contains(f->shape) && f->depth >= min_depth && f->depth <= max_depth);
    labels.emplace_back(sparql::to_string(f->shape));
  }
  return partition(OperatorKind::ComplexityFilter, std::move(queries), decision, labels, at);
}

std::optional<AnalyticKeep> parse_analytic_keep(std::string_view name) noexcept {
  if (name == "Analytic") return AnalyticKeep::Analytic;
  if (name == "Standard") return AnalyticKeep::Standard;
  if (name == "Both") return AnalyticKeep::Both;
  return std::nullopt;
}

bool is_analytic(const CuratedQuery& q) {
  auto f = features_of(q);
  return f && (f->has_aggregate || f->has_group_by);
}

StageOutput select_analytic(std::vector<CuratedQuery> queries, AnalyticKeep keep, Instant at) {
  std::vector<bool> decision;
  std::vector<std::string> labels;
  for (const auto& q : queries) {
    const bool analytic = is_analytic(q);
    decision.push_back(keep == AnalyticKeep::Both || (analytic == (keep == AnalyticKeep::Analytic)));
    labels.emplace_back(analytic ? "Analytic" : "Standard");
  }
  return partition(OperatorKind::AnalyticSelector, std::move(queries), decision, labels, at);
}

}  // namespace tcurator
