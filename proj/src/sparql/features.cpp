#include "tcurator/sparql/features.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <string>

namespace tcurator::sparql {
namespace {

std::vector<std::string> pattern_variables(const TriplePattern& tp) {
  std::vector<std::string> vars;
  for (const Term* t : {&tp.subject, &tp.predicate, &tp.object}) {
    if (t->is_variable() && std::find(vars.begin(), vars.end(), t->value) == vars.end()) vars.push_back(t->value);
  }
  return vars;
}

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

std::pair<std::size_t, std::size_t> farthest(const JoinGraph& g, std::size_t from) {
  std::vector<std::size_t> dist(g.node_count(), SIZE_MAX);
  std::queue<std::size_t> q;
  dist[from] = 0;
  q.push(from);
  std::pair<std::size_t, std::size_t> best{from, 0};
  while (!q.empty()) {
    const auto v = q.front();
    q.pop();
    if (dist[v] > best.second) best = {v, dist[v]};
    for (auto u : g.adjacency[v]) {
      if (dist[u] == SIZE_MAX) {
        dist[u] = dist[v] + 1;
        q.push(u);
      }
    }
  }
  return best;
}

class PathSearch {
 public:
  PathSearch(const JoinGraph& g, const std::vector<std::size_t>& nodes) : g_(g), nodes_(nodes), on_path_(g.node_count()) {}

  // Returns the best depth found and whether the search was exhaustive.
  std::pair<std::size_t, bool> run(std::size_t budget) {
    budget_ = budget;
    const std::size_t target = nodes_.size() - 1;
    for (auto start : nodes_) {
      dfs(start, 0);
      if (best_ == target || budget_ == 0) break;
    }
    return {best_, budget_ > 0 || best_ == target};
  }

 private:
  void dfs(std::size_t v, std::size_t len) {
    if (budget_ == 0) return;
    --budget_;
    best_ = std::max(best_, len);
    if (best_ == nodes_.size() - 1) return;
    on_path_[v] = true;
    for (auto u : g_.adjacency[v]) {
      if (!on_path_[u]) dfs(u, len + 1);
      if (best_ == nodes_.size() - 1 || budget_ == 0) break;
    }
    on_path_[v] = false;
  }

  const JoinGraph& g_;
  const std::vector<std::size_t>& nodes_;
  std::vector<bool> on_path_;
  std::size_t best_ = 0;
  std::size_t budget_ = 0;
};

std::size_t bitmask_longest_path(const JoinGraph& g, const std::vector<std::size_t>& nodes) {
  const std::size_t m = nodes.size();
  std::map<std::size_t, std::size_t> local;
  for (std::size_t i = 0; i < m; ++i) local[nodes[i]] = i;
  std::vector<std::uint32_t> nbr(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (auto u : g.adjacency[nodes[i]]) nbr[i] |= 1u << local[u];
  }
  // ends[mask] = set of vertices at which a simple path covering mask can end.
  std::vector<std::uint32_t> ends(std::size_t{1} << m, 0);
  for (std::size_t i = 0; i < m; ++i) ends[std::size_t{1} << i] = 1u << i;
  std::size_t best = 0;
  for (std::size_t mask = 1; mask < ends.size(); ++mask) {
    if (ends[mask] == 0) continue;
    best = std::max<std::size_t>(best, std::popcount(mask) - 1);
    for (std::uint32_t e = ends[mask]; e != 0; e &= e - 1) {
      const auto v = std::countr_zero(e);
      for (std::uint32_t next = nbr[v] & ~static_cast<std::uint32_t>(mask); next != 0; next &= next - 1) {
        const auto u = std::countr_zero(next);
        ends[mask | (std::size_t{1} << u)] |= 1u << u;
      }
    }
  }
  return best;
}

std::size_t component_depth(const JoinGraph& g, const std::vector<std::size_t>& nodes) {
  if (nodes.size() <= 1) return 0;
  std::size_t degree_sum = 0;
  for (auto v : nodes) degree_sum += g.degree(v);
  if (degree_sum / 2 == nodes.size() - 1) return farthest(g, farthest(g, nodes.front()).first).second;
  PathSearch search(g, nodes);
  auto [best, exhaustive] = search.run(200000);
  if (exhaustive || nodes.size() > 16) return best;
  return bitmask_longest_path(g, nodes);
}

}  // namespace

JoinGraph build_join_graph(const std::vector<TriplePattern>& patterns) {
  JoinGraph g;
  g.adjacency.resize(patterns.size());
  std::map<std::string, std::vector<std::size_t>> users;
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    for (auto& v : pattern_variables(patterns[i])) users[v].push_back(i);
  }
  std::vector<std::set<std::size_t>> adj(patterns.size());
  for (const auto& [var, ids] : users) {
    for (std::size_t a = 0; a < ids.size(); ++a) {
      for (std::size_t b = a + 1; b < ids.size(); ++b) {
        adj[ids[a]].insert(ids[b]);
        adj[ids[b]].insert(ids[a]);
      }
    }
  }
  for (std::size_t i = 0; i < patterns.size(); ++i) g.adjacency[i].assign(adj[i].begin(), adj[i].end());
  return g;
}

std::vector<std::vector<std::size_t>> connected_components(const JoinGraph& g) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<bool> seen(g.node_count(), false);
  for (std::size_t s = 0; s < g.node_count(); ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> comp;
    std::vector<std::size_t> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (auto u : g.adjacency[v]) {
        if (!seen[u]) {
          seen[u] = true;
          stack.push_back(u);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

bool has_join_cycle(const std::vector<TriplePattern>& patterns) {
  std::map<std::string, std::size_t> var_node;
  std::vector<std::vector<std::string>> vars(patterns.size());
  std::map<std::string, std::size_t> uses;
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    vars[i] = pattern_variables(patterns[i]);
    for (auto& v : vars[i]) ++uses[v];
  }
  for (auto& [v, n] : uses) {
    if (n >= 2) var_node.emplace(v, patterns.size() + var_node.size());
  }
  DisjointSets sets(patterns.size() + var_node.size());
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    for (auto& v : vars[i]) {
      auto it = var_node.find(v);
      if (it != var_node.end() && !sets.unite(i, it->second)) return true;
    }
  }
  return false;
}

QueryShape classify_shape(const std::vector<TriplePattern>& patterns) {
  const std::size_t n = patterns.size();
  if (n <= 1) return QueryShape::Point;
  const auto g = build_join_graph(patterns);
  if (connected_components(g).size() > 1) return QueryShape::Disconnected;
  if (has_join_cycle(patterns)) return QueryShape::Cycle;

  std::size_t leaves = 0;
  bool max_two = true;
  for (std::size_t v = 0; v < n; ++v) {
    if (g.degree(v) == 1) ++leaves;
    if (g.degree(v) > 2) max_two = false;
  }
  if (max_two && leaves == 2) return QueryShape::Chain;

  for (std::size_t v = 0; v < n; ++v) {
    if (g.degree(v) == n - 1 && leaves == n - 1) return QueryShape::Star;
  }
  if (n >= 3) {
    std::map<std::string, std::size_t> uses;
    for (const auto& tp : patterns) {
      for (auto& v : pattern_variables(tp)) {
        if (++uses[v] == n) return QueryShape::Star;
      }
    }
  }
  return QueryShape::Tree;
}

std::size_t join_depth(const std::vector<TriplePattern>& patterns) {
  if (patterns.size() <= 1) return 0;
  const auto g = build_join_graph(patterns);
  auto comps = connected_components(g);
  std::size_t largest = 0;
  for (auto& c : comps) largest = std::max(largest, c.size());
  std::size_t depth = 0;
  for (auto& c : comps) {
    if (c.size() == largest) depth = std::max(depth, component_depth(g, c));
  }
  return depth;
}

QueryFeatures extract_features(const ParsedQuery& q) {
  QueryFeatures f;
  f.pattern_count = q.triple_patterns.size();
  f.shape = classify_shape(q.triple_patterns);
  f.depth = join_depth(q.triple_patterns);
  f.has_aggregate = !q.aggregates.empty();
  f.has_group_by = q.group_by;
  f.distinct = q.distinct;
  std::set<std::string> vars;
  for (const auto& tp : q.triple_patterns) {
    for (auto& v : pattern_variables(tp)) vars.insert(v);
  }
  f.variable_count = vars.size();
  return f;
}

}  // namespace tcurator::sparql
