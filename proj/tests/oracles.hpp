#pragma once

// Brute-force reference implementations used to check the library.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tcurator/sparql/ast.hpp"

namespace oracle {

using tcurator::sparql::QueryShape;
using tcurator::sparql::TriplePattern;

inline std::set<std::string> vars_of(const TriplePattern& tp) {
  std::set<std::string> v;
  for (const auto* t : {&tp.subject, &tp.predicate, &tp.object}) {
    if (t->is_variable()) v.insert(t->value);
  }
  return v;
}

struct Graph {
  std::size_t n = 0;
  std::vector<std::vector<bool>> adj;
};

inline Graph join_graph(const std::vector<TriplePattern>& ps) {
  Graph g;
  g.n = ps.size();
  g.adj.assign(g.n, std::vector<bool>(g.n, false));
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t j = 0; j < g.n; ++j) {
      if (i == j) continue;
      auto a = vars_of(ps[i]);
      for (const auto& v : vars_of(ps[j])) {
        if (a.contains(v)) g.adj[i][j] = true;
      }
    }
  }
  return g;
}

inline std::size_t degree(const Graph& g, std::size_t v) {
  return static_cast<std::size_t>(std::count(g.adj[v].begin(), g.adj[v].end(), true));
}

// Component label per node by repeated relaxation until nothing changes.
inline std::vector<std::size_t> component_labels(const Graph& g) {
  std::vector<std::size_t> label(g.n);
  std::iota(label.begin(), label.end(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < g.n; ++i) {
      for (std::size_t j = 0; j < g.n; ++j) {
        if (g.adj[i][j] && label[j] < label[i]) {
          label[i] = label[j];
          changed = true;
        }
      }
    }
  }
  return label;
}

// Longest simple path (edges) starting anywhere inside `nodes`, by
// enumerating every simple path.
inline std::size_t longest_simple_path(const Graph& g, const std::vector<std::size_t>& nodes) {
  std::size_t best = 0;
  std::vector<bool> on(g.n, false);
  std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t v, std::size_t len) {
    best = std::max(best, len);
    on[v] = true;
    for (std::size_t w = 0; w < g.n; ++w) {
      if (g.adj[v][w] && !on[w]) walk(w, len + 1);
    }
    on[v] = false;
  };
  for (auto v : nodes) walk(v, 0);
  return best;
}

inline std::size_t depth(const std::vector<TriplePattern>& ps) {
  if (ps.size() <= 1) return 0;
  const auto g = join_graph(ps);
  const auto label = component_labels(g);
  std::map<std::size_t, std::vector<std::size_t>> comps;
  for (std::size_t i = 0; i < g.n; ++i) comps[label[i]].push_back(i);
  std::size_t largest = 0;
  for (const auto& [l, c] : comps) largest = std::max(largest, c.size());
  std::size_t d = 0;
  for (const auto& [l, c] : comps) {
    if (c.size() == largest) d = std::max(d, longest_simple_path(g, c));
  }
  return d;
}

// A closed walk without repeated vertices in the bipartite pattern/variable
// incidence graph, found by enumerating simple paths from every vertex.
inline bool incidence_cycle(const std::vector<TriplePattern>& ps) {
  std::vector<std::string> names;
  std::map<std::string, std::size_t> var_node;
  const std::size_t p = ps.size();
  std::vector<std::set<std::string>> vs;
  for (const auto& tp : ps) {
    vs.push_back(vars_of(tp));
    for (const auto& v : vs.back()) {
      if (!var_node.contains(v)) var_node.emplace(v, p + var_node.size());
    }
  }
  const std::size_t n = p + var_node.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < p; ++i) {
    for (const auto& v : vs[i]) {
      adj[i].push_back(var_node[v]);
      adj[var_node[v]].push_back(i);
    }
  }
  std::vector<bool> on(n, false);
  bool found = false;
  std::function<void(std::size_t, std::size_t, std::size_t)> walk = [&](std::size_t start, std::size_t v,
                                                                        std::size_t len) {
    if (found) return;
    on[v] = true;
    for (auto w : adj[v]) {
      if (w == start && len >= 3) found = true;
      if (!on[w] && w > start) walk(start, w, len + 1);
    }
    on[v] = false;
  };
  for (std::size_t s = 0; s < n && !found; ++s) walk(s, s, 0);
  return found;
}

inline QueryShape shape(const std::vector<TriplePattern>& ps) {
  const std::size_t n = ps.size();
  if (n <= 1) return QueryShape::Point;
  const auto g = join_graph(ps);
  const auto label = component_labels(g);
  if (std::set<std::size_t>(label.begin(), label.end()).size() > 1) return QueryShape::Disconnected;
  if (incidence_cycle(ps)) return QueryShape::Cycle;
  std::size_t leaves = 0, maxdeg = 0;
  for (std::size_t v = 0; v < n; ++v) {
    leaves += degree(g, v) == 1;
    maxdeg = std::max(maxdeg, degree(g, v));
  }
  if (maxdeg <= 2 && leaves == 2) return QueryShape::Chain;
  if (maxdeg == n - 1 && leaves == n - 1) return QueryShape::Star;
  if (n >= 3) {
    std::set<std::string> common = vars_of(ps[0]);
    for (std::size_t i = 1; i < n; ++i) {
      std::set<std::string> next;
      auto vi = vars_of(ps[i]);
      std::set_intersection(common.begin(), common.end(), vi.begin(), vi.end(), std::inserter(next, next.end()));
      common = std::move(next);
    }
    if (!common.empty()) return QueryShape::Star;
  }
  return QueryShape::Tree;
}

inline double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.contains(x);
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

// Random BGPs over a small variable/constant pool; patterns may repeat
// variables so every shape class occurs.
struct BgpGenerator {
  explicit BgpGenerator(std::uint64_t seed) : rng(seed) {}
  std::mt19937_64 rng;

  int pool = 6;

  tcurator::sparql::Term term(bool allow_const) {
    tcurator::sparql::Term t;
    std::uniform_int_distribution<int> pick(0, allow_const ? pool + 2 : pool - 1);
    const int k = pick(rng);
    if (k < pool) {
      t.kind = tcurator::sparql::TermKind::Variable;
      t.value = "v" + std::to_string(k);
    } else {
      t.kind = tcurator::sparql::TermKind::Iri;
      t.value = "http://example.org/c" + std::to_string(k);
    }
    return t;
  }

  std::vector<TriplePattern> next(std::size_t max_patterns = 6) {
    std::uniform_int_distribution<std::size_t> count(1, max_patterns);
    const auto n = count(rng);
    pool = std::uniform_int_distribution<int>(1, 8)(rng);
    std::vector<TriplePattern> ps;
    for (std::size_t i = 0; i < n; ++i) {
      TriplePattern tp;
      tp.subject = term(true);
      tp.predicate = term(true);
      if (rng() % 4 != 0) {
        tp.predicate.kind = tcurator::sparql::TermKind::Iri;
        tp.predicate.value = "http://example.org/p" + std::to_string(i % 3);
      }
      tp.object = term(true);
      ps.push_back(std::move(tp));
    }
    return ps;
  }
};

// Renders a BGP as a SELECT query, renaming variables through `rename` and
// emitting the patterns in `order`.
inline std::string render_select(const std::vector<TriplePattern>& ps, const std::map<std::string, std::string>& rename,
                                 const std::vector<std::size_t>& order) {
  auto term = [&](const tcurator::sparql::Term& t) {
    if (t.is_variable()) return "?" + rename.at(t.value);
    if (t.kind == tcurator::sparql::TermKind::Iri) return "<" + t.value + ">";
    return t.value;
  };
  std::string q = "SELECT * WHERE {";
  for (auto i : order) {
    q += " " + term(ps[i].subject) + " " + term(ps[i].predicate) + " " + term(ps[i].object) + " .";
  }
  return q + " }";
}

inline std::vector<std::string> variable_list(const std::vector<TriplePattern>& ps) {
  std::set<std::string> all;
  for (const auto& tp : ps) {
    auto v = vars_of(tp);
    all.insert(v.begin(), v.end());
  }
  return {all.begin(), all.end()};
}

// Two BGPs are equivalent when some bijection of variables maps one pattern
// multiset onto the other. Every bijection is tried.
inline bool equivalent_bgp(const std::vector<TriplePattern>& a, const std::vector<TriplePattern>& b) {
  if (a.size() != b.size()) return false;
  const auto va = variable_list(a);
  auto vb = variable_list(b);
  if (va.size() != vb.size()) return false;
  auto key = [](const tcurator::sparql::Term& t, const std::map<std::string, std::string>* m) {
    if (t.is_variable()) return "?" + (m ? m->at(t.value) : t.value);
    return std::to_string(static_cast<int>(t.kind)) + t.value;
  };
  std::multiset<std::string> target;
  for (const auto& tp : b) {
    target.insert(key(tp.subject, nullptr) + " " + key(tp.predicate, nullptr) + " " + key(tp.object, nullptr));
  }
  std::sort(vb.begin(), vb.end());
  do {
    std::map<std::string, std::string> m;
    for (std::size_t i = 0; i < va.size(); ++i) m[va[i]] = vb[i];
    std::multiset<std::string> mapped;
    for (const auto& tp : a) mapped.insert(key(tp.subject, &m) + " " + key(tp.predicate, &m) + " " + key(tp.object, &m));
    if (mapped == target) return true;
  } while (std::next_permutation(vb.begin(), vb.end()));
  return false;
}

}  // namespace oracle
