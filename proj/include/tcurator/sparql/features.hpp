#pragma once

#include <cstddef>
#include <vector>

#include "tcurator/sparql/ast.hpp"

namespace tcurator::sparql {

/// Undirected graph with one node per triple pattern and an edge between
/// patterns that share at least one variable.
struct JoinGraph {
  std::vector<std::vector<std::size_t>> adjacency;

  std::size_t node_count() const noexcept { return adjacency.size(); }
  std::size_t degree(std::size_t v) const noexcept { return adjacency[v].size(); }
};

JoinGraph build_join_graph(const std::vector<TriplePattern>& patterns);

/// Connected components, each as a sorted node list.
std::vector<std::vector<std::size_t>> connected_components(const JoinGraph& g);

/// True when the pattern/variable incidence graph contains a cycle, i.e. two
/// patterns share two variables or a closed loop of joins exists.
bool has_join_cycle(const std::vector<TriplePattern>& patterns);

QueryShape classify_shape(const std::vector<TriplePattern>& patterns);

/// Longest simple path, in edges, inside the largest connected component.
std::size_t join_depth(const std::vector<TriplePattern>& patterns);

QueryFeatures extract_features(const ParsedQuery& q);

}  // namespace tcurator::sparql
