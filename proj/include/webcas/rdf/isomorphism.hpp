#pragma once

#include "webcas/rdf/graph.hpp"

namespace webcas::rdf {

/// True iff some bijection between blank-node labels maps `a` onto `b`.
/// Blank nodes are partitioned by iterated neighbourhood signatures;
/// remaining ties are resolved by backtracking.
bool graph_isomorphic(const Graph& a, const Graph& b);

/// Renames every blank node to `prefix` + a running counter, in sorted order
/// of the original labels.
Graph relabel_blank_nodes(const Graph& graph, const std::string& prefix);

}  // namespace webcas::rdf
