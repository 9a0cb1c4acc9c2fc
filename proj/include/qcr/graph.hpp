/*
 * This code is part of qcr.
 *
 * (C) Copyright 2026 the qcr developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QCR_GRAPH_HPP
#define QCR_GRAPH_HPP

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qcr/tensor.hpp"

namespace qcr {

struct DagNode {
  std::string id;
  Index dim = 2;
};

struct CausalDag {
  std::vector<DagNode> nodes;
  std::vector<std::pair<std::string, std::string>> edges;

  Index node_index(const std::string& id) const;
  Index dim_of(const std::string& id) const;
  bool has_node(const std::string& id) const;
};

// Ordered partition of the node set; layer k feeds layer k+1.
struct Layering {
  std::vector<std::vector<std::string>> layers;

  std::size_t layer_of(const std::string& id) const;
};

struct CycleWitness {
  std::vector<std::string> cycle;  // closed walk, first node repeated last
};

// Interception failure: a directed path from set `lower` to set `upper`
// that never touches set `middle` (1-based set indices in the longest-path
// partition).
struct LayeringFailure {
  std::size_t lower = 0;
  std::size_t middle = 0;
  std::size_t upper = 0;
  std::vector<std::string> path;
};

// Structural validation (unique ids, declared endpoints) throws
// ValidationError; returns a cycle witness when the graph is cyclic,
// std::nullopt when it is a DAG.
std::optional<CycleWitness> validate_dag(const CausalDag& g);

// Longest-path partition: S_j holds the nodes whose longest directed path
// from any root has length j-1. Rejects cyclic input.
std::vector<std::vector<std::string>> topological_sets(const CausalDag& g);

// Accepts iff each weakly-connected component admits a potential increasing
// by exactly 1 along every edge; the returned layering normalizes each
// component to start at layer 1. Isolated nodes land in layer 1.
std::variant<Layering, LayeringFailure> check_layered(const CausalDag& g);

// Arrow reversal G -> G*.
CausalDag reverse(const CausalDag& g);

}  // namespace qcr

#endif  // QCR_GRAPH_HPP
