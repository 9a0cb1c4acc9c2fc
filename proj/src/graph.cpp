/*
 * This code is part of qcr.
 *
 * (C) Copyright 2026 the qcr developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "qcr/graph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "qcr/errors.hpp"

namespace qcr {

Index CausalDag::node_index(const std::string& id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id == id) return static_cast<Index>(i);
  }
  throw ValidationError("unknown node id '" + id + "'");
}

Index CausalDag::dim_of(const std::string& id) const {
  return nodes[node_index(id)].dim;
}

bool CausalDag::has_node(const std::string& id) const {
  return std::any_of(nodes.begin(), nodes.end(),
                     [&](const DagNode& n) { return n.id == id; });
}

std::size_t Layering::layer_of(const std::string& id) const {
  for (std::size_t k = 0; k < layers.size(); ++k) {
    for (const auto& n : layers[k]) {
      if (n == id) return k;
    }
  }
  throw ValidationError("node '" + id + "' not present in layering");
}

namespace {

struct Adjacency {
  std::vector<std::vector<Index>> children;
  std::vector<std::vector<Index>> parents;
};

void check_structure(const CausalDag& g) {
  std::set<std::string> seen;
  for (const auto& n : g.nodes) {
    if (n.dim < 1) {
      throw ValidationError("node '" + n.id + "' has non-positive dimension");
    }
    if (!seen.insert(n.id).second) {
      throw ValidationError("duplicate node id '" + n.id + "'");
    }
  }
  for (const auto& [u, v] : g.edges) {
    if (!g.has_node(u) || !g.has_node(v)) {
      throw ValidationError("edge (" + u + ", " + v +
                            ") references an undeclared node");
    }
  }
}

Adjacency build_adjacency(const CausalDag& g) {
  Adjacency adj;
  adj.children.resize(g.nodes.size());
  adj.parents.resize(g.nodes.size());
  for (const auto& [u, v] : g.edges) {
    Index ui = g.node_index(u), vi = g.node_index(v);
    adj.children[ui].push_back(vi);
    adj.parents[vi].push_back(ui);
  }
  return adj;
}

// DFS that returns the first directed cycle found, if any.
std::optional<std::vector<Index>> find_cycle(const Adjacency& adj,
                                             std::size_t n) {
  enum class Color { White, Gray, Black };
  std::vector<Color> color(n, Color::White);
  std::vector<Index> stack;

  // Iterative DFS keeping the gray path on `stack`.
  std::optional<std::vector<Index>> result;
  auto visit = [&](Index start, auto&& self) -> bool {
    color[start] = Color::Gray;
    stack.push_back(start);
    for (Index c : adj.children[start]) {
      if (color[c] == Color::Gray) {
        auto it = std::find(stack.begin(), stack.end(), c);
        std::vector<Index> cycle(it, stack.end());
        cycle.push_back(c);
        result = cycle;
        return true;
      }
      if (color[c] == Color::White && self(c, self)) return true;
    }
    stack.pop_back();
    color[start] = Color::Black;
    return false;
  };
  for (Index s = 0; s < static_cast<Index>(n); ++s) {
    if (color[s] == Color::White && visit(s, visit)) return result;
  }
  return std::nullopt;
}

// Longest-path level of every node (0-based); assumes acyclic.
std::vector<Index> longest_path_levels(const CausalDag& g,
                                       const Adjacency& adj) {
  const std::size_t n = g.nodes.size();
  std::vector<Index> indeg(n, 0), level(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    indeg[v] = static_cast<Index>(adj.parents[v].size());
  }
  std::deque<Index> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (indeg[v] == 0) ready.push_back(static_cast<Index>(v));
  }
  while (!ready.empty()) {
    Index u = ready.front();
    ready.pop_front();
    for (Index c : adj.children[u]) {
      level[c] = std::max(level[c], level[u] + 1);
      if (--indeg[c] == 0) ready.push_back(c);
    }
  }
  return level;
}

}  // namespace

std::optional<CycleWitness> validate_dag(const CausalDag& g) {
  check_structure(g);
  auto adj = build_adjacency(g);
  if (auto cycle = find_cycle(adj, g.nodes.size())) {
    CycleWitness w;
    for (Index i : *cycle) w.cycle.push_back(g.nodes[i].id);
    return w;
  }
  return std::nullopt;
}

std::vector<std::vector<std::string>> topological_sets(const CausalDag& g) {
  if (auto cycle = validate_dag(g)) {
    throw ValidationError("topological_sets: graph has a cycle through '" +
                          cycle->cycle.front() + "'");
  }
  auto adj = build_adjacency(g);
  auto level = longest_path_levels(g, adj);
  Index depth = 0;
  for (Index l : level) depth = std::max(depth, l + 1);
  std::vector<std::vector<std::string>> sets(g.nodes.empty() ? 0 : depth);
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    sets[level[v]].push_back(g.nodes[v].id);
  }
  return sets;
}

std::variant<Layering, LayeringFailure> check_layered(const CausalDag& g) {
  if (auto cycle = validate_dag(g)) {
    throw ValidationError("check_layered: graph has a cycle through '" +
                          cycle->cycle.front() + "'");
  }
  auto adj = build_adjacency(g);
  const std::size_t n = g.nodes.size();

  // Per weakly-connected component, propagate a potential that must grow by
  // exactly 1 along every directed edge. A conflict means some pair of
  // directed paths between the same endpoints have different lengths, which
  // is exactly an interception failure.
  std::vector<Index> potential(n, 0);
  std::vector<int> component(n, -1);
  bool consistent = true;
  int comp_count = 0;
  for (std::size_t s = 0; s < n && consistent; ++s) {
    if (component[s] >= 0) continue;
    const int comp = comp_count++;
    std::deque<Index> queue{static_cast<Index>(s)};
    component[s] = comp;
    potential[s] = 0;
    while (!queue.empty() && consistent) {
      Index u = queue.front();
      queue.pop_front();
      auto relax = [&](Index w, Index expected) {
        if (component[w] < 0) {
          component[w] = comp;
          potential[w] = expected;
          queue.push_back(w);
        } else if (potential[w] != expected) {
          consistent = false;
        }
      };
      for (Index c : adj.children[u]) relax(c, potential[u] + 1);
      for (Index p : adj.parents[u]) relax(p, potential[u] - 1);
    }
  }

  if (!consistent) {
    // An unlayered graph always has an edge spanning >= 2 longest-path
    // levels (otherwise those levels would be a consistent potential).
    auto level = longest_path_levels(g, adj);
    for (const auto& [u, v] : g.edges) {
      Index lu = level[g.node_index(u)], lv = level[g.node_index(v)];
      if (lv - lu >= 2) {
        LayeringFailure f;
        f.lower = static_cast<std::size_t>(lu) + 1;
        f.middle = static_cast<std::size_t>(lu) + 2;
        f.upper = static_cast<std::size_t>(lv) + 1;
        f.path = {u, v};
        return f;
      }
    }
    throw Error("check_layered: internal witness search failed");
  }

  // Normalize each component to start at layer 1 and merge by level.
  std::vector<Index> comp_min(comp_count, 0);
  for (std::size_t v = 0; v < n; ++v) {
    comp_min[component[v]] = std::min(comp_min[component[v]], potential[v]);
  }
  Index depth = 0;
  std::vector<Index> layer_of(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    layer_of[v] = potential[v] - comp_min[component[v]];
    depth = std::max(depth, layer_of[v] + 1);
  }
  Layering layering;
  layering.layers.resize(n == 0 ? 0 : depth);
  for (std::size_t v = 0; v < n; ++v) {
    layering.layers[layer_of[v]].push_back(g.nodes[v].id);
  }
  return layering;
}

CausalDag reverse(const CausalDag& g) {
  CausalDag out;
  out.nodes = g.nodes;
  out.edges.reserve(g.edges.size());
  for (const auto& [u, v] : g.edges) out.edges.emplace_back(v, u);
  return out;
}

}  // namespace qcr
