/*
 * This code is part of qcr.
 *
 * (C) Copyright 2026 the qcr developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "qcr/classical.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "qcr/errors.hpp"

namespace qcr {

const ClassicalNode& FunctionalModel::node(const std::string& id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return n;
  }
  throw ValidationError("functional model has no node '" + id + "'");
}

std::vector<std::string> FunctionalModel::parents_of(
    const std::string& id) const {
  std::vector<std::string> parents;
  for (const auto& n : dag.nodes) {
    for (const auto& [u, v] : dag.edges) {
      if (v == id && u == n.id) parents.push_back(u);
    }
  }
  return parents;
}

void FunctionalModel::validate() const {
  if (auto cycle = validate_dag(dag)) {
    throw ValidationError("functional model graph has a cycle through '" +
                          cycle->cycle.front() + "'");
  }
  if (nodes.size() != dag.nodes.size()) {
    throw ValidationError("functional model must define every DAG node");
  }
  for (const auto& n : nodes) {
    dag.node_index(n.id);
    if (n.domain.empty() || n.noise_domain.empty()) {
      throw ValidationError("node '" + n.id + "' has an empty domain");
    }
    if (n.noise_probs.size() != n.noise_domain.size()) {
      throw ValidationError("node '" + n.id +
                            "' noise distribution shape mismatch");
    }
    double total = 0.0;
    for (double p : n.noise_probs) {
      if (p < 0.0) {
        throw ValidationError("node '" + n.id +
                              "' has a negative noise probability");
      }
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw ValidationError("node '" + n.id +
                            "' noise distribution does not sum to 1");
    }
    std::size_t expected = n.noise_domain.size();
    for (const auto& pid : parents_of(n.id)) {
      expected *= node(pid).domain.size();
    }
    if (n.function.size() != expected) {
      throw ValidationError("node '" + n.id +
                            "' function table is not total (expected " +
                            std::to_string(expected) + " entries)");
    }
    for (Index v : n.function) {
      if (v < 0 || v >= static_cast<Index>(n.domain.size())) {
        throw ValidationError("node '" + n.id +
                              "' function value out of domain");
      }
    }
  }
}

OutcomeTable enumerate_distribution(const FunctionalModel& fm) {
  fm.validate();

  // Topological order of node ids.
  std::vector<std::string> order;
  for (const auto& s : topological_sets(fm.dag)) {
    order.insert(order.end(), s.begin(), s.end());
  }

  // Axes in DAG node-list order.
  std::vector<TableAxis> axes;
  for (const auto& dn : fm.dag.nodes) {
    axes.push_back({dn.id, fm.node(dn.id).domain});
  }
  OutcomeTable table(axes);

  // Iterate every noise tuple.
  std::vector<Index> noise_sizes;
  Index total_noise = 1;
  for (const auto& dn : fm.dag.nodes) {
    noise_sizes.push_back(
        static_cast<Index>(fm.node(dn.id).noise_domain.size()));
    total_noise *= noise_sizes.back();
  }
  std::map<std::string, std::size_t> axis_pos;
  for (std::size_t i = 0; i < axes.size(); ++i) axis_pos[axes[i].node] = i;

  for (Index tuple = 0; tuple < total_noise; ++tuple) {
    Index rem = tuple;
    std::vector<Index> eta(noise_sizes.size());
    double weight = 1.0;
    for (std::size_t i = noise_sizes.size(); i-- > 0;) {
      eta[i] = rem % noise_sizes[i];
      rem /= noise_sizes[i];
      weight *= fm.node(fm.dag.nodes[i].id)
                    .noise_probs[static_cast<std::size_t>(eta[i])];
    }
    if (weight == 0.0) continue;

    // Progressively determine the node values.
    std::vector<Index> values(axes.size(), 0);
    for (const auto& id : order) {
      const ClassicalNode& n = fm.node(id);
      Index idx = 0;
      for (const auto& pid : fm.parents_of(id)) {
        idx = idx * static_cast<Index>(fm.node(pid).domain.size()) +
              values[axis_pos[pid]];
      }
      const std::size_t self = axis_pos[id];
      idx = idx * static_cast<Index>(n.noise_domain.size()) +
            eta[fm.dag.node_index(id)];
      values[self] = n.function[static_cast<std::size_t>(idx)];
    }
    const Index flat = table.flatten(values);
    table.set_flat(flat, table.at_flat(flat) + weight);
  }
  return table;
}

//=========================================================================
// CMC and do()
//=========================================================================

namespace {

// P(node = v | parents = config) for every node value, from marginals of
// t; returns false when the parent configuration has zero probability.
struct NodeConditionals {
  std::string node;
  std::vector<std::string> parents;
  // flat parent config -> per-value conditional (empty when absent).
  std::vector<std::vector<double>> rows;
  std::vector<Index> parent_sizes;

  Index config_of(const std::vector<Index>& multi,
                  const OutcomeTable& t) const {
    Index config = 0;
    for (std::size_t p = 0; p < parents.size(); ++p) {
      config = config * parent_sizes[p] +
               multi[t.axis_of(parents[p])];
    }
    return config;
  }
};

NodeConditionals node_conditionals(const OutcomeTable& t,
                                   const CausalDag& g,
                                   const std::string& id) {
  NodeConditionals nc;
  nc.node = id;
  for (const auto& n : g.nodes) {
    for (const auto& [u, v] : g.edges) {
      if (v == id && u == n.id) nc.parents.push_back(u);
    }
  }
  std::vector<std::string> family = nc.parents;
  family.push_back(id);
  OutcomeTable joint = t.marginal(family).reordered(family);

  Index configs = 1;
  for (const auto& p : nc.parents) {
    nc.parent_sizes.push_back(
        static_cast<Index>(t.axis(t.axis_of(p)).labels.size()));
    configs *= nc.parent_sizes.back();
  }
  const Index values =
      static_cast<Index>(t.axis(t.axis_of(id)).labels.size());
  nc.rows.resize(static_cast<std::size_t>(configs));
  for (Index c = 0; c < configs; ++c) {
    double row_sum = 0.0;
    for (Index v = 0; v < values; ++v) row_sum += joint.at_flat(c * values + v);
    if (row_sum > 0.0) {
      auto& row = nc.rows[static_cast<std::size_t>(c)];
      row.resize(static_cast<std::size_t>(values));
      for (Index v = 0; v < values; ++v) {
        row[static_cast<std::size_t>(v)] =
            joint.at_flat(c * values + v) / row_sum;
      }
    }
  }
  return nc;
}

}  // namespace

CmcReport check_cmc(const OutcomeTable& t, const CausalDag& g,
                    double tolerance) {
  if (!t.is_normalized(tol::kDefault)) {
    throw ValidationError("check_cmc: table is not normalized");
  }
  std::vector<NodeConditionals> all;
  for (const auto& n : g.nodes) all.push_back(node_conditionals(t, g, n.id));

  CmcReport report;
  Index skipped = 0;
  for (Index flat = 0; flat < t.n_entries(); ++flat) {
    const auto multi = t.unflatten(flat);
    double product = 1.0;
    bool vacuous = false;
    for (const auto& nc : all) {
      const Index config = nc.config_of(multi, t);
      const auto& row = nc.rows[static_cast<std::size_t>(config)];
      if (row.empty()) {
        vacuous = true;  // zero-probability parent configuration
        break;
      }
      product *= row[static_cast<std::size_t>(multi[t.axis_of(nc.node)])];
    }
    if (vacuous) {
      ++skipped;
      continue;
    }
    report.max_deviation =
        std::max(report.max_deviation, std::abs(product - t.at_flat(flat)));
  }
  report.skipped_configurations = skipped;
  report.ok = report.max_deviation <= tolerance;

  // Witness: by the chain rule, CMC fails at the node whose conditional on
  // its topological predecessors differs from its conditional on parents.
  if (!report.ok) {
    std::vector<std::string> topo;
    for (const auto& s : topological_sets(g)) {
      topo.insert(topo.end(), s.begin(), s.end());
    }
    double worst = -1.0;
    std::vector<std::string> preds;
    for (const auto& id : topo) {
      double dev = 0.0;
      if (!preds.empty()) {
        std::vector<std::string> family = preds;
        family.push_back(id);
        OutcomeTable joint = t.marginal(family).reordered(family);
        const Index values =
            static_cast<Index>(t.axis(t.axis_of(id)).labels.size());
        const Index configs = joint.n_entries() / values;
        const auto& nc = all[static_cast<std::size_t>(g.node_index(id))];
        for (Index c = 0; c < configs; ++c) {
          double row_sum = 0.0;
          for (Index v = 0; v < values; ++v) {
            row_sum += joint.at_flat(c * values + v);
          }
          if (row_sum <= 0.0) continue;
          // Reconstruct the parent configuration from this predecessor
          // configuration via any completing tuple.
          std::vector<Index> pred_multi(preds.size());
          Index rem = c;
          for (std::size_t p = preds.size(); p-- > 0;) {
            pred_multi[p] =
                rem % static_cast<Index>(
                          t.axis(t.axis_of(preds[p])).labels.size());
            rem /= static_cast<Index>(
                t.axis(t.axis_of(preds[p])).labels.size());
          }
          std::vector<Index> full(t.n_axes(), 0);
          for (std::size_t p = 0; p < preds.size(); ++p) {
            full[t.axis_of(preds[p])] = pred_multi[p];
          }
          const Index config = nc.config_of(full, t);
          const auto& row = nc.rows[static_cast<std::size_t>(config)];
          if (row.empty()) continue;
          for (Index v = 0; v < values; ++v) {
            dev = std::max(dev,
                           std::abs(joint.at_flat(c * values + v) / row_sum -
                                    row[static_cast<std::size_t>(v)]));
          }
        }
      }
      if (dev > worst) {
        worst = dev;
        report.witness_node = id;
      }
      preds.push_back(id);
    }
  }
  return report;
}

OutcomeTable do_distribution(const OutcomeTable& t, const CausalDag& g,
                             const std::string& node,
                             const std::string& value) {
  const auto& axis = t.axis(t.axis_of(node));
  const auto it = std::find(axis.labels.begin(), axis.labels.end(), value);
  if (it == axis.labels.end()) {
    throw ValidationError("do_distribution: value '" + value +
                          "' outside the domain of '" + node + "'");
  }
  const Index pinned =
      static_cast<Index>(std::distance(axis.labels.begin(), it));

  std::vector<NodeConditionals> others;
  for (const auto& n : g.nodes) {
    if (n.id != node) others.push_back(node_conditionals(t, g, n.id));
  }
  OutcomeTable out(t.axes());
  for (Index flat = 0; flat < t.n_entries(); ++flat) {
    const auto multi = t.unflatten(flat);
    if (multi[t.axis_of(node)] != pinned) continue;
    double product = 1.0;
    bool undefined = false;
    for (const auto& nc : others) {
      const Index config = nc.config_of(multi, t);
      const auto& row = nc.rows[static_cast<std::size_t>(config)];
      if (row.empty()) {
        undefined = true;  // zero-probability parent configuration
        continue;
      }
      product *= row[static_cast<std::size_t>(multi[t.axis_of(nc.node)])];
    }
    if (undefined && product > 0.0) {
      // A needed conditional has no observational support: the
      // interventional distribution is not identifiable from the table.
      throw ValidationError(
          "do_distribution: do(" + node + " = " + value +
          ") requires a conditional with zero observational support");
    }
    out.set_flat(flat, undefined ? 0.0 : product);
  }
  return out;
}

FunctionalModel mutilate(const FunctionalModel& fm, const std::string& node,
                         const std::string& value) {
  const ClassicalNode& target = fm.node(node);
  const auto it =
      std::find(target.domain.begin(), target.domain.end(), value);
  if (it == target.domain.end()) {
    throw ValidationError("mutilate: value '" + value +
                          "' outside the domain of '" + node + "'");
  }
  const Index pinned =
      static_cast<Index>(std::distance(target.domain.begin(), it));

  FunctionalModel out = fm;
  auto& edges = out.dag.edges;
  edges.erase(std::remove_if(edges.begin(), edges.end(),
                             [&](const auto& e) { return e.second == node; }),
              edges.end());
  for (auto& n : out.nodes) {
    if (n.id == node) {
      n.function.assign(n.noise_domain.size(), pinned);
    }
  }
  out.validate();
  return out;
}

//=========================================================================
// Information measures and sampling
//=========================================================================

OutcomeTable condition_on(const OutcomeTable& t, const std::string& node,
                          const std::string& value) {
  const auto& axis = t.axis(t.axis_of(node));
  const auto it = std::find(axis.labels.begin(), axis.labels.end(), value);
  if (it == axis.labels.end()) {
    throw ValidationError("condition_on: value '" + value +
                          "' outside the domain of '" + node + "'");
  }
  const Index pinned =
      static_cast<Index>(std::distance(axis.labels.begin(), it));
  const std::size_t pos = t.axis_of(node);

  std::vector<TableAxis> rest_axes;
  for (std::size_t i = 0; i < t.n_axes(); ++i) {
    if (i != pos) rest_axes.push_back(t.axis(i));
  }
  OutcomeTable out(rest_axes);
  double total = 0.0;
  for (Index flat = 0; flat < t.n_entries(); ++flat) {
    const auto multi = t.unflatten(flat);
    if (multi[pos] != pinned) continue;
    std::vector<Index> rest;
    for (std::size_t i = 0; i < multi.size(); ++i) {
      if (i != pos) rest.push_back(multi[i]);
    }
    out.set(rest, t.at_flat(flat));
    total += t.at_flat(flat);
  }
  if (total <= 0.0) {
    throw ValidationError("condition_on: conditioning event '" + node +
                          " = " + value + "' has zero probability");
  }
  for (Index flat = 0; flat < out.n_entries(); ++flat) {
    out.set_flat(flat, out.at_flat(flat) / total);
  }
  return out;
}

double mutual_information(const OutcomeTable& t, const std::string& a,
                          const std::string& b) {
  OutcomeTable joint = t.marginal({a, b}).reordered({a, b});
  OutcomeTable pa = t.marginal({a});
  OutcomeTable pb = t.marginal({b});
  const Index na = pa.n_entries(), nb = pb.n_entries();
  double mi = 0.0;
  for (Index i = 0; i < na; ++i) {
    for (Index j = 0; j < nb; ++j) {
      const double pab = joint.at_flat(i * nb + j);
      if (pab <= 0.0) continue;
      mi += pab * std::log2(pab / (pa.at_flat(i) * pb.at_flat(j)));
    }
  }
  return std::max(0.0, mi);
}

std::vector<std::vector<Index>> sample_outcomes(const OutcomeTable& t,
                                                int n_samples,
                                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<std::vector<Index>> samples;
  samples.reserve(static_cast<std::size_t>(n_samples));
  for (int s = 0; s < n_samples; ++s) {
    double u = uniform(rng);
    Index flat = 0;
    for (; flat < t.n_entries() - 1; ++flat) {
      u -= t.at_flat(flat);
      if (u <= 0.0) break;
    }
    samples.push_back(t.unflatten(flat));
  }
  return samples;
}

}  // namespace qcr
