/*
 * This code is part of qcr.
 *
 * (C) Copyright 2026 the qcr developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "qcr/scheme.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <thread>

#include "qcr/errors.hpp"

namespace qcr {

const Instrument& SchemeAssignment::for_node(const std::string& id) const {
  for (const auto& inst : instruments) {
    if (inst.node == id) return inst;
  }
  throw ValidationError("scheme has no instrument for node '" + id + "'");
}

bool SchemeAssignment::has_node(const std::string& id) const {
  return std::any_of(instruments.begin(), instruments.end(),
                     [&](const Instrument& i) { return i.node == id; });
}

SchemeAssignment SchemeAssignment::create(
    std::vector<Instrument> instruments) {
  std::set<std::string> seen;
  for (const auto& inst : instruments) {
    if (inst.node.empty()) {
      throw ValidationError("scheme instrument without a node id");
    }
    if (!seen.insert(inst.node).second) {
      throw ValidationError("duplicate scheme instrument for node '" +
                            inst.node + "'");
    }
  }
  return SchemeAssignment{std::move(instruments)};
}

SchemeAssignment SchemeAssignment::sic_scheme(
    const std::vector<std::pair<std::string, Index>>& node_dims) {
  std::vector<Instrument> instruments;
  for (const auto& [node, dim] : node_dims) {
    instruments.push_back(sic_instrument(dim, node));
  }
  return create(std::move(instruments));
}

//=========================================================================
// Born rule
//=========================================================================

namespace {

// Contraction operator of one layer on factor order [I_j, O_j], already
// transposed for the Born pairing.
ComplexMatrix layer_operator(const std::vector<const CPMap*>& maps) {
  if (maps.size() == 1) {
    return choi(*maps[0]).matrix.transpose();
  }
  std::vector<Factor> interleaved;
  std::vector<std::string> in_labels, out_labels;
  ComplexMatrix joint;
  for (std::size_t n = 0; n < maps.size(); ++n) {
    const std::string in = "in" + std::to_string(n);
    const std::string out = "out" + std::to_string(n);
    interleaved.push_back({in, maps[n]->in_dim, Role::In});
    interleaved.push_back({out, maps[n]->out_dim, Role::Out});
    in_labels.push_back(in);
    out_labels.push_back(out);
    ComplexMatrix c = choi(*maps[n]).matrix;
    joint = (n == 0) ? c : kron(joint, c);
  }
  std::vector<std::string> grouped = in_labels;
  grouped.insert(grouped.end(), out_labels.begin(), out_labels.end());
  auto [regrouped, l] =
      permute_factors(joint, SpaceLayout(interleaved), grouped);
  return regrouped.transpose();
}

double contract(const std::vector<ComplexMatrix>& layer_ops,
                const AssembledProcess& w) {
  ComplexMatrix big = kron_all(layer_ops);
  if (big.rows() != w.matrix.rows()) {
    throw ValidationError(
        "born_probability: instrument dims do not match the process");
  }
  const Complex p = (big * w.matrix).trace();
  if (std::abs(p.imag()) > tol::kImagResidue) {
    std::ostringstream msg;
    msg << "born_probability: imaginary residue " << p.imag()
        << " exceeds " << tol::kImagResidue
        << " (layout/permutation convention violation)";
    throw ConventionError(msg.str());
  }
  return p.real();
}

void check_square_instrument(const Instrument& inst) {
  if (inst.in_dim() != inst.out_dim()) {
    throw ValidationError("instrument on node '" + inst.node +
                          "' must have equal in/out dimension inside a "
                          "layered process");
  }
}

}  // namespace

double born_probability(
    const Layering& layering,
    const std::map<std::string, const CPMap*>& elements,
    const AssembledProcess& w) {
  std::vector<ComplexMatrix> layer_ops;
  for (const auto& layer : layering.layers) {
    std::vector<const CPMap*> maps;
    for (const auto& node : layer) {
      auto it = elements.find(node);
      if (it == elements.end()) {
        throw ValidationError("born_probability: no CP map for node '" +
                              node + "'");
      }
      maps.push_back(it->second);
    }
    layer_ops.push_back(layer_operator(maps));
  }
  return contract(layer_ops, w);
}

//=========================================================================
// Joint tables
//=========================================================================

namespace {

OutcomeTable joint_distribution(
    const std::vector<const Instrument*>& per_node,  // layering order
    const Layering& layering, const LayeredProcess& lp, int n_threads) {
  // Axes and layer bookkeeping.
  std::vector<TableAxis> axes;
  std::vector<std::size_t> layer_first_axis;
  {
    std::size_t axis = 0;
    std::size_t node_idx = 0;
    for (std::size_t j = 0; j < layering.layers.size(); ++j) {
      layer_first_axis.push_back(axis);
      Index layer_in = 1;
      for (std::size_t n = 0; n < layering.layers[j].size(); ++n) {
        const Instrument& inst = *per_node[node_idx++];
        check_square_instrument(inst);
        axes.push_back({inst.node, inst.outcomes});
        layer_in *= inst.in_dim();
        ++axis;
      }
      if (layer_in != lp.layer_dims[j]) {
        std::ostringstream msg;
        msg << "instrument dims of layer " << (j + 1) << " multiply to "
            << layer_in << " but the process layer has dim "
            << lp.layer_dims[j];
        throw ValidationError(msg.str());
      }
    }
  }

  const AssembledProcess w = assemble(lp);

  // Per layer, cache the contraction operator of every outcome combination.
  std::vector<std::vector<ComplexMatrix>> cache(layering.layers.size());
  {
    std::size_t node_idx = 0;
    for (std::size_t j = 0; j < layering.layers.size(); ++j) {
      const std::size_t width = layering.layers[j].size();
      std::vector<const Instrument*> insts(
          per_node.begin() + static_cast<long>(node_idx),
          per_node.begin() + static_cast<long>(node_idx + width));
      node_idx += width;
      Index combos = 1;
      for (const auto* inst : insts) combos *= inst->n_outcomes();
      cache[j].reserve(combos);
      for (Index combo = 0; combo < combos; ++combo) {
        Index rem = combo;
        std::vector<const CPMap*> maps(width);
        for (std::size_t n = width; n-- > 0;) {
          const Index count = insts[n]->n_outcomes();
          maps[n] = &insts[n]->maps[rem % count];
          rem /= count;
        }
        cache[j].push_back(layer_operator(maps));
      }
    }
  }

  OutcomeTable shape(axes);
  std::vector<double> probs(static_cast<std::size_t>(shape.n_entries()));
  auto worker = [&](Index begin, Index end) {
    std::vector<ComplexMatrix> ops(layering.layers.size());
    for (Index flat = begin; flat < end; ++flat) {
      const auto multi = shape.unflatten(flat);
      for (std::size_t j = 0; j < layering.layers.size(); ++j) {
        Index combo = 0;
        for (std::size_t n = 0; n < layering.layers[j].size(); ++n) {
          const std::size_t a = layer_first_axis[j] + n;
          combo = combo * static_cast<Index>(axes[a].labels.size()) +
                  multi[a];
        }
        ops[j] = cache[j][static_cast<std::size_t>(combo)];
      }
      probs[static_cast<std::size_t>(flat)] = contract(ops, w);
    }
  };

  const Index total = shape.n_entries();
  n_threads = std::max(1, n_threads);
  if (n_threads == 1 || total < 64) {
    worker(0, total);
  } else {
    std::vector<std::thread> pool;
    const Index chunk = (total + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
      const Index begin = t * chunk;
      const Index end = std::min(total, begin + chunk);
      if (begin < end) pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  OutcomeTable table = OutcomeTable::from_probabilities(axes, probs);
  if (!table.is_normalized(tol::kDefault)) {
    std::ostringstream msg;
    msg << "joint distribution sums to " << table.sum()
        << " instead of 1 (non-trace-preserving scheme?)";
    throw ConventionError(msg.str());
  }
  return table;
}

std::vector<const Instrument*> scheme_pointers(
    const SchemeAssignment& scheme, const Layering& layering) {
  std::vector<const Instrument*> out;
  for (const auto& layer : layering.layers) {
    for (const auto& node : layer) {
      out.push_back(&scheme.for_node(node));
    }
  }
  return out;
}

}  // namespace

OutcomeTable observational_distribution(const SchemeAssignment& scheme,
                                        const LayeredProcess& lp,
                                        int n_threads) {
  return joint_distribution(scheme_pointers(scheme, lp.layering),
                            lp.layering, lp, n_threads);
}

OutcomeTable intervened_distribution(
    const SchemeAssignment& scheme,
    const std::map<std::string, Instrument>& substitutions,
    const LayeredProcess& lp, int n_threads) {
  auto per_node = scheme_pointers(scheme, lp.layering);
  std::size_t node_idx = 0;
  std::size_t used = 0;
  for (const auto& layer : lp.layering.layers) {
    for (const auto& node : layer) {
      auto it = substitutions.find(node);
      if (it != substitutions.end()) {
        if (it->second.in_dim() != per_node[node_idx]->in_dim()) {
          throw ValidationError(
              "substituted instrument on node '" + node +
              "' does not match the node dimension");
        }
        per_node[node_idx] = &it->second;
        ++used;
      }
      ++node_idx;
    }
  }
  if (used != substitutions.size()) {
    throw ValidationError(
        "intervened_distribution: substitution names a node outside the "
        "process");
  }
  return joint_distribution(per_node, lp.layering, lp, n_threads);
}

//=========================================================================
// Chain conditionals
//=========================================================================

ChainConditionals layer_conditionals(const OutcomeTable& t,
                                     const Layering& layering) {
  std::size_t covered = 0;
  for (const auto& layer : layering.layers) {
    for (const auto& node : layer) {
      t.axis_of(node);  // throws if missing
      ++covered;
    }
  }
  if (covered != t.n_axes()) {
    throw ValidationError(
        "layer_conditionals: table axes do not partition by layers");
  }

  // marginal() keeps the table's own axis order, which need not follow the
  // layering (bayes inversion passes a reversed layering); reorder so the
  // conditioning layer's axes really come first.
  ChainConditionals chain{t.marginal(layering.layers.front())
                              .reordered(layering.layers.front()),
                          {}};
  for (std::size_t j = 0; j + 1 < layering.layers.size(); ++j) {
    std::vector<std::string> pair_nodes = layering.layers[j];
    pair_nodes.insert(pair_nodes.end(), layering.layers[j + 1].begin(),
                      layering.layers[j + 1].end());
    OutcomeTable joint = t.marginal(pair_nodes).reordered(pair_nodes);

    LayerConditional cond;
    Index given_count = 1, target_count = 1;
    for (std::size_t a = 0; a < joint.n_axes(); ++a) {
      if (a < layering.layers[j].size()) {
        cond.given_axes.push_back(joint.axis(a));
        given_count *= static_cast<Index>(joint.axis(a).labels.size());
      } else {
        cond.target_axes.push_back(joint.axis(a));
        target_count *= static_cast<Index>(joint.axis(a).labels.size());
      }
    }
    cond.matrix = Eigen::MatrixXd::Zero(given_count, target_count);
    cond.row_present.assign(static_cast<std::size_t>(given_count), false);
    for (Index g = 0; g < given_count; ++g) {
      double row_sum = 0.0;
      for (Index tt = 0; tt < target_count; ++tt) {
        row_sum += joint.at_flat(g * target_count + tt);
      }
      if (row_sum > 1e-14) {
        cond.row_present[static_cast<std::size_t>(g)] = true;
        for (Index tt = 0; tt < target_count; ++tt) {
          cond.matrix(g, tt) =
              joint.at_flat(g * target_count + tt) / row_sum;
        }
      }
    }
    chain.steps.push_back(std::move(cond));
  }
  return chain;
}

OutcomeTable chain_joint(const ChainConditionals& chain) {
  std::vector<TableAxis> axes = chain.first_marginal.axes();
  for (const auto& step : chain.steps) {
    axes.insert(axes.end(), step.target_axes.begin(),
                step.target_axes.end());
  }
  OutcomeTable out(axes);

  // Per-layer flat sizes.
  std::vector<Index> layer_sizes{chain.first_marginal.n_entries()};
  for (const auto& step : chain.steps) {
    layer_sizes.push_back(step.matrix.cols());
  }

  for (Index flat = 0; flat < out.n_entries(); ++flat) {
    Index rem = flat;
    std::vector<Index> layer_idx(layer_sizes.size());
    for (std::size_t j = layer_sizes.size(); j-- > 0;) {
      layer_idx[j] = rem % layer_sizes[j];
      rem /= layer_sizes[j];
    }
    double p = chain.first_marginal.at_flat(layer_idx[0]);
    for (std::size_t j = 0; j < chain.steps.size() && p > 0.0; ++j) {
      const auto& step = chain.steps[j];
      if (!step.row_present[static_cast<std::size_t>(layer_idx[j])]) {
        p = 0.0;
        break;
      }
      p *= step.matrix(layer_idx[j], layer_idx[j + 1]);
    }
    out.set_flat(flat, p);
  }
  return out;
}

}  // namespace qcr
