/*
 * This code is part of qcr.
 *
 * (C) Copyright 2026 the qcr developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QCR_SCHEME_HPP
#define QCR_SCHEME_HPP

#include <map>
#include <string>
#include <vector>

#include "qcr/instruments.hpp"
#include "qcr/process.hpp"
#include "qcr/table.hpp"

namespace qcr {

//=========================================================================
// Observational schemes
//=========================================================================

// One fixed instrument per node, the same for every run.
struct SchemeAssignment {
  std::vector<Instrument> instruments;

  const Instrument& for_node(const std::string& id) const;
  bool has_node(const std::string& id) const;

  static SchemeAssignment create(std::vector<Instrument> instruments);

  // SIC instrument on every node of the layering, dimension per layer
  // divided evenly across its nodes is not meaningful, so this helper is
  // for one-node-per-layer chains and explicit node dims.
  static SchemeAssignment sic_scheme(
      const std::vector<std::pair<std::string, Index>>& node_dims);
};

//=========================================================================
// Generalized Born rule
//=========================================================================

// P = tr[(⊗_i C(M_i))^T · W]: one Choi per node, tensored in layering
// order with each layer's factors regrouped to [I_j, O_j], the single
// global transpose realizing the transposed-slot pairing. Throws
// ConventionError when the imaginary residue exceeds tol::kImagResidue.
double born_probability(
    const Layering& layering,
    const std::map<std::string, const CPMap*>& elements,
    const AssembledProcess& w);

// Exact joint outcome table of the observational scheme: iterates the Born
// rule over every outcome tuple. Axes follow layering order.
OutcomeTable observational_distribution(const SchemeAssignment& scheme,
                                        const LayeredProcess& lp,
                                        int n_threads = 1);

// Same, with selected nodes using replacement instruments (quantum
// intervention by instrument substitution).
OutcomeTable intervened_distribution(
    const SchemeAssignment& scheme,
    const std::map<std::string, Instrument>& substitutions,
    const LayeredProcess& lp, int n_threads = 1);

//=========================================================================
// Chain conditionals
//=========================================================================

struct LayerConditional {
  std::vector<TableAxis> given_axes;
  std::vector<TableAxis> target_axes;
  // matrix(g, t) = P(target = t | given = g); rows with zero marginal are
  // flagged absent and hold zeros.
  Eigen::MatrixXd matrix;
  std::vector<bool> row_present;
};

struct ChainConditionals {
  OutcomeTable first_marginal;
  std::vector<LayerConditional> steps;
};

// P(y_1) and the per-step conditionals P(y_{j+1} | y_j) from pairwise
// marginals of adjacent layers.
ChainConditionals layer_conditionals(const OutcomeTable& t,
                                     const Layering& layering);

// Rebuild the joint table P(y_1)·prod_j P(y_{j+1}|y_j); axes in layering
// order. Used to check chain factorization.
OutcomeTable chain_joint(const ChainConditionals& chain);

}  // namespace qcr

#endif  // QCR_SCHEME_HPP
