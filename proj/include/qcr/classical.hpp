/*
 * This code is part of qcr.
 *
 * (C) Copyright 2026 the qcr developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QCR_CLASSICAL_HPP
#define QCR_CLASSICAL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qcr/graph.hpp"
#include "qcr/table.hpp"

namespace qcr {

//=========================================================================
// Functional models
//=========================================================================

// One node of a functional model: finite outcome domain, independent noise
// with its distribution, and a deterministic lookup-table function
// f(paV, eta) -> value. The lookup index is row-major over the parent
// values (parents ordered by their position in the DAG's node list)
// followed by the noise value.
struct ClassicalNode {
  std::string id;
  std::vector<std::string> domain;
  std::vector<std::string> noise_domain;
  std::vector<double> noise_probs;
  std::vector<Index> function;
};

struct FunctionalModel {
  CausalDag dag;
  std::vector<ClassicalNode> nodes;

  const ClassicalNode& node(const std::string& id) const;
  // Parents of a node in canonical order (DAG node-list order).
  std::vector<std::string> parents_of(const std::string& id) const;

  // Throws ValidationError unless noise distributions are normalized and
  // every function table is total over its declared domains.
  void validate() const;
};

// Exact P(V) by summing over all noise tuples.
OutcomeTable enumerate_distribution(const FunctionalModel& fm);

//=========================================================================
// Causal Markov Condition and interventions
//=========================================================================

struct CmcReport {
  bool ok = false;
  double max_deviation = 0.0;
  std::string witness_node;        // factor with the largest deviation
  Index skipped_configurations = 0;  // zero-probability parent rows
};

// Checks P(V) = prod_i P(V_i | paV_i) entrywise; zero-probability parent
// configurations are vacuous and counted as skipped.
CmcReport check_cmc(const OutcomeTable& t, const CausalDag& g,
                    double tolerance = 1e-12);

// P(V | do(node = value)) = delta(node, value)·prod_{i != node}
// P(V_i | paV_i), from the table's conditionals.
OutcomeTable do_distribution(const OutcomeTable& t, const CausalDag& g,
                             const std::string& node,
                             const std::string& value);

// Replace the node's function by the constant and cut its parent edges.
FunctionalModel mutilate(const FunctionalModel& fm, const std::string& node,
                         const std::string& value);

//=========================================================================
// Table information measures and sampling
//=========================================================================

// P(rest | node = value): slice and renormalize. Throws when the sliced
// marginal is zero.
OutcomeTable condition_on(const OutcomeTable& t, const std::string& node,
                          const std::string& value);

// Mutual information I(A;B) in bits from the pairwise marginal.
double mutual_information(const OutcomeTable& t, const std::string& a,
                          const std::string& b);

// Seeded empirical sampler (demonstration output only; every library
// computation works on exact tables).
std::vector<std::vector<Index>> sample_outcomes(const OutcomeTable& t,
                                                int n_samples,
                                                std::uint64_t seed);

}  // namespace qcr

#endif  // QCR_CLASSICAL_HPP
