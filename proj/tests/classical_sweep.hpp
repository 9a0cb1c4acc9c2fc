// Exhaustive functional-model sweep shared by the unit and acceptance
// suites: all DAGs on <= max_nodes nodes (edges in canonical label order),
// all binary lookup-table functions with two noise values per node, for a
// set of noise distributions.

#ifndef QCR_TESTS_CLASSICAL_SWEEP_HPP
#define QCR_TESTS_CLASSICAL_SWEEP_HPP

#include <cmath>
#include <vector>

#include "qcr/classical.hpp"

namespace qcr::test {

struct SweepResult {
  long models = 0;
  long interventions = 0;
  long unidentifiable = 0;  // do-values with zero observational support
  double max_cmc_deviation = 0.0;
  double max_do_deviation = 0.0;
  bool all_cmc_ok = true;
};

// Enumerate every assignment of a lookup table with `entries` binary
// values as the bits of one integer.
inline std::vector<Index> function_from_bits(unsigned bits, Index entries) {
  std::vector<Index> f(static_cast<std::size_t>(entries));
  for (Index i = 0; i < entries; ++i) f[i] = (bits >> i) & 1u;
  return f;
}

inline SweepResult sweep_binary_models(std::size_t n_nodes,
                                       const std::vector<double>& noise_a,
                                       const std::vector<double>& noise_b) {
  SweepResult result;
  const std::size_t n_edge_slots = n_nodes * (n_nodes - 1) / 2;

  for (unsigned mask = 0; mask < (1u << n_edge_slots); ++mask) {
    CausalDag dag;
    for (std::size_t i = 0; i < n_nodes; ++i) {
      dag.nodes.push_back({"V" + std::to_string(i + 1), 2});
    }
    unsigned bit = 0;
    for (std::size_t i = 0; i < n_nodes; ++i) {
      for (std::size_t j = i + 1; j < n_nodes; ++j, ++bit) {
        if (mask & (1u << bit)) {
          dag.edges.emplace_back(dag.nodes[i].id, dag.nodes[j].id);
        }
      }
    }

    // Per node: table size = 2^(#parents) * 2 noise values.
    std::vector<Index> table_entries;
    long total_models = 1;
    for (std::size_t i = 0; i < n_nodes; ++i) {
      Index parents = 0;
      for (const auto& [u, v] : dag.edges) {
        if (v == dag.nodes[i].id) ++parents;
      }
      table_entries.push_back(Index(1) << (parents + 1));
      total_models *= 1L << table_entries.back();
    }

    for (long model = 0; model < total_models; ++model) {
      long rem = model;
      FunctionalModel fm;
      fm.dag = dag;
      for (std::size_t i = 0; i < n_nodes; ++i) {
        const long choices = 1L << table_entries[i];
        const unsigned bits = static_cast<unsigned>(rem % choices);
        rem /= choices;
        ClassicalNode node;
        node.id = dag.nodes[i].id;
        node.domain = {"0", "1"};
        node.noise_domain = {"e0", "e1"};
        node.noise_probs = (i % 2 == 0) ? noise_a : noise_b;
        node.function = function_from_bits(bits, table_entries[i]);
        fm.nodes.push_back(node);
      }
      ++result.models;

      OutcomeTable t = enumerate_distribution(fm);
      auto cmc = check_cmc(t, fm.dag);
      result.max_cmc_deviation =
          std::max(result.max_cmc_deviation, cmc.max_deviation);
      result.all_cmc_ok = result.all_cmc_ok && cmc.ok;

      for (const auto& node : fm.nodes) {
        for (const auto& value : node.domain) {
          ++result.interventions;
          OutcomeTable via_mutilation =
              enumerate_distribution(mutilate(fm, node.id, value));
          try {
            OutcomeTable via_formula =
                do_distribution(t, fm.dag, node.id, value);
            result.max_do_deviation =
                std::max(result.max_do_deviation,
                         via_formula.max_abs_difference(via_mutilation));
          } catch (const ValidationError&) {
            // The do-target has zero observational support, so
            // conditional-based inference cannot see what mutilation
            // defines.
            ++result.unidentifiable;
          }
        }
      }
    }
  }
  return result;
}

}  // namespace qcr::test

#endif  // QCR_TESTS_CLASSICAL_SWEEP_HPP
