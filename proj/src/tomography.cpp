/*
 * This code is part of qcr.
 *
 * (C) Copyright 2026 the qcr developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "qcr/tomography.hpp"

#include <cmath>
#include <sstream>

#include "qcr/errors.hpp"

namespace qcr {

ProjectiveLayerData layer_projective_data(
    const std::vector<const Instrument*>& nodes) {
  ProjectiveLayerData data;
  data.projectors = {ComplexMatrix::Identity(1, 1)};
  data.beta = {1.0};
  for (const auto* inst : nodes) {
    if (!is_minimal(*inst)) {
      throw ValidationError("node '" + inst->node +
                            "': reconstruction requires minimal "
                            "instruments (d² outcomes, equal dims)");
    }
    const Index d = inst->in_dim();
    const ComplexMatrix mixed =
        ComplexMatrix::Identity(d, d) / static_cast<double>(d);
    std::vector<ComplexMatrix> projectors;
    std::vector<double> beta;
    for (const auto& m : inst->maps) {
      ComplexMatrix f = povm_element(m);
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(f);
      const Index top = d - 1;  // eigenvalues ascending
      const double b = solver.eigenvalues()(top);
      ComplexMatrix pi =
          solver.eigenvectors().col(top) * solver.eigenvectors().col(top).adjoint();
      if (b <= 0.0 || max_abs_diff(f, b * pi) > tol::kDefault) {
        throw ValidationError("node '" + inst->node +
                              "': POVM element is not a weighted rank-1 "
                              "projector");
      }
      auto post = qcr::apply(m, mixed);
      if (post.degenerate() ||
          max_abs_diff(*post.post, pi) > tol::kDefault) {
        throw ValidationError("node '" + inst->node +
                              "': instrument is not in Lüders form (post "
                              "state differs from the POVM projector)");
      }
      projectors.push_back(std::move(pi));
      beta.push_back(b);
    }
    // Tensor into the accumulated layer data (combo index row-major).
    std::vector<ComplexMatrix> new_projectors;
    std::vector<double> new_beta;
    new_projectors.reserve(data.projectors.size() * projectors.size());
    for (std::size_t a = 0; a < data.projectors.size(); ++a) {
      for (std::size_t b2 = 0; b2 < projectors.size(); ++b2) {
        new_projectors.push_back(kron(data.projectors[a], projectors[b2]));
        new_beta.push_back(data.beta[a] * beta[b2]);
      }
    }
    data.projectors = std::move(new_projectors);
    data.beta = std::move(new_beta);
    data.dim *= d;
  }
  return data;
}

//=========================================================================
// Segment reconstruction
//=========================================================================

SegmentReconstruction reconstruct_segment(const LayerConditional& cond,
                                          const ProjectiveLayerData& from,
                                          const ProjectiveLayerData& to) {
  const Index given_count = cond.matrix.rows();
  const Index target_count = cond.matrix.cols();
  if (given_count != static_cast<Index>(from.projectors.size()) ||
      target_count != static_cast<Index>(to.projectors.size())) {
    throw ValidationError(
        "reconstruct_segment: conditional shape does not match the "
        "instrument outcome counts");
  }

  std::vector<ComplexMatrix> frame;
  std::vector<double> coefficients;
  for (Index u = 0; u < given_count; ++u) {
    if (!cond.row_present[static_cast<std::size_t>(u)]) continue;
    const ComplexMatrix post_t =
        from.projectors[static_cast<std::size_t>(u)].transpose();
    for (Index v = 0; v < target_count; ++v) {
      frame.push_back(kron(post_t, to.povm(v)));
      coefficients.push_back(cond.matrix(u, v));
    }
  }
  if (frame.empty()) {
    throw ValidationError(
        "reconstruct_segment: every conditioning row has zero "
        "probability");
  }

  auto sol = frame_solve(frame, coefficients);
  if (!sol.frame_spans()) {
    std::ostringstream msg;
    msg << "reconstruct_segment: frame rank " << sol.rank << " < "
        << sol.full_rank
        << " (zero-probability rows removed a spanning element?)";
    throw ValidationError(msg.str());
  }

  SegmentReconstruction rec;
  rec.segment = Segment::from_choi(sol.solution, from.dim, to.dim);
  rec.frame_rank = sol.rank;
  rec.required_rank = sol.full_rank;
  rec.ls_residual = sol.residual;
  const auto& sv = sol.singular_values;
  rec.condition_number =
      sv.size() > 0 && sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                               : 0.0;
  rec.validity = validate_segment(rec.segment);
  return rec;
}

std::pair<LayeredProcess, ReconstructionReport> reconstruct_process(
    const OutcomeTable& t, const Layering& layering,
    const SchemeAssignment& scheme, double tolerance) {
  if (!t.is_normalized(tol::kDefault)) {
    throw ValidationError("reconstruct_process: table is not normalized");
  }
  auto chain = layer_conditionals(t, layering);

  std::vector<ProjectiveLayerData> layer_data;
  for (const auto& layer : layering.layers) {
    std::vector<const Instrument*> nodes;
    for (const auto& id : layer) nodes.push_back(&scheme.for_node(id));
    layer_data.push_back(layer_projective_data(nodes));
  }

  ReconstructionReport report;
  report.tolerance = tolerance;

  // Initial state from P(y_1): solve tr[F_{y_1}·rho] = P(y_1).
  std::vector<ComplexMatrix> state_frame;
  std::vector<double> marginals;
  for (Index u = 0; u < chain.first_marginal.n_entries(); ++u) {
    state_frame.push_back(layer_data[0].povm(u));
    marginals.push_back(chain.first_marginal.at_flat(u));
  }
  auto state_sol = frame_solve(state_frame, marginals);
  if (!state_sol.frame_spans()) {
    throw ValidationError(
        "reconstruct_process: layer-1 POVM does not span the state space");
  }
  report.initial_residual = state_sol.residual;

  LayeredProcess lp;
  lp.layering = layering;
  for (const auto& data : layer_data) lp.layer_dims.push_back(data.dim);
  lp.initial = state_sol.solution;
  for (std::size_t j = 0; j < chain.steps.size(); ++j) {
    auto rec = reconstruct_segment(chain.steps[j], layer_data[j],
                                   layer_data[j + 1]);
    rec.segment.in_label = "O" + std::to_string(j + 1);
    rec.segment.out_label = "I" + std::to_string(j + 2);
    lp.segments.push_back(rec.segment);
    report.segments.push_back(std::move(rec));
  }

  // Forward check: the reconstructed process must reproduce the table.
  OutcomeTable forward = observational_distribution(scheme, lp);
  report.table_max_error =
      forward.reordered([&] {
               std::vector<std::string> order;
               for (const auto& a : t.axes()) order.push_back(a.node);
               return order;
             }())
          .max_abs_difference(t);

  bool ok = report.initial_residual <= tolerance &&
            report.table_max_error <= tolerance;
  for (const auto& rec : report.segments) {
    ok = ok && rec.rank_full() && rec.ls_residual <= tolerance;
  }
  report.success = ok;
  return {std::move(lp), std::move(report)};
}

//=========================================================================
// Identifiability
//=========================================================================

IdentifiabilityResult identifiability_check(const CausalDag& g) {
  auto layered = check_layered(g);
  if (std::holds_alternative<Layering>(layered)) {
    return std::get<Layering>(layered);
  }
  const auto failure = std::get<LayeringFailure>(layered);

  const auto sets = topological_sets(g);
  auto set_dim = [&](std::size_t idx_1based) {
    Index d = 1;
    for (const auto& node : sets[idx_1based - 1]) d *= g.dim_of(node);
    return d;
  };
  CountingObstruction obs;
  obs.lower = failure.lower;
  obs.middle = failure.middle;
  obs.upper = failure.upper;
  obs.path = failure.path;
  const Index dl = set_dim(obs.lower);
  const Index dm = set_dim(obs.middle);
  const Index du = set_dim(obs.upper);
  obs.available = (dl * dm * du) * (dl * dm * du);
  obs.required = (dl * dm * dm * du) * (dl * dm * dm * du);

  // Numerical confirmation: rank of the product frame with the repeated
  // middle index, when SIC constructions exist for every node involved.
  auto set_projectors =
      [&](std::size_t idx_1based) -> std::optional<std::vector<ComplexMatrix>> {
    std::vector<ComplexMatrix> combined{ComplexMatrix::Identity(1, 1)};
    for (const auto& node : sets[idx_1based - 1]) {
      const Index d = g.dim_of(node);
      if (d != 2 && d != 3) return std::nullopt;
      auto projectors = sic_projectors(d);
      std::vector<ComplexMatrix> next;
      for (const auto& a : combined) {
        for (const auto& p : projectors) next.push_back(kron(a, p));
      }
      combined = std::move(next);
    }
    return combined;
  };
  auto pl = set_projectors(obs.lower);
  auto pm = set_projectors(obs.middle);
  auto pu = set_projectors(obs.upper);
  const Index block_dim = dl * dm * dm * du;
  if (pl && pm && pu && block_dim <= 64) {
    std::vector<ComplexMatrix> frame;
    const double beta_m = 1.0 / static_cast<double>(dm);
    const double beta_u = 1.0 / static_cast<double>(du);
    for (const auto& a : *pl) {
      for (const auto& b : *pm) {
        for (const auto& c : *pu) {
          frame.push_back(kron(kron(a.transpose(), beta_m * b),
                               kron(b.transpose(), beta_u * c)));
        }
      }
    }
    obs.frame_rank = operator_family_rank(frame);
  }
  return obs;
}

}  // namespace qcr
