/*
 * This code is part of qcr.
 *
 * (C) Copyright 2026 the qcr developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QCR_TOMOGRAPHY_HPP
#define QCR_TOMOGRAPHY_HPP

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qcr/scheme.hpp"

namespace qcr {

//=========================================================================
// Minimal projective layer data
//=========================================================================

// Per layer-outcome combination: the rank-1 projector Π and weight beta
// with POVM element F = beta·Π, for a layer of minimal Lüders-projective
// instruments (tensored across the layer's nodes).
struct ProjectiveLayerData {
  Index dim = 1;
  std::vector<ComplexMatrix> projectors;
  std::vector<double> beta;

  ComplexMatrix povm(Index combo) const {
    return beta[static_cast<std::size_t>(combo)] *
           projectors[static_cast<std::size_t>(combo)];
  }
};

// Extracts (Π, beta) per outcome from the nodes of one layer; rejects
// instruments that are not minimal with rank-1 projective POVM elements in
// Lüders form (post state equal to the POVM projector).
ProjectiveLayerData layer_projective_data(
    const std::vector<const Instrument*>& nodes);

//=========================================================================
// Reconstruction
//=========================================================================

struct SegmentReconstruction {
  Segment segment;
  Index frame_rank = 0;
  Index required_rank = 0;
  double ls_residual = 0.0;
  double condition_number = 0.0;
  SegmentReport validity;  // attached, not gating

  bool rank_full() const { return frame_rank == required_rank; }
};

struct ReconstructionReport {
  std::vector<SegmentReconstruction> segments;
  double initial_residual = 0.0;
  // Max entrywise gap between the input table and the forward table of the
  // reconstructed process. This is where non-factorizing inputs show up.
  double table_max_error = 0.0;
  bool success = false;
  double tolerance = 0.0;
};

// Solve tr[(Π^{O_j}_{y_j}ᵀ ⊗ F^{I_{j+1}}_{y_{j+1}})·X] = P(y_{j+1}|y_j)
// over the product frame. Missing conditional rows are dropped; the solve
// is rejected when the surviving frame no longer spans.
SegmentReconstruction reconstruct_segment(const LayerConditional& cond,
                                          const ProjectiveLayerData& from,
                                          const ProjectiveLayerData& to);

// Full reconstruction pipeline: initial state from P(y_1) by frame
// inversion,
// each segment from its conditional, reassembly, and a forward-table
// comparison at `tolerance`.
std::pair<LayeredProcess, ReconstructionReport> reconstruct_process(
    const OutcomeTable& t, const Layering& layering,
    const SchemeAssignment& scheme, double tolerance = 1e-8);

//=========================================================================
// Identifiability
//=========================================================================

struct CountingObstruction {
  std::size_t lower = 0;   // 1-based indices into the topological sets
  std::size_t middle = 0;
  std::size_t upper = 0;
  std::vector<std::string> path;  // directed path skipping `middle`
  Index available = 0;  // (d_l·d_m·d_u)^2 product-frame cardinality
  Index required = 0;   // (d_l·d_m²·d_u)^2 operator-space dimension
  // Numerical Gram rank of {Π_{s_l} ⊗ F_{s_m} ⊗ Π_{s_m} ⊗ F_{s_u}} when
  // SIC projectors exist for every node dimension involved.
  std::optional<Index> frame_rank;
};

using IdentifiabilityResult = std::variant<Layering, CountingObstruction>;

// Layered graphs are identifiable; otherwise reports the frame-counting
// obstruction on the undecomposable block.
IdentifiabilityResult identifiability_check(const CausalDag& g);

}  // namespace qcr

#endif  // QCR_TOMOGRAPHY_HPP
