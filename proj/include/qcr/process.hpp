/*
 * This code is part of qcr.
 *
 * (C) Copyright 2026 the qcr developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QCR_PROCESS_HPP
#define QCR_PROCESS_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qcr/graph.hpp"
#include "qcr/instruments.hpp"
#include "qcr/tensor.hpp"

namespace qcr {

//=========================================================================
// Segments: one layer-to-layer channel of a layered process
//=========================================================================

// W^{O_j I_{j+1}}: the Choi matrix of the channel from the outputs of layer
// j to the inputs of layer j+1, stored on factor order [O_j, I_{j+1}].
// Validity (CPT): W >= 0, tr_{I_{j+1}} W = I^{O_j}, tr W = d_{O_j}.
struct Segment {
  ComplexMatrix matrix;
  Index d_in = 0;   // dim of O_j (channel input carrier)
  Index d_out = 0;  // dim of I_{j+1}
  std::string in_label = "O";
  std::string out_label = "I";

  SpaceLayout layout() const {
    return SpaceLayout(
        {{in_label, d_in, Role::In}, {out_label, d_out, Role::Out}});
  }

  static Segment from_choi(ComplexMatrix matrix, Index d_in, Index d_out,
                           std::string in_label = "O",
                           std::string out_label = "I");
  static Segment from_channel(const CPMap& channel,
                              std::string in_label = "O",
                              std::string out_label = "I");

  // Channel application through the Choi matrix: tr_in[(X^T ⊗ I)·W].
  ComplexMatrix apply_to(const ComplexMatrix& x) const;
};

// Identity channel and discard-and-prepare segments, used across fixtures.
Segment identity_segment(Index d, std::string in_label = "O",
                         std::string out_label = "I");
Segment discard_prepare_segment(Index d_in, const ComplexMatrix& state,
                                std::string in_label = "O",
                                std::string out_label = "I");

//=========================================================================
// Validity and unbiasedness
//=========================================================================

struct SegmentViolation {
  std::string condition;  // which CPT clause failed
  double magnitude = 0.0;
};

struct SegmentReport {
  // Most negative eigenvalue (0 when PSD), max deviation of tr_out W from
  // I^in, and |tr W - d_in|.
  double psd_floor = 0.0;
  double output_trace_dev = 0.0;
  double trace_dev = 0.0;
  std::vector<SegmentViolation> violations;

  bool ok() const { return violations.empty(); }
};

SegmentReport validate_segment(const Segment& s,
                               double tolerance = tol::kDefault);

struct UnbiasedReport {
  // Max deviation of tr_in W from (d_in/d_out)·I^out.
  double deviation = 0.0;
  bool ok = false;
};

UnbiasedReport is_unbiased(const Segment& s,
                           double tolerance = tol::kDefault);

// Haar-random unitary via QR of a complex Ginibre matrix with phase-fixed R
// diagonal; deterministic for a given generator state.
ComplexMatrix haar_unitary(Index d, std::mt19937_64& rng);

// Choi matrix of sum_k p_k U_k (·) U_k† with Haar-random U_k and random
// weights p_k; valid and unbiased by construction, deterministic per seed.
Segment random_unbiased_segment(Index d, int n_unitaries,
                                std::uint64_t seed);

//=========================================================================
// Layered processes
//=========================================================================

// W = W^{I_1} ⊗ W^{O_1 I_2} ⊗ ... ⊗ I^{O_K}. `initial` is a density
// matrix on I_1 (the trivial-input segment); unbiased chains hard-code it
// to I/d_1.
struct LayeredProcess {
  Layering layering;
  std::vector<Index> layer_dims;
  ComplexMatrix initial;
  std::vector<Segment> segments;

  std::size_t n_layers() const { return layer_dims.size(); }

  static LayeredProcess unbiased_chain(Layering layering,
                                       std::vector<Index> layer_dims,
                                       std::vector<Segment> segments);
  static LayeredProcess biased_chain(Layering layering,
                                     std::vector<Index> layer_dims,
                                     ComplexMatrix initial,
                                     std::vector<Segment> segments);
};

struct AssembledProcess {
  ComplexMatrix matrix;
  // Factors [I1, O1, I2, O2, ..., IK, OK] in layer order.
  SpaceLayout layout;
};

// Full process matrix as the Kronecker chain in canonical factor order;
// rejects dimension-chain mismatches.
AssembledProcess assemble(const LayeredProcess& lp);

// Input/output relabeling {·}_{I<->O}, expressed on standard-Choi
// storage:
// factor order flipped and the matrix globally transposed so that the Born
// pairing of the relabeled object reproduces the reversed conditionals.
// Involution: swap_io(swap_io(s)) == s.
Segment swap_io(const Segment& s);

}  // namespace qcr

#endif  // QCR_PROCESS_HPP
