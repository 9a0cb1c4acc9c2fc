/*
 * This code is part of qcr.
 *
 * (C) Copyright 2026 the qcr developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QCR_INSTRUMENTS_HPP
#define QCR_INSTRUMENTS_HPP

#include <optional>
#include <string>
#include <vector>

#include "qcr/tensor.hpp"

namespace qcr {

//=========================================================================
// CP maps in Kraus form
//=========================================================================

// A completely positive, trace-non-increasing map given by its Kraus
// operators (each out_dim x in_dim).
struct CPMap {
  std::vector<ComplexMatrix> kraus;
  Index in_dim = 0;
  Index out_dim = 0;

  static CPMap from_kraus(std::vector<ComplexMatrix> kraus,
                          double tolerance = tol::kDefault);

  // Apply to an operator: sum_k A_k X A_k†.
  ComplexMatrix operator()(const ComplexMatrix& x) const;
};

// POVM element F = sum_k A_k† A_k of a CP map. Hermitian and PSD.
ComplexMatrix povm_element(const CPMap& m);

struct ApplyResult {
  double prob = 0.0;
  // Normalized post-measurement state; empty on a degenerate (zero
  // probability) branch.
  std::optional<ComplexMatrix> post;

  bool degenerate() const { return !post.has_value(); }
};

// Outcome probability and post-measurement state on a density matrix.
// Branches with prob <= 1e-12 are flagged degenerate instead of fabricating
// a post state.
ApplyResult apply(const CPMap& m, const ComplexMatrix& rho);

// Choi matrix C = sum_ij |i><j| ⊗ M(|i><j|) on layout [in, out]. The "in"
// factor is a transposed slot: for every state rho and output-POVM element
// E,  tr[(rho^T ⊗ E)·C] = tr[E·M(rho)]. C is PSD, and tr_out(C) <= I^in.
struct ChoiMatrix {
  ComplexMatrix matrix;
  Index in_dim = 0;
  Index out_dim = 0;

  SpaceLayout layout(const std::string& in_label = "in",
                     const std::string& out_label = "out") const {
    return SpaceLayout(
        {{in_label, in_dim, Role::In}, {out_label, out_dim, Role::Out}});
  }
};

ChoiMatrix choi(const CPMap& m);

//=========================================================================
// Quantum instruments
//=========================================================================

// Finite family of CP maps indexed by outcome labels whose outcome-summed
// map is trace preserving: sum_v F_v = I.
struct Instrument {
  std::string node;
  std::vector<std::string> outcomes;
  std::vector<CPMap> maps;

  // Per-outcome weight beta_v when the POVM element is beta_v * (rank-1
  // projector); 1/d for SIC instruments. Empty otherwise.
  std::vector<double> beta;

  Index in_dim() const { return maps.at(0).in_dim; }
  Index out_dim() const { return maps.at(0).out_dim; }
  Index n_outcomes() const { return static_cast<Index>(maps.size()); }

  const CPMap& map_for(const std::string& outcome) const;

  // Validates dim consistency and trace preservation; throws
  // ValidationError with the deviation on failure.
  static Instrument create(std::string node,
                           std::vector<std::string> outcomes,
                           std::vector<CPMap> maps,
                           std::vector<double> beta = {},
                           double tolerance = tol::kDefault);
};

struct IcDiagnostics {
  bool complete = false;
  Index state_rank = 0;   // Gram rank of post-measurement states
  Index povm_rank = 0;    // Gram rank of POVM elements
  Index required_state_rank = 0;
  Index required_povm_rank = 0;
};

// Condition (i): post-measurement states at the maximally mixed input span
// the output operator space; condition (ii): POVM elements span the input
// operator space. Both checked by Gram-matrix rank.
IcDiagnostics is_informationally_complete(const Instrument& inst);

// Equal in/out dimension d and exactly d^2 outcomes.
bool is_minimal(const Instrument& inst);

// SIC instrument M_v(·) = (1/d) Π_v (·) Π_v from d^2 symmetric rank-1
// projectors with tr(Π_u Π_v) = (d δ_uv + 1)/(d+1). Supported d: 2, 3.
Instrument sic_instrument(Index d, const std::string& node = "");

// The d^2 SIC projectors themselves (fiducial constructions: Bloch
// tetrahedron for d=2, Weyl-Heisenberg orbit of the Hesse fiducial for
// d=3).
std::vector<ComplexMatrix> sic_projectors(Index d);

// Merge an IC-set of instruments over one node into a single instrument
// with outcomes (x,v) and maps gamma_(x,v) · M^x_v. Rejects negative
// weights and any merge whose outcome-summed map is not trace preserving
// (diagnostic carries the deviation).
Instrument merge_ic_set(const std::vector<Instrument>& ic_set,
                        const std::vector<std::vector<double>>& gamma);

//=========================================================================
// Common instrument constructors
//=========================================================================

// Projective (Lüders) instrument from an orthonormal family of rank-1
// projectors.
Instrument projective_instrument(const std::vector<ComplexMatrix>& projectors,
                                 const std::string& node = "");

// Single-outcome instrument that discards the input and prepares `state`.
Instrument discard_prepare_instrument(Index in_dim,
                                      const ComplexMatrix& state,
                                      const std::string& node = "");

// Identity-channel instrument (single outcome, no disturbance).
Instrument identity_instrument(Index d, const std::string& node = "");

}  // namespace qcr

#endif  // QCR_INSTRUMENTS_HPP
