/*
 * This code is part of qcr.
 *
 * (C) Copyright 2026 the qcr developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QCR_REVERSAL_HPP
#define QCR_REVERSAL_HPP

#include <string>
#include <vector>

#include "qcr/scheme.hpp"
#include "qcr/tomography.hpp"

namespace qcr {

// Reversed conditionals P(y_j | y_{j+1}) plus the terminal marginal
// P(y_K): exactly the chain conditionals of the table read along the
// reversed layer order.
ChainConditionals bayes_invert(const OutcomeTable& t,
                               const Layering& layering);

// W̄^{O_{j+1} I_j} = {W^{O_j I_{j+1}}}_{I<->O} · d_{j+1}/d_j. Rejects
// invalid or biased segments unless `force` is set (the forced path exists
// to reproduce the deterministic post-selection counterexample).
Segment reverse_segment(const Segment& s, bool force = false);

// CPT validity of a reversed segment: W̄ >= 0, tr_{I_j} W̄ = I^{O_{j+1}},
// tr W̄ = d_{O_{j+1}}.
SegmentReport validate_reverse(const Segment& sbar,
                               double tolerance = tol::kDefault);

struct ReversalReport {
  struct SegmentCheck {
    std::string name;
    double psd_floor = 0.0;
    double output_trace_dev = 0.0;
    double trace_dev = 0.0;
    double forward_unbiased_dev = 0.0;
    // Violated CPT clauses of the (possibly force-) reversed segment.
    std::vector<SegmentViolation> violations;
    bool ok = false;
  };
  std::vector<SegmentCheck> segments;
  // Filled by verify_reversibility.
  double marginal_uniformity_dev = 0.0;
  double distribution_max_error = 0.0;
  double conditional_max_error = 0.0;
  bool reversed_constructed = false;
  std::string failure;  // names the biased piece when construction fails
  bool success = false;
  double tolerance = tol::kDefault;
};

// Reverse every segment and assemble the process over the reversed
// layering, with initial factor I/d_K on the former terminal layer.
// Rejects (ValidationError) when the initial state or any segment is
// biased, naming it.
std::pair<LayeredProcess, ReversalReport> reverse_process(
    const LayeredProcess& lp, double tolerance = tol::kDefault);

// End-to-end reversibility check: forward table, reversed process,
// reversed table
// under the same per-node scheme, entrywise comparison after node-id axis
// alignment, and the per-segment reversed-conditional identity. Never
// throws on theorem-level failures; the report carries them.
ReversalReport verify_reversibility(const LayeredProcess& lp,
                                    const SchemeAssignment& scheme,
                                    double tolerance = tol::kDefault);

}  // namespace qcr

#endif  // QCR_REVERSAL_HPP
