/*
 * This code is part of qcr.
 *
 * (C) Copyright 2026 the qcr developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QCR_JSON_IO_HPP
#define QCR_JSON_IO_HPP

#include <json.hpp>
#include <string>

#include "qcr/classical.hpp"
#include "qcr/reversal.hpp"
#include "qcr/scheme.hpp"
#include "qcr/tomography.hpp"

namespace qcr::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

//=========================================================================
// Matrices
//=========================================================================

// Row-major nested arrays of [re, im] pairs.
json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);

//=========================================================================
// Graphs, instruments, processes, models
//=========================================================================

// {"nodes":[{"id":"A","dim":2},...],"edges":[["A","B"],...]}
CausalDag dag_from_json(const json& j);
json dag_to_json(const CausalDag& g);

// {"node":"A","kind":"sic","d":2} or
// {"node":"A","kind":"kraus","outcomes":[{"label":"v0","kraus":[m,...]}]}
Instrument instrument_from_json(const json& j);

// {"kind":"layered","layers":[["A"],["B"]],"segments":[...],"initial":...}
// Segment kinds: random_unital (seed mandatory), choi, identity,
// discard_prepare. The layering argument comes from the graph; an inline
// "layers" field, when present, must agree with it.
LayeredProcess process_from_json(const json& j, const Layering& layering,
                                 const CausalDag& g);

SchemeAssignment scheme_from_json(const json& j);

FunctionalModel functional_model_from_json(const json& j);

//=========================================================================
// Tables
//=========================================================================

// CSV: one row per outcome tuple, node columns then probability with 17
// significant digits; deterministic row order (row-major flat order).
std::string table_to_csv(const OutcomeTable& t);

// Metadata sidecar: axes, dims, scheme description.
json table_metadata(const OutcomeTable& t, const std::string& description);

//=========================================================================
// Reports
//=========================================================================

json segment_report_to_json(const SegmentReport& r);
json reconstruction_report_to_json(const ReconstructionReport& r);
json reversal_report_to_json(const ReversalReport& r);
json cmc_report_to_json(const CmcReport& r);
json identifiability_to_json(const IdentifiabilityResult& r);

// Deterministic human-readable rendering of any report produced above
// (dispatch on the report's "type" field). Same input, byte-identical
// output. Throws ValidationError on unknown schema.
std::string report_render(const json& report);

}  // namespace qcr::io

#endif  // QCR_JSON_IO_HPP
