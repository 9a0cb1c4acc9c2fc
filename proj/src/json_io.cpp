/*
 * This code is part of qcr.
 *
 * (C) Copyright 2026 the qcr developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "qcr/json_io.hpp"

#include <cstdio>
#include <iomanip>
#include <set>
#include <sstream>

#include "qcr/errors.hpp"

namespace qcr::io {

namespace {

void require_fields(const json& j, std::initializer_list<const char*> keys,
                    const std::string& what) {
  for (const char* key : keys) {
    if (!j.contains(key)) {
      throw ValidationError(what + ": missing field '" + key + "'");
    }
  }
}

std::string fmt(double x) {
  std::ostringstream out;
  out << std::scientific << std::setprecision(6) << x;
  return out.str();
}

}  // namespace

//=========================================================================
// Matrices
//=========================================================================

json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) {
      row.push_back({m(i, j).real(), m(i, j).imag()});
    }
    rows.push_back(row);
  }
  return rows;
}

ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) {
    throw ValidationError("matrix: expected a non-empty array of rows");
  }
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j.at(0).size());
  ComplexMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    if (static_cast<Index>(row.size()) != cols) {
      throw ValidationError("matrix: ragged rows");
    }
    for (Index c = 0; c < cols; ++c) {
      const auto& e = row.at(static_cast<std::size_t>(c));
      if (!e.is_array() || e.size() != 2) {
        throw ValidationError("matrix: entries must be [re, im] pairs");
      }
      m(r, c) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  return m;
}

//=========================================================================
// Graphs
//=========================================================================

CausalDag dag_from_json(const json& j) {
  require_fields(j, {"nodes", "edges"}, "graph");
  CausalDag g;
  for (const auto& n : j.at("nodes")) {
    require_fields(n, {"id", "dim"}, "graph node");
    g.nodes.push_back({n.at("id").get<std::string>(),
                       n.at("dim").get<Index>()});
  }
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) {
      throw ValidationError("graph: edges must be [parent, child] pairs");
    }
    g.edges.emplace_back(e.at(0).get<std::string>(),
                         e.at(1).get<std::string>());
  }
  return g;
}

json dag_to_json(const CausalDag& g) {
  json nodes = json::array();
  for (const auto& n : g.nodes) {
    nodes.push_back({{"id", n.id}, {"dim", n.dim}});
  }
  json edges = json::array();
  for (const auto& [u, v] : g.edges) edges.push_back({u, v});
  return {{"nodes", nodes}, {"edges", edges}};
}

//=========================================================================
// Instruments and schemes
//=========================================================================

Instrument instrument_from_json(const json& j) {
  require_fields(j, {"node", "kind"}, "instrument");
  const std::string node = j.at("node").get<std::string>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "sic") {
    require_fields(j, {"d"}, "sic instrument");
    return sic_instrument(j.at("d").get<Index>(), node);
  }
  if (kind == "kraus") {
    require_fields(j, {"outcomes"}, "kraus instrument");
    std::vector<std::string> outcomes;
    std::vector<CPMap> maps;
    for (const auto& o : j.at("outcomes")) {
      require_fields(o, {"label", "kraus"}, "kraus outcome");
      outcomes.push_back(o.at("label").get<std::string>());
      std::vector<ComplexMatrix> kraus;
      for (const auto& k : o.at("kraus")) kraus.push_back(matrix_from_json(k));
      maps.push_back(CPMap::from_kraus(std::move(kraus)));
    }
    return Instrument::create(node, std::move(outcomes), std::move(maps));
  }
  throw ValidationError("instrument: unknown kind '" + kind +
                        "' (expected sic or kraus)");
}

SchemeAssignment scheme_from_json(const json& j) {
  if (!j.is_array()) {
    throw ValidationError("scheme: expected an array of instruments");
  }
  std::vector<Instrument> instruments;
  for (const auto& inst : j) instruments.push_back(instrument_from_json(inst));
  return SchemeAssignment::create(std::move(instruments));
}

//=========================================================================
// Processes
//=========================================================================

namespace {

Segment segment_from_json(const json& j, Index d_in, Index d_out,
                          std::size_t index) {
  const std::string where = "segment " + std::to_string(index + 1);
  require_fields(j, {"kind"}, where);
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "random_unital") {
    if (!j.contains("seed")) {
      throw ValidationError(where +
                            ": random_unital requires an explicit seed");
    }
    const Index d = j.value("d", d_in);
    if (d != d_in || d_in != d_out) {
      throw ValidationError(where +
                            ": random_unital needs equal layer dims");
    }
    return random_unbiased_segment(d, j.value("n_unitaries", 3),
                                   j.at("seed").get<std::uint64_t>());
  }
  if (kind == "choi") {
    require_fields(j, {"matrix"}, where);
    return Segment::from_choi(matrix_from_json(j.at("matrix")), d_in,
                              d_out);
  }
  if (kind == "identity") {
    if (d_in != d_out) {
      throw ValidationError(where + ": identity needs equal layer dims");
    }
    return identity_segment(d_in);
  }
  if (kind == "discard_prepare") {
    require_fields(j, {"state"}, where);
    ComplexMatrix state = matrix_from_json(j.at("state"));
    Segment s = discard_prepare_segment(d_in, state);
    if (s.d_out != d_out) {
      throw ValidationError(where + ": prepared state dimension mismatch");
    }
    return s;
  }
  throw ValidationError(where + ": unknown kind '" + kind + "'");
}

}  // namespace

LayeredProcess process_from_json(const json& j, const Layering& layering,
                                 const CausalDag& g) {
  require_fields(j, {"kind", "segments"}, "process");
  if (j.at("kind").get<std::string>() != "layered") {
    throw ValidationError("process: only kind 'layered' is supported");
  }
  if (j.contains("layers")) {
    const auto& declared = j.at("layers");
    if (declared.size() != layering.layers.size()) {
      throw ValidationError(
          "process: declared layers disagree with the graph layering");
    }
    for (std::size_t k = 0; k < layering.layers.size(); ++k) {
      std::set<std::string> a(layering.layers[k].begin(),
                              layering.layers[k].end());
      std::set<std::string> b;
      for (const auto& id : declared.at(k)) b.insert(id.get<std::string>());
      if (a != b) {
        throw ValidationError(
            "process: declared layer " + std::to_string(k + 1) +
            " disagrees with the graph layering");
      }
    }
  }

  std::vector<Index> layer_dims;
  for (const auto& layer : layering.layers) {
    Index d = 1;
    for (const auto& id : layer) d *= g.dim_of(id);
    layer_dims.push_back(d);
  }

  const auto& segs = j.at("segments");
  if (segs.size() + 1 != layer_dims.size()) {
    throw ValidationError("process: need exactly one segment per adjacent "
                          "layer pair");
  }
  std::vector<Segment> segments;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    Segment s = segment_from_json(segs.at(k), layer_dims[k],
                                  layer_dims[k + 1], k);
    s.in_label = "O" + std::to_string(k + 1);
    s.out_label = "I" + std::to_string(k + 2);
    segments.push_back(std::move(s));
  }

  if (!j.contains("initial") ||
      (j.at("initial").is_string() &&
       j.at("initial").get<std::string>() == "maximally_mixed")) {
    return LayeredProcess::unbiased_chain(layering, layer_dims, segments);
  }
  const auto& init = j.at("initial");
  ComplexMatrix rho;
  if (init.contains("ket")) {
    ComplexMatrix ket = matrix_from_json(init.at("ket"));
    rho = ket * ket.adjoint();
  } else if (init.contains("matrix")) {
    rho = matrix_from_json(init.at("matrix"));
  } else {
    throw ValidationError(
        "process: initial must be \"maximally_mixed\" or carry a "
        "ket/matrix");
  }
  return LayeredProcess::biased_chain(layering, layer_dims, rho, segments);
}

//=========================================================================
// Functional models
//=========================================================================

FunctionalModel functional_model_from_json(const json& j) {
  require_fields(j, {"graph", "nodes"}, "functional model");
  FunctionalModel fm;
  fm.dag = dag_from_json(j.at("graph"));
  for (const auto& n : j.at("nodes")) {
    require_fields(n, {"id", "domain", "noise", "function"},
                   "functional model node");
    ClassicalNode node;
    node.id = n.at("id").get<std::string>();
    for (const auto& d : n.at("domain")) {
      node.domain.push_back(d.get<std::string>());
    }
    const auto& noise = n.at("noise");
    require_fields(noise, {"labels", "probs"}, "noise spec");
    for (const auto& l : noise.at("labels")) {
      node.noise_domain.push_back(l.get<std::string>());
    }
    for (const auto& p : noise.at("probs")) {
      node.noise_probs.push_back(p.get<double>());
    }
    for (const auto& f : n.at("function")) {
      node.function.push_back(f.get<Index>());
    }
    fm.nodes.push_back(std::move(node));
  }
  fm.validate();
  return fm;
}

//=========================================================================
// Tables
//=========================================================================

std::string table_to_csv(const OutcomeTable& t) {
  std::ostringstream out;
  for (std::size_t a = 0; a < t.n_axes(); ++a) {
    out << t.axis(a).node << ",";
  }
  out << "probability\n";
  char buffer[64];
  for (Index flat = 0; flat < t.n_entries(); ++flat) {
    const auto multi = t.unflatten(flat);
    for (std::size_t a = 0; a < t.n_axes(); ++a) {
      out << t.axis(a).labels[static_cast<std::size_t>(multi[a])] << ",";
    }
    std::snprintf(buffer, sizeof(buffer), "%.17g", t.at_flat(flat));
    out << buffer << "\n";
  }
  return out.str();
}

json table_metadata(const OutcomeTable& t, const std::string& description) {
  json axes = json::array();
  json dims = json::array();
  for (const auto& a : t.axes()) {
    axes.push_back({{"node", a.node}, {"labels", a.labels}});
    dims.push_back(a.labels.size());
  }
  return {{"schema_version", kSchemaVersion},
          {"axes", axes},
          {"dims", dims},
          {"entries", t.n_entries()},
          {"scheme", description}};
}

//=========================================================================
// Reports
//=========================================================================

json segment_report_to_json(const SegmentReport& r) {
  json violations = json::array();
  for (const auto& v : r.violations) {
    violations.push_back(
        {{"condition", v.condition}, {"magnitude", v.magnitude}});
  }
  return {{"schema_version", kSchemaVersion},
          {"type", "segment_validity"},
          {"psd_floor", r.psd_floor},
          {"output_trace_dev", r.output_trace_dev},
          {"trace_dev", r.trace_dev},
          {"violations", violations},
          {"ok", r.ok()}};
}

json reconstruction_report_to_json(const ReconstructionReport& r) {
  json segments = json::array();
  for (const auto& s : r.segments) {
    segments.push_back({{"frame_rank", s.frame_rank},
                        {"required_rank", s.required_rank},
                        {"ls_residual", s.ls_residual},
                        {"condition_number", s.condition_number},
                        {"validity", segment_report_to_json(s.validity)}});
  }
  return {{"schema_version", kSchemaVersion},
          {"type", "reconstruction"},
          {"segments", segments},
          {"initial_residual", r.initial_residual},
          {"table_max_error", r.table_max_error},
          {"tolerance", r.tolerance},
          {"success", r.success}};
}

json reversal_report_to_json(const ReversalReport& r) {
  json segments = json::array();
  for (const auto& s : r.segments) {
    json violations = json::array();
    for (const auto& v : s.violations) {
      violations.push_back(
          {{"condition", v.condition}, {"magnitude", v.magnitude}});
    }
    segments.push_back({{"name", s.name},
                        {"psd_floor", s.psd_floor},
                        {"output_trace_dev", s.output_trace_dev},
                        {"trace_dev", s.trace_dev},
                        {"forward_unbiased_dev", s.forward_unbiased_dev},
                        {"violations", violations},
                        {"ok", s.ok}});
  }
  return {{"schema_version", kSchemaVersion},
          {"type", "reversal"},
          {"segments", segments},
          {"marginal_uniformity_dev", r.marginal_uniformity_dev},
          {"distribution_max_error", r.distribution_max_error},
          {"conditional_max_error", r.conditional_max_error},
          {"reversed_constructed", r.reversed_constructed},
          {"failure", r.failure},
          {"tolerance", r.tolerance},
          {"success", r.success}};
}

json cmc_report_to_json(const CmcReport& r) {
  return {{"schema_version", kSchemaVersion},
          {"type", "cmc"},
          {"ok", r.ok},
          {"max_deviation", r.max_deviation},
          {"witness_node", r.witness_node},
          {"skipped_configurations", r.skipped_configurations}};
}

json identifiability_to_json(const IdentifiabilityResult& r) {
  if (std::holds_alternative<Layering>(r)) {
    const auto& l = std::get<Layering>(r);
    return {{"schema_version", kSchemaVersion},
            {"type", "identifiability"},
            {"identifiable", true},
            {"layers", l.layers}};
  }
  const auto& obs = std::get<CountingObstruction>(r);
  json out = {{"schema_version", kSchemaVersion},
              {"type", "identifiability"},
              {"identifiable", false},
              {"lower_set", obs.lower},
              {"middle_set", obs.middle},
              {"upper_set", obs.upper},
              {"skipping_path", obs.path},
              {"available", obs.available},
              {"required", obs.required}};
  if (obs.frame_rank) out["frame_rank"] = *obs.frame_rank;
  return out;
}

//=========================================================================
// Rendering
//=========================================================================

namespace {

std::string render_segment_validity(const json& r) {
  std::ostringstream out;
  if (r.at("ok").get<bool>()) {
    out << "all CPT conditions satisfied\n";
  } else {
    out << "CPT conditions violated:\n";
    for (const auto& v : r.at("violations")) {
      out << "  " << v.at("condition").get<std::string>() << " off by "
          << fmt(v.at("magnitude").get<double>()) << "\n";
    }
  }
  out << "psd floor " << fmt(r.at("psd_floor").get<double>())
      << ", output-trace dev "
      << fmt(r.at("output_trace_dev").get<double>()) << ", trace dev "
      << fmt(r.at("trace_dev").get<double>()) << "\n";
  return out.str();
}

std::string render_reversal(const json& r) {
  std::ostringstream out;
  out << "REVERSIBLE: " << (r.at("success").get<bool>() ? "yes" : "no")
      << "\n";
  if (!r.at("reversed_constructed").get<bool>()) {
    out << "reversed process not constructed: "
        << r.at("failure").get<std::string>() << "\n";
  }
  for (const auto& s : r.at("segments")) {
    out << s.at("name").get<std::string>() << ": "
        << (s.at("ok").get<bool>() ? "valid" : "INVALID") << " (psd floor "
        << fmt(s.at("psd_floor").get<double>()) << ", tr_out dev "
        << fmt(s.at("output_trace_dev").get<double>()) << ", tr dev "
        << fmt(s.at("trace_dev").get<double>()) << ", forward unbiased dev "
        << fmt(s.at("forward_unbiased_dev").get<double>()) << ")\n";
    for (const auto& v : s.at("violations")) {
      out << "  violated: " << v.at("condition").get<std::string>()
          << " off by " << fmt(v.at("magnitude").get<double>()) << "\n";
    }
  }
  out << "marginal uniformity deviation: "
      << fmt(r.at("marginal_uniformity_dev").get<double>()) << "\n";
  out << "forward/reversed table max error: "
      << fmt(r.at("distribution_max_error").get<double>()) << "\n";
  out << "reversed-conditional max error: "
      << fmt(r.at("conditional_max_error").get<double>()) << "\n";
  return out.str();
}

std::string render_reconstruction(const json& r) {
  std::ostringstream out;
  out << "RECONSTRUCTION: "
      << (r.at("success").get<bool>() ? "success" : "failure") << "\n";
  out << "initial-state residual: "
      << fmt(r.at("initial_residual").get<double>()) << "\n";
  std::size_t index = 1;
  for (const auto& s : r.at("segments")) {
    out << "segment " << index++ << ": frame rank "
        << s.at("frame_rank").get<Index>() << "/"
        << s.at("required_rank").get<Index>() << ", residual "
        << fmt(s.at("ls_residual").get<double>()) << ", condition number "
        << fmt(s.at("condition_number").get<double>()) << "\n";
  }
  out << "table max error: " << fmt(r.at("table_max_error").get<double>())
      << " (tolerance " << fmt(r.at("tolerance").get<double>()) << ")\n";
  return out.str();
}

std::string render_identifiability(const json& r) {
  std::ostringstream out;
  if (r.at("identifiable").get<bool>()) {
    out << "IDENTIFIABLE: yes\n";
    out << "layers:";
    for (const auto& layer : r.at("layers")) {
      out << " {";
      bool first = true;
      for (const auto& id : layer) {
        if (!first) out << ",";
        out << id.get<std::string>();
        first = false;
      }
      out << "}";
    }
    out << "\n";
    return out.str();
  }
  out << "IDENTIFIABLE: no\n";
  out << "obstruction triplet (S" << r.at("lower_set").get<std::size_t>()
      << ", S" << r.at("middle_set").get<std::size_t>() << ", S"
      << r.at("upper_set").get<std::size_t>() << "), skipping path";
  for (const auto& id : r.at("skipping_path")) {
    out << " " << id.get<std::string>();
  }
  out << "\n";
  out << "available frame elements: " << r.at("available").get<Index>();
  if (r.contains("frame_rank")) {
    out << " (numerical rank " << r.at("frame_rank").get<Index>() << ")";
  }
  out << " < required " << r.at("required").get<Index>() << "\n";
  return out.str();
}

std::string render_cmc(const json& r) {
  std::ostringstream out;
  out << "CMC: " << (r.at("ok").get<bool>() ? "satisfied" : "VIOLATED")
      << " (max deviation " << fmt(r.at("max_deviation").get<double>());
  if (!r.at("ok").get<bool>()) {
    out << ", factor of node " << r.at("witness_node").get<std::string>();
  }
  out << ", " << r.at("skipped_configurations").get<Index>()
      << " zero-probability parent configurations skipped)\n";
  return out.str();
}

}  // namespace

std::string report_render(const json& report) {
  if (!report.contains("type") || !report.contains("schema_version")) {
    throw ValidationError("report_render: missing type/schema_version");
  }
  if (report.at("schema_version").get<int>() != kSchemaVersion) {
    throw ValidationError("report_render: unsupported schema version");
  }
  const std::string type = report.at("type").get<std::string>();
  if (type == "segment_validity") return render_segment_validity(report);
  if (type == "reversal") return render_reversal(report);
  if (type == "reconstruction") return render_reconstruction(report);
  if (type == "identifiability") return render_identifiability(report);
  if (type == "cmc") return render_cmc(report);
  throw ValidationError("report_render: unknown report type '" + type +
                        "'");
}

}  // namespace qcr::io
