/*
 * This code is part of qcr.
 *
 * (C) Copyright 2026 the qcr developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

// qcr: batch experiment front-end.
//
//   qcr <kind> --config <path> [--out <dir>] [--tol <float>]
//
// Kinds: simulate, tomography, reverse, identifiability, classical.
// Exit codes: 0 success, 2 validation failure, 3 numerical-check failure
// (reports are still written). QCR_THREADS caps internal parallelism.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "qcr/json_io.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitCheckFailed = 3;

int thread_cap() {
  const char* env = std::getenv("QCR_THREADS");
  if (env == nullptr) return 1;
  const int n = std::atoi(env);
  return n >= 1 ? n : 1;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw qcr::ValidationError("cannot open output file " + path.string());
  }
  out << content;
}

void write_json(const fs::path& path, const json& j) {
  write_file(path, j.dump(2) + "\n");
}

void write_table(const fs::path& dir, const std::string& stem,
                 const qcr::OutcomeTable& t, const std::string& desc) {
  write_file(dir / (stem + ".csv"), qcr::io::table_to_csv(t));
  write_json(dir / (stem + "_meta.json"), qcr::io::table_metadata(t, desc));
}

struct QuantumSetup {
  qcr::CausalDag graph;
  qcr::Layering layering;
  qcr::LayeredProcess process;
  qcr::SchemeAssignment scheme;
};

QuantumSetup quantum_setup(const json& config) {
  for (const char* field : {"graph", "process", "scheme"}) {
    if (!config.contains(field)) {
      throw qcr::ValidationError(std::string("config: missing field '") +
                                 field + "'");
    }
  }
  QuantumSetup setup;
  setup.graph = qcr::io::dag_from_json(config.at("graph"));
  if (auto cycle = qcr::validate_dag(setup.graph)) {
    throw qcr::ValidationError("config: graph has a cycle through '" +
                               cycle->cycle.front() + "'");
  }
  auto layered = qcr::check_layered(setup.graph);
  if (!std::holds_alternative<qcr::Layering>(layered)) {
    const auto& f = std::get<qcr::LayeringFailure>(layered);
    throw qcr::ValidationError(
        "config: graph is not layered (path " + f.path.front() + " -> " +
        f.path.back() + " skips set " + std::to_string(f.middle) + ")");
  }
  setup.layering = std::get<qcr::Layering>(layered);
  setup.process = qcr::io::process_from_json(config.at("process"),
                                             setup.layering, setup.graph);
  setup.scheme = qcr::io::scheme_from_json(config.at("scheme"));
  return setup;
}

int run_simulate(const json& config, const fs::path& out, double tol) {
  (void)tol;
  auto setup = quantum_setup(config);
  auto t = qcr::observational_distribution(setup.scheme, setup.process,
                                           thread_cap());
  write_table(out, "table", t, "observational scheme");

  if (config.contains("interventions")) {
    std::map<std::string, qcr::Instrument> subs;
    for (const auto& s : config.at("interventions")) {
      if (!s.contains("node") || !s.contains("instrument")) {
        throw qcr::ValidationError(
            "config: interventions need node and instrument fields");
      }
      qcr::Instrument inst =
          qcr::io::instrument_from_json(s.at("instrument"));
      inst.node = s.at("node").get<std::string>();
      subs.emplace(inst.node, std::move(inst));
    }
    auto intervened = qcr::intervened_distribution(setup.scheme, subs,
                                                   setup.process,
                                                   thread_cap());
    write_table(out, "intervened", intervened,
                "intervened scheme (instrument substitution)");
  }
  std::cout << "wrote " << (out / "table.csv").string() << "\n";
  return kExitOk;
}

int run_tomography(const json& config, const fs::path& out, double tol) {
  auto setup = quantum_setup(config);
  auto t = qcr::observational_distribution(setup.scheme, setup.process,
                                           thread_cap());
  write_table(out, "table", t, "observational scheme");

  auto [reconstructed, report] =
      qcr::reconstruct_process(t, setup.layering, setup.scheme, tol);
  const json report_json = qcr::io::reconstruction_report_to_json(report);
  write_json(out / "reconstruction_report.json", report_json);
  write_file(out / "report.txt", qcr::io::report_render(report_json));

  auto assembled = qcr::assemble(reconstructed);
  json w_dump = {{"schema_version", qcr::io::kSchemaVersion},
                 {"labels", assembled.layout.labels()},
                 {"dims", assembled.layout.dims()},
                 {"matrix", qcr::io::matrix_to_json(assembled.matrix)}};
  write_json(out / "w_reconstructed.json", w_dump);

  // Round-trip error against the configured ground truth.
  const double w_error =
      (assembled.matrix - qcr::assemble(setup.process).matrix).norm();
  write_json(out / "round_trip.json",
             {{"schema_version", qcr::io::kSchemaVersion},
              {"frobenius_error", w_error}});

  std::cout << qcr::io::report_render(report_json);
  std::cout << "round-trip Frobenius error: " << w_error << "\n";
  return report.success && w_error <= tol ? kExitOk : kExitCheckFailed;
}

int run_reverse(const json& config, const fs::path& out, double tol) {
  auto setup = quantum_setup(config);
  auto report =
      qcr::verify_reversibility(setup.process, setup.scheme, tol);
  const json report_json = qcr::io::reversal_report_to_json(report);
  write_json(out / "reversal_report.json", report_json);
  write_file(out / "report.txt", qcr::io::report_render(report_json));

  auto forward = qcr::observational_distribution(setup.scheme,
                                                 setup.process,
                                                 thread_cap());
  write_table(out, "forward", forward, "forward observational scheme");
  if (report.reversed_constructed) {
    auto [reversed, ignored] = qcr::reverse_process(setup.process, tol);
    auto backward = qcr::observational_distribution(setup.scheme, reversed,
                                                    thread_cap());
    write_table(out, "reversed", backward,
                "reversed-process observational scheme");
  }
  std::cout << qcr::io::report_render(report_json);
  return report.success ? kExitOk : kExitCheckFailed;
}

int run_identifiability(const json& config, const fs::path& out,
                        double tol) {
  (void)tol;
  if (!config.contains("graph")) {
    throw qcr::ValidationError("config: missing field 'graph'");
  }
  auto graph = qcr::io::dag_from_json(config.at("graph"));
  if (auto cycle = qcr::validate_dag(graph)) {
    throw qcr::ValidationError("config: graph has a cycle through '" +
                               cycle->cycle.front() + "'");
  }
  auto result = qcr::identifiability_check(graph);
  const json report_json = qcr::io::identifiability_to_json(result);
  write_json(out / "identifiability_report.json", report_json);
  write_file(out / "report.txt", qcr::io::report_render(report_json));
  std::cout << qcr::io::report_render(report_json);
  return std::holds_alternative<qcr::Layering>(result) ? kExitOk
                                                       : kExitCheckFailed;
}

int run_classical(const json& config, const fs::path& out, double tol) {
  if (!config.contains("model")) {
    throw qcr::ValidationError("config: missing field 'model'");
  }
  auto fm = qcr::io::functional_model_from_json(config.at("model"));
  auto t = qcr::enumerate_distribution(fm);
  write_table(out, "table", t, "functional model enumeration");

  auto cmc = qcr::check_cmc(t, fm.dag);
  json report_json = {{"schema_version", qcr::io::kSchemaVersion},
                      {"cmc", qcr::io::cmc_report_to_json(cmc)}};
  std::string text = qcr::io::report_render(report_json.at("cmc"));
  bool ok = cmc.ok;

  if (config.contains("do")) {
    json checks = json::array();
    for (const auto& d : config.at("do")) {
      const std::string node = d.at("node").get<std::string>();
      const std::string value = d.at("value").get<std::string>();
      auto via_formula = qcr::do_distribution(t, fm.dag, node, value);
      auto via_mutilation =
          qcr::enumerate_distribution(qcr::mutilate(fm, node, value));
      const double dev = via_formula.max_abs_difference(via_mutilation);
      checks.push_back({{"node", node},
                        {"value", value},
                        {"mutilation_max_dev", dev}});
      text += "do(" + node + " = " + value +
              "): mutilation agreement max dev " + std::to_string(dev) +
              "\n";
      ok = ok && dev <= std::max(tol, 1e-12);
    }
    report_json["do_checks"] = checks;
  }

  if (config.contains("berkson")) {
    const auto& b = config.at("berkson");
    const std::string collider = b.at("collider").get<std::string>();
    const std::string value = b.at("value").get<std::string>();
    const std::string a = b.at("pair").at(0).get<std::string>();
    const std::string c = b.at("pair").at(1).get<std::string>();
    const double mi_cond = qcr::mutual_information(
        qcr::condition_on(t, collider, value), a, c);
    const double mi_do = qcr::mutual_information(
        qcr::do_distribution(t, fm.dag, collider, value), a, c);
    report_json["berkson"] = {{"mi_conditioned_bits", mi_cond},
                              {"mi_do_bits", mi_do}};
    text += "Berkson check: I(" + a + ";" + c + " | " + collider + " = " +
            value + ") = " + std::to_string(mi_cond) +
            " bits conditioned, " + std::to_string(mi_do) +
            " bits under do()\n";
  }

  if (config.contains("sample")) {
    const auto& s = config.at("sample");
    if (!s.contains("seed")) {
      throw qcr::ValidationError("config: sample requires an explicit seed");
    }
    const auto samples = qcr::sample_outcomes(
        t, s.value("n", 100), s.at("seed").get<std::uint64_t>());
    std::ostringstream csv;
    for (std::size_t a = 0; a < t.n_axes(); ++a) {
      csv << t.axis(a).node << (a + 1 < t.n_axes() ? "," : "\n");
    }
    for (const auto& row : samples) {
      for (std::size_t a = 0; a < row.size(); ++a) {
        csv << t.axis(a).labels[static_cast<std::size_t>(row[a])]
            << (a + 1 < row.size() ? "," : "\n");
      }
    }
    write_file(out / "samples.csv", csv.str());
  }

  write_json(out / "classical_report.json", report_json);
  write_file(out / "report.txt", text);
  std::cout << text;
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum causal models: simulation, tomography, reversal"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  double tol = 1e-9;

  const std::vector<std::pair<std::string, std::string>> kinds = {
      {"simulate", "generate observational-scheme outcome tables"},
      {"tomography", "reconstruct the process from its own statistics"},
      {"reverse", "construct and validate the time-reversed process"},
      {"identifiability", "layered-DAG check with counting obstruction"},
      {"classical", "functional-model baseline (CMC, do, mutilation)"}};
  for (const auto& [name, desc] : kinds) {
    auto* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_path, "experiment config (JSON)")
        ->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--tol", tol, "numerical tolerance override");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string kind = app.get_subcommands().front()->get_name();

  json config;
  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot read config " << config_path << "\n";
      return kExitValidation;
    }
    config = json::parse(in);
  } catch (const json::parse_error& err) {
    std::cerr << "error: malformed config: " << err.what() << "\n";
    return kExitValidation;
  }

  try {
    if (!config.contains("schema_version") ||
        config.at("schema_version").get<int>() != qcr::io::kSchemaVersion) {
      throw qcr::ValidationError(
          "config: missing or unsupported schema_version (expected " +
          std::to_string(qcr::io::kSchemaVersion) + ")");
    }
    if (config.contains("tolerance") &&
        !app.get_subcommands().front()->count("--tol")) {
      tol = config.at("tolerance").get<double>();
    }
    fs::create_directories(out_dir);

    if (kind == "simulate") return run_simulate(config, out_dir, tol);
    if (kind == "tomography") return run_tomography(config, out_dir, tol);
    if (kind == "reverse") return run_reverse(config, out_dir, tol);
    if (kind == "identifiability") {
      return run_identifiability(config, out_dir, tol);
    }
    return run_classical(config, out_dir, tol);
  } catch (const qcr::ValidationError& err) {
    std::cerr << "validation error: " << err.what() << "\n";
    return kExitValidation;
  } catch (const json::exception& err) {
    std::cerr << "validation error: " << err.what() << "\n";
    return kExitValidation;
  } catch (const qcr::Error& err) {
    std::cerr << "numerical check failed: " << err.what() << "\n";
    return kExitCheckFailed;
  }
}
