/*
 * This code is part of qcr.
 *
 * (C) Copyright 2026 the qcr developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "qcr/process.hpp"

#include <random>
#include <sstream>

#include "qcr/errors.hpp"

namespace qcr {

Segment Segment::from_choi(ComplexMatrix matrix, Index d_in, Index d_out,
                           std::string in_label, std::string out_label) {
  if (matrix.rows() != matrix.cols() || matrix.rows() != d_in * d_out) {
    throw ValidationError("Segment: matrix does not match d_in*d_out");
  }
  Segment s;
  s.matrix = std::move(matrix);
  s.d_in = d_in;
  s.d_out = d_out;
  s.in_label = std::move(in_label);
  s.out_label = std::move(out_label);
  return s;
}

Segment Segment::from_channel(const CPMap& channel, std::string in_label,
                              std::string out_label) {
  auto c = choi(channel);
  return from_choi(c.matrix, c.in_dim, c.out_dim, std::move(in_label),
                   std::move(out_label));
}

ComplexMatrix Segment::apply_to(const ComplexMatrix& x) const {
  if (x.rows() != d_in || x.cols() != d_in) {
    throw ValidationError("Segment::apply_to: dimension mismatch");
  }
  ComplexMatrix contracted =
      kron(x.transpose(), ComplexMatrix::Identity(d_out, d_out)) * matrix;
  auto [out, l] = partial_trace(contracted, layout(), {in_label});
  return out;
}

Segment identity_segment(Index d, std::string in_label,
                         std::string out_label) {
  return Segment::from_channel(
      CPMap::from_kraus({ComplexMatrix::Identity(d, d)}),
      std::move(in_label), std::move(out_label));
}

Segment discard_prepare_segment(Index d_in, const ComplexMatrix& state,
                                std::string in_label,
                                std::string out_label) {
  ComplexMatrix rho = state;
  if (rho.cols() == 1) rho = state * state.adjoint();
  // W = I^{in} ⊗ rho^{out}.
  return Segment::from_choi(kron(ComplexMatrix::Identity(d_in, d_in), rho),
                            d_in, rho.rows(), std::move(in_label),
                            std::move(out_label));
}

//=========================================================================
// Validity
//=========================================================================

SegmentReport validate_segment(const Segment& s, double tolerance) {
  if (s.matrix.rows() != s.d_in * s.d_out) {
    throw ValidationError("validate_segment: layout mismatch");
  }
  SegmentReport report;
  const double herm_dev = max_abs_diff(s.matrix, s.matrix.adjoint());
  const double floor = min_eigenvalue(s.matrix);
  report.psd_floor = floor < 0.0 ? floor : 0.0;
  if (herm_dev > tolerance || floor < -tolerance) {
    report.violations.push_back(
        {"W >= 0", herm_dev > tolerance ? herm_dev : -floor});
  }

  auto [reduced, l] = partial_trace(s.matrix, s.layout(), {s.out_label});
  report.output_trace_dev = max_abs_diff(
      reduced, ComplexMatrix::Identity(s.d_in, s.d_in));
  if (report.output_trace_dev > tolerance) {
    report.violations.push_back(
        {"tr_out W = I^in", report.output_trace_dev});
  }

  report.trace_dev =
      std::abs(s.matrix.trace().real() - static_cast<double>(s.d_in)) +
      std::abs(s.matrix.trace().imag());
  if (report.trace_dev > tolerance) {
    report.violations.push_back({"tr W = d_in", report.trace_dev});
  }
  return report;
}

UnbiasedReport is_unbiased(const Segment& s, double tolerance) {
  auto [reduced, l] = partial_trace(s.matrix, s.layout(), {s.in_label});
  const double ratio =
      static_cast<double>(s.d_in) / static_cast<double>(s.d_out);
  UnbiasedReport report;
  report.deviation = max_abs_diff(
      reduced, ratio * ComplexMatrix::Identity(s.d_out, s.d_out));
  report.ok = report.deviation <= tolerance;
  return report;
}

//=========================================================================
// Random generation
//=========================================================================

ComplexMatrix haar_unitary(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  ComplexMatrix g(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      g(i, j) = Complex(dist(rng), dist(rng));
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < d; ++i) {
    const Complex rii = r(i, i);
    const Complex phase = std::abs(rii) > 0 ? rii / std::abs(rii) : 1.0;
    q.col(i) *= phase;
  }
  return q;
}

Segment random_unbiased_segment(Index d, int n_unitaries,
                                std::uint64_t seed) {
  if (d < 2 || n_unitaries < 1) {
    throw ValidationError(
        "random_unbiased_segment: need d >= 2 and n_unitaries >= 1");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.1, 1.0);
  std::vector<double> weights(n_unitaries);
  double total = 0.0;
  for (auto& w : weights) {
    w = uniform(rng);
    total += w;
  }
  ComplexMatrix w_matrix = ComplexMatrix::Zero(d * d, d * d);
  for (int k = 0; k < n_unitaries; ++k) {
    ComplexMatrix u = haar_unitary(d, rng);
    Eigen::VectorXcd vec(d * d);
    for (Index i = 0; i < d; ++i) vec.segment(i * d, d) = u.col(i);
    w_matrix += (weights[k] / total) * (vec * vec.adjoint());
  }
  return Segment::from_choi(std::move(w_matrix), d, d);
}

//=========================================================================
// Layered processes
//=========================================================================

namespace {

void check_chain(const Layering& layering,
                 const std::vector<Index>& layer_dims,
                 const std::vector<Segment>& segments) {
  if (layering.layers.size() != layer_dims.size()) {
    throw ValidationError("LayeredProcess: layering/dims size mismatch");
  }
  if (layer_dims.empty()) {
    throw ValidationError("LayeredProcess: need at least one layer");
  }
  if (segments.size() + 1 != layer_dims.size()) {
    throw ValidationError(
        "LayeredProcess: need exactly one segment per layer pair");
  }
  for (std::size_t j = 0; j < segments.size(); ++j) {
    if (segments[j].d_in != layer_dims[j] ||
        segments[j].d_out != layer_dims[j + 1]) {
      std::ostringstream msg;
      msg << "LayeredProcess: segment " << j << " is "
          << segments[j].d_in << "->" << segments[j].d_out
          << " but layers have dims " << layer_dims[j] << "->"
          << layer_dims[j + 1];
      throw ValidationError(msg.str());
    }
  }
}

}  // namespace

LayeredProcess LayeredProcess::unbiased_chain(Layering layering,
                                              std::vector<Index> layer_dims,
                                              std::vector<Segment> segments) {
  check_chain(layering, layer_dims, segments);
  LayeredProcess lp;
  lp.initial = ComplexMatrix::Identity(layer_dims[0], layer_dims[0]) /
               static_cast<double>(layer_dims[0]);
  lp.layering = std::move(layering);
  lp.layer_dims = std::move(layer_dims);
  lp.segments = std::move(segments);
  return lp;
}

LayeredProcess LayeredProcess::biased_chain(Layering layering,
                                            std::vector<Index> layer_dims,
                                            ComplexMatrix initial,
                                            std::vector<Segment> segments) {
  check_chain(layering, layer_dims, segments);
  if (initial.rows() != layer_dims[0] || initial.cols() != layer_dims[0]) {
    throw ValidationError("LayeredProcess: initial state dim mismatch");
  }
  if (!is_psd(initial, tol::kPsdFloor) ||
      std::abs(initial.trace().real() - 1.0) > tol::kDefault) {
    throw ValidationError(
        "LayeredProcess: initial is not a density matrix");
  }
  LayeredProcess lp;
  lp.layering = std::move(layering);
  lp.layer_dims = std::move(layer_dims);
  lp.initial = std::move(initial);
  lp.segments = std::move(segments);
  return lp;
}

AssembledProcess assemble(const LayeredProcess& lp) {
  check_chain(lp.layering, lp.layer_dims, lp.segments);
  const std::size_t k = lp.n_layers();

  std::vector<Factor> factors;
  factors.push_back({"I1", lp.layer_dims[0], Role::In});
  ComplexMatrix w = lp.initial;
  for (std::size_t j = 0; j < lp.segments.size(); ++j) {
    factors.push_back({"O" + std::to_string(j + 1), lp.layer_dims[j],
                       Role::Out});
    factors.push_back({"I" + std::to_string(j + 2), lp.layer_dims[j + 1],
                       Role::In});
    w = kron(w, lp.segments[j].matrix);
  }
  factors.push_back({"O" + std::to_string(k), lp.layer_dims[k - 1],
                     Role::Out});
  w = kron(w, ComplexMatrix::Identity(lp.layer_dims[k - 1],
                                      lp.layer_dims[k - 1]));
  return AssembledProcess{std::move(w), SpaceLayout(factors)};
}

Segment swap_io(const Segment& s) {
  auto [permuted, l] =
      permute_factors(s.matrix, s.layout(), {s.out_label, s.in_label});
  Segment out;
  out.matrix = permuted.transpose();
  out.d_in = s.d_out;
  out.d_out = s.d_in;
  out.in_label = s.out_label;
  out.out_label = s.in_label;
  return out;
}

}  // namespace qcr
