/*
 * This code is part of qcr.
 *
 * (C) Copyright 2026 the qcr developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "qcr/instruments.hpp"

#include <cmath>
#include <sstream>

#include "qcr/errors.hpp"

namespace qcr {

CPMap CPMap::from_kraus(std::vector<ComplexMatrix> kraus, double tolerance) {
  if (kraus.empty()) {
    throw ValidationError("CPMap: empty Kraus list");
  }
  const Index out = kraus.front().rows();
  const Index in = kraus.front().cols();
  for (const auto& a : kraus) {
    if (a.rows() != out || a.cols() != in) {
      throw ValidationError("CPMap: Kraus operators differ in shape");
    }
  }
  ComplexMatrix sum = ComplexMatrix::Zero(in, in);
  for (const auto& a : kraus) sum += a.adjoint() * a;
  // Trace non-increasing: sum A†A <= I.
  ComplexMatrix slack = ComplexMatrix::Identity(in, in) - sum;
  if (min_eigenvalue(slack) < -tolerance) {
    std::ostringstream msg;
    msg << "CPMap: Kraus sum exceeds identity by "
        << -min_eigenvalue(slack);
    throw ValidationError(msg.str());
  }
  CPMap m;
  m.kraus = std::move(kraus);
  m.in_dim = in;
  m.out_dim = out;
  return m;
}

ComplexMatrix CPMap::operator()(const ComplexMatrix& x) const {
  ComplexMatrix out = ComplexMatrix::Zero(out_dim, out_dim);
  for (const auto& a : kraus) out += a * x * a.adjoint();
  return out;
}

ComplexMatrix povm_element(const CPMap& m) {
  ComplexMatrix f = ComplexMatrix::Zero(m.in_dim, m.in_dim);
  for (const auto& a : m.kraus) f += a.adjoint() * a;
  return f;
}

ApplyResult apply(const CPMap& m, const ComplexMatrix& rho) {
  if (rho.rows() != m.in_dim || rho.cols() != m.in_dim) {
    throw ValidationError("apply: state dimension mismatch");
  }
  ApplyResult res;
  res.prob = (rho * povm_element(m)).trace().real();
  if (res.prob > 1e-12) {
    res.post = m(rho) / res.prob;
  }
  return res;
}

ChoiMatrix choi(const CPMap& m) {
  const Index n = m.in_dim * m.out_dim;
  ComplexMatrix c = ComplexMatrix::Zero(n, n);
  // C = sum_k w_k w_k† with w_k = sum_i |i> ⊗ A_k|i>.
  for (const auto& a : m.kraus) {
    Eigen::VectorXcd w(n);
    for (Index i = 0; i < m.in_dim; ++i) {
      w.segment(i * m.out_dim, m.out_dim) = a.col(i);
    }
    c += w * w.adjoint();
  }
  return ChoiMatrix{c, m.in_dim, m.out_dim};
}

//=========================================================================
// Instruments
//=========================================================================

const CPMap& Instrument::map_for(const std::string& outcome) const {
  for (std::size_t v = 0; v < outcomes.size(); ++v) {
    if (outcomes[v] == outcome) return maps[v];
  }
  throw ValidationError("instrument '" + node + "' has no outcome '" +
                        outcome + "'");
}

Instrument Instrument::create(std::string node,
                              std::vector<std::string> outcomes,
                              std::vector<CPMap> maps,
                              std::vector<double> beta, double tolerance) {
  if (maps.empty() || maps.size() != outcomes.size()) {
    throw ValidationError("Instrument: outcome/map count mismatch");
  }
  if (!beta.empty() && beta.size() != maps.size()) {
    throw ValidationError("Instrument: beta/outcome count mismatch");
  }
  const Index in = maps.front().in_dim;
  const Index out = maps.front().out_dim;
  ComplexMatrix total = ComplexMatrix::Zero(in, in);
  for (const auto& m : maps) {
    if (m.in_dim != in || m.out_dim != out) {
      throw ValidationError("Instrument: maps differ in dimension");
    }
    total += povm_element(m);
  }
  const double dev =
      max_abs_diff(total, ComplexMatrix::Identity(in, in));
  if (dev > tolerance) {
    std::ostringstream msg;
    msg << "Instrument: outcome-summed map is not trace preserving "
        << "(max deviation of sum F_v from identity: " << dev << ")";
    throw ValidationError(msg.str());
  }
  Instrument inst;
  inst.node = std::move(node);
  inst.outcomes = std::move(outcomes);
  inst.maps = std::move(maps);
  inst.beta = std::move(beta);
  return inst;
}

IcDiagnostics is_informationally_complete(const Instrument& inst) {
  IcDiagnostics diag;
  diag.required_state_rank = inst.out_dim() * inst.out_dim();
  diag.required_povm_rank = inst.in_dim() * inst.in_dim();

  const ComplexMatrix mixed =
      ComplexMatrix::Identity(inst.in_dim(), inst.in_dim()) /
      static_cast<double>(inst.in_dim());
  std::vector<ComplexMatrix> states, povms;
  for (const auto& m : inst.maps) {
    auto res = qcr::apply(m, mixed);
    if (!res.degenerate()) states.push_back(*res.post);
    povms.push_back(povm_element(m));
  }
  diag.state_rank = operator_family_rank(states);
  diag.povm_rank = operator_family_rank(povms);
  diag.complete = diag.state_rank == diag.required_state_rank &&
                  diag.povm_rank == diag.required_povm_rank;
  return diag;
}

bool is_minimal(const Instrument& inst) {
  return inst.in_dim() == inst.out_dim() &&
         inst.n_outcomes() == inst.in_dim() * inst.in_dim();
}

//=========================================================================
// SIC construction
//=========================================================================

namespace {

std::vector<ComplexMatrix> sic_projectors_d2() {
  // Bloch tetrahedron: directions (±1,±1,±1)/√3 with an even number of
  // minus signs; Π = (I + r·σ)/2.
  const double s = 1.0 / std::sqrt(3.0);
  const double dirs[4][3] = {
      {s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
  std::vector<ComplexMatrix> out;
  for (const auto& r : dirs) {
    ComplexMatrix p(2, 2);
    p(0, 0) = 0.5 * (1.0 + r[2]);
    p(1, 1) = 0.5 * (1.0 - r[2]);
    p(0, 1) = 0.5 * Complex(r[0], -r[1]);
    p(1, 0) = 0.5 * Complex(r[0], r[1]);
    out.push_back(p);
  }
  return out;
}

std::vector<ComplexMatrix> sic_projectors_d3() {
  // Weyl-Heisenberg orbit of the Hesse fiducial (0, 1, -1)/√2: the nine
  // states X^p Z^q |f> with X the cyclic shift and Z = diag(1, ω, ω²).
  Eigen::Vector3cd fiducial;
  fiducial << 0.0, 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  const Complex omega = std::exp(Complex(0.0, 2.0 * M_PI / 3.0));
  std::vector<ComplexMatrix> out;
  for (int p = 0; p < 3; ++p) {
    for (int q = 0; q < 3; ++q) {
      Eigen::Vector3cd v;
      for (int r = 0; r < 3; ++r) {
        // (X^p Z^q f)[r] = ω^{q(r-p)} f[(r-p) mod 3]
        const int src = ((r - p) % 3 + 3) % 3;
        v(r) = std::pow(omega, q * src) * fiducial(src);
      }
      out.push_back(v * v.adjoint());
    }
  }
  return out;
}

}  // namespace

std::vector<ComplexMatrix> sic_projectors(Index d) {
  if (d == 2) return sic_projectors_d2();
  if (d == 3) return sic_projectors_d3();
  throw ValidationError(
      "sic_projectors: unsupported dimension " + std::to_string(d) +
      " (supported: 2, 3)");
}

Instrument sic_instrument(Index d, const std::string& node) {
  auto projectors = sic_projectors(d);
  std::vector<std::string> outcomes;
  std::vector<CPMap> maps;
  std::vector<double> beta;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t v = 0; v < projectors.size(); ++v) {
    outcomes.push_back("v" + std::to_string(v));
    maps.push_back(CPMap::from_kraus({scale * projectors[v]}));
    beta.push_back(1.0 / static_cast<double>(d));
  }
  return Instrument::create(node, std::move(outcomes), std::move(maps),
                            std::move(beta));
}

//=========================================================================
// IC-set merge
//=========================================================================

Instrument merge_ic_set(const std::vector<Instrument>& ic_set,
                        const std::vector<std::vector<double>>& gamma) {
  if (ic_set.empty()) {
    throw ValidationError("merge_ic_set: empty instrument set");
  }
  if (gamma.size() != ic_set.size()) {
    throw ValidationError("merge_ic_set: gamma must have one weight list "
                          "per member instrument");
  }
  const Index in = ic_set.front().in_dim();
  const Index out = ic_set.front().out_dim();
  const std::string node = ic_set.front().node;
  std::vector<std::string> outcomes;
  std::vector<CPMap> maps;
  for (std::size_t x = 0; x < ic_set.size(); ++x) {
    const Instrument& member = ic_set[x];
    if (member.in_dim() != in || member.out_dim() != out) {
      throw ValidationError(
          "merge_ic_set: member instruments differ in dimension");
    }
    if (gamma[x].size() != member.maps.size()) {
      throw ValidationError("merge_ic_set: gamma shape does not match "
                            "member outcome count");
    }
    for (std::size_t v = 0; v < member.maps.size(); ++v) {
      const double g = gamma[x][v];
      if (g < 0.0) {
        throw ValidationError("merge_ic_set: negative gamma weight");
      }
      std::vector<ComplexMatrix> kraus;
      for (const auto& a : member.maps[v].kraus) {
        kraus.push_back(std::sqrt(g) * a);
      }
      maps.push_back(CPMap::from_kraus(std::move(kraus)));
      outcomes.push_back("x" + std::to_string(x) + ":" +
                         member.outcomes[v]);
    }
  }
  // Instrument::create rejects the merge when sum gamma_(x,v) F^x_v != I,
  // reporting the deviation.
  return Instrument::create(node, std::move(outcomes), std::move(maps));
}

//=========================================================================
// Common constructors
//=========================================================================

Instrument projective_instrument(const std::vector<ComplexMatrix>& projectors,
                                 const std::string& node) {
  std::vector<std::string> outcomes;
  std::vector<CPMap> maps;
  std::vector<double> beta;
  for (std::size_t v = 0; v < projectors.size(); ++v) {
    outcomes.push_back("v" + std::to_string(v));
    maps.push_back(CPMap::from_kraus({projectors[v]}));
    beta.push_back(1.0);
  }
  return Instrument::create(node, std::move(outcomes), std::move(maps),
                            std::move(beta));
}

Instrument discard_prepare_instrument(Index in_dim,
                                      const ComplexMatrix& state,
                                      const std::string& node) {
  ComplexMatrix rho = state;
  if (rho.cols() == 1) rho = state * state.adjoint();  // ket input
  if (rho.rows() != rho.cols()) {
    throw ValidationError("discard_prepare: state must be a ket or a "
                          "square density matrix");
  }
  const double trace = rho.trace().real();
  if (std::abs(trace - 1.0) > tol::kDefault || !is_psd(rho, tol::kPsdFloor)) {
    throw ValidationError("discard_prepare: state is not a density matrix");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho);
  std::vector<ComplexMatrix> kraus;
  for (Index k = 0; k < rho.rows(); ++k) {
    const double lambda = solver.eigenvalues()(k);
    if (lambda < 1e-14) continue;
    for (Index i = 0; i < in_dim; ++i) {
      ComplexMatrix a = ComplexMatrix::Zero(rho.rows(), in_dim);
      a.col(i) = std::sqrt(lambda) * solver.eigenvectors().col(k);
      kraus.push_back(a);
    }
  }
  return Instrument::create(node, {"prepared"},
                            {CPMap::from_kraus(std::move(kraus))});
}

Instrument identity_instrument(Index d, const std::string& node) {
  return Instrument::create(
      node, {"passed"},
      {CPMap::from_kraus({ComplexMatrix::Identity(d, d)})});
}

}  // namespace qcr
