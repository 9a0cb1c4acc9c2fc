/*
 * This code is part of qcr.
 *
 * (C) Copyright 2026 the qcr developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "qcr/tensor.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace qcr {

SpaceLayout::SpaceLayout(std::vector<Factor> factors)
    : factors_(std::move(factors)) {
  std::set<std::string> seen;
  for (const auto& f : factors_) {
    if (f.dim < 1) {
      throw ValidationError("layout factor '" + f.label +
                            "' has non-positive dimension");
    }
    if (!seen.insert(f.label).second) {
      throw ValidationError("duplicate factor label '" + f.label +
                            "' in layout");
    }
    total_dim_ *= f.dim;
  }
}

bool SpaceLayout::has(const std::string& label) const {
  return std::any_of(factors_.begin(), factors_.end(),
                     [&](const Factor& f) { return f.label == label; });
}

Index SpaceLayout::position(const std::string& label) const {
  for (Index i = 0; i < size(); ++i) {
    if (factors_[i].label == label) return i;
  }
  throw ValidationError("unknown factor label '" + label + "'");
}

std::vector<Index> SpaceLayout::dims() const {
  std::vector<Index> d;
  d.reserve(factors_.size());
  for (const auto& f : factors_) d.push_back(f.dim);
  return d;
}

std::vector<std::string> SpaceLayout::labels() const {
  std::vector<std::string> l;
  l.reserve(factors_.size());
  for (const auto& f : factors_) l.push_back(f.label);
  return l;
}

std::vector<Index> SpaceLayout::strides() const {
  std::vector<Index> s(factors_.size(), 1);
  for (Index i = size() - 2; i >= 0; --i) {
    s[i] = s[i + 1] * factors_[i + 1].dim;
  }
  return s;
}

SpaceLayout SpaceLayout::reordered(
    const std::vector<std::string>& new_order) const {
  if (static_cast<Index>(new_order.size()) != size()) {
    throw ValidationError("factor reordering must list every label");
  }
  std::vector<Factor> out;
  out.reserve(factors_.size());
  for (const auto& label : new_order) out.push_back(factors_[position(label)]);
  return SpaceLayout(out);  // ctor re-checks uniqueness
}

SpaceLayout SpaceLayout::roles_swapped() const {
  std::vector<Factor> out = factors_;
  for (auto& f : out) f.role = (f.role == Role::In) ? Role::Out : Role::In;
  return SpaceLayout(out);
}

//=========================================================================
// Tensor algebra
//=========================================================================

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix kron_all(const std::vector<ComplexMatrix>& ops) {
  if (ops.empty()) throw ValidationError("kron_all: empty operator list");
  ComplexMatrix out = ops.front();
  for (std::size_t k = 1; k < ops.size(); ++k) out = kron(out, ops[k]);
  return out;
}

namespace {

// Flattened offsets of every multi-index of the sub-lattice given by
// (dims, strides) restricted to the selected factor positions, in row-major
// order (first position most significant).
std::vector<Index> sublattice_offsets(const std::vector<Index>& dims,
                                      const std::vector<Index>& strides,
                                      const std::vector<Index>& positions) {
  std::vector<Index> offsets{0};
  for (Index p : positions) {
    std::vector<Index> next;
    next.reserve(offsets.size() * dims[p]);
    for (Index base : offsets) {
      for (Index v = 0; v < dims[p]; ++v) {
        next.push_back(base + v * strides[p]);
      }
    }
    offsets.swap(next);
  }
  return offsets;
}

}  // namespace

std::pair<ComplexMatrix, SpaceLayout> partial_trace(
    const ComplexMatrix& m, const SpaceLayout& layout,
    const std::set<std::string>& traced_labels) {
  if (m.rows() != m.cols() || m.rows() != layout.total_dim()) {
    throw ValidationError("partial_trace: matrix does not match layout");
  }
  for (const auto& label : traced_labels) {
    layout.position(label);  // throws on unknown label
  }

  const auto dims = layout.dims();
  const auto strides = layout.strides();
  std::vector<Index> kept_pos, traced_pos;
  std::vector<Factor> kept_factors;
  for (Index i = 0; i < layout.size(); ++i) {
    if (traced_labels.count(layout.factor(i).label)) {
      traced_pos.push_back(i);
    } else {
      kept_pos.push_back(i);
      kept_factors.push_back(layout.factor(i));
    }
  }

  const auto kept_offsets = sublattice_offsets(dims, strides, kept_pos);
  const auto traced_offsets = sublattice_offsets(dims, strides, traced_pos);
  const Index reduced_dim = static_cast<Index>(kept_offsets.size());

  ComplexMatrix out = ComplexMatrix::Zero(reduced_dim, reduced_dim);
  for (Index r = 0; r < reduced_dim; ++r) {
    for (Index c = 0; c < reduced_dim; ++c) {
      Complex sum = 0.0;
      for (Index t : traced_offsets) {
        sum += m(kept_offsets[r] + t, kept_offsets[c] + t);
      }
      out(r, c) = sum;
    }
  }
  return {out, SpaceLayout(kept_factors)};
}

std::pair<ComplexMatrix, SpaceLayout> permute_factors(
    const ComplexMatrix& m, const SpaceLayout& layout,
    const std::vector<std::string>& new_order) {
  if (m.rows() != m.cols() || m.rows() != layout.total_dim()) {
    throw ValidationError("permute_factors: matrix does not match layout");
  }
  const SpaceLayout new_layout = layout.reordered(new_order);
  const auto old_strides = layout.strides();
  const auto new_dims = new_layout.dims();

  // old_of[i] = flattened old index of the state whose new index is i.
  std::vector<Index> old_of(layout.total_dim(), 0);
  std::vector<Index> old_pos(new_order.size());
  for (std::size_t k = 0; k < new_order.size(); ++k) {
    old_pos[k] = layout.position(new_order[k]);
  }
  for (Index i = 0; i < layout.total_dim(); ++i) {
    Index rem = i, acc = 0;
    for (Index k = new_layout.size() - 1; k >= 0; --k) {
      acc += (rem % new_dims[k]) * old_strides[old_pos[k]];
      rem /= new_dims[k];
    }
    old_of[i] = acc;
  }

  ComplexMatrix out(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      out(i, j) = m(old_of[i], old_of[j]);
    }
  }
  return {out, new_layout};
}

//=========================================================================
// Hermiticity / positivity
//=========================================================================

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_psd(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) {
    throw ValidationError("is_psd: matrix must be square");
  }
  if (!is_hermitian(m, tol)) return false;
  return min_eigenvalue(m) >= -tol;
}

double min_eigenvalue(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw ValidationError("min_eigenvalue: matrix must be square");
  }
  ComplexMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm);
  return solver.eigenvalues().minCoeff();
}

bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return max_abs_diff(a, b) <= tol;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

//=========================================================================
// Frame inversion
//=========================================================================

FrameSolution frame_solve(const std::vector<ComplexMatrix>& frame,
                          const std::vector<double>& coefficients) {
  if (frame.empty()) throw ValidationError("frame_solve: empty frame");
  if (frame.size() != coefficients.size()) {
    throw ValidationError("frame_solve: frame/coefficient length mismatch");
  }
  const Index rows = frame.front().rows();
  const Index cols = frame.front().cols();
  for (const auto& f : frame) {
    if (f.rows() != rows || f.cols() != cols) {
      throw ValidationError("frame_solve: frame operators differ in shape");
    }
  }

  const Index n = rows * cols;
  const Index k = static_cast<Index>(frame.size());

  // tr(F·X) = sum_{a,b} F(b,a)·X(a,b): each design row is the row-major
  // vectorization of the transposed frame operator.
  ComplexMatrix design(k, n);
  for (Index f = 0; f < k; ++f) {
    for (Index a = 0; a < rows; ++a) {
      for (Index b = 0; b < cols; ++b) {
        design(f, a * cols + b) = frame[f](b, a);
      }
    }
  }
  Eigen::VectorXcd rhs(k);
  for (Index f = 0; f < k; ++f) rhs(f) = coefficients[f];

  Eigen::JacobiSVD<ComplexMatrix> svd(
      design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? tol::kSvdCutoff * sv(0) : 0.0;

  Index rank = 0;
  Eigen::VectorXcd projected = svd.matrixU().adjoint() * rhs;
  Eigen::VectorXcd scaled = Eigen::VectorXcd::Zero(sv.size());
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) {
      scaled(i) = projected(i) / sv(i);
      ++rank;
    }
  }
  Eigen::VectorXcd x = svd.matrixV() * scaled;

  FrameSolution sol;
  sol.solution = ComplexMatrix(rows, cols);
  for (Index a = 0; a < rows; ++a) {
    for (Index b = 0; b < cols; ++b) {
      sol.solution(a, b) = x(a * cols + b);
    }
  }
  sol.rank = rank;
  sol.full_rank = n;
  sol.residual = (design * x - rhs).norm();
  sol.singular_values = sv;
  return sol;
}

Index operator_family_rank(const std::vector<ComplexMatrix>& ops) {
  if (ops.empty()) return 0;
  const Index k = static_cast<Index>(ops.size());
  ComplexMatrix gram(k, k);
  for (Index u = 0; u < k; ++u) {
    for (Index v = 0; v < k; ++v) {
      gram(u, v) = (ops[u].adjoint() * ops[v]).trace();
    }
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(gram);
  const Eigen::VectorXd ev = solver.eigenvalues();
  const double cutoff = tol::kSvdCutoff * std::max(ev.maxCoeff(), 0.0);
  Index rank = 0;
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > cutoff) ++rank;
  }
  return rank;
}

}  // namespace qcr
