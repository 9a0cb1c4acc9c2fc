/*
 * This code is part of qcr.
 *
 * (C) Copyright 2026 the qcr developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QCR_TENSOR_HPP
#define QCR_TENSOR_HPP

#include <Eigen/Dense>
#include <complex>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qcr/errors.hpp"

namespace qcr {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

namespace tol {
// Default absolute tolerance for equality comparisons and constraint checks.
inline constexpr double kDefault = 1e-9;
// Eigenvalue floor for positive-semidefiniteness tests.
inline constexpr double kPsdFloor = 1e-9;
// Relative singular-value cutoff for pseudoinverse-based frame inversion.
inline constexpr double kSvdCutoff = 1e-10;
// Maximum tolerated imaginary residue on a quantity that must be real.
inline constexpr double kImagResidue = 1e-8;
}  // namespace tol

// Whether a Hilbert-space factor is an input or an output of the node/layer
// it belongs to. "In" factors are transposed slots in the Born pairing.
enum class Role { In, Out };

struct Factor {
  std::string label;
  Index dim = 0;
  Role role = Role::In;
};

//=========================================================================
// SpaceLayout: ordered named tensor factors annotating an operator
//=========================================================================

// The factor order is the canonical tensor order: the first factor is the
// most significant block index, exactly as produced by kron().
class SpaceLayout {
 public:
  SpaceLayout() = default;
  explicit SpaceLayout(std::vector<Factor> factors);

  Index total_dim() const { return total_dim_; }
  Index size() const { return static_cast<Index>(factors_.size()); }
  const Factor& factor(Index i) const { return factors_.at(i); }
  const std::vector<Factor>& factors() const { return factors_; }

  bool has(const std::string& label) const;
  // Position of a labelled factor; throws ValidationError if unknown.
  Index position(const std::string& label) const;

  std::vector<Index> dims() const;
  std::vector<std::string> labels() const;

  // Block stride of each factor in the flattened index (mixed-radix,
  // factor 0 most significant).
  std::vector<Index> strides() const;

  // New layout with the same factors reordered as given (a permutation of
  // all labels).
  SpaceLayout reordered(const std::vector<std::string>& new_order) const;

  // New layout with every factor role flipped (In <-> Out).
  SpaceLayout roles_swapped() const;

 private:
  std::vector<Factor> factors_;
  Index total_dim_ = 1;
};

//=========================================================================
// Dense complex tensor algebra
//=========================================================================

// Kronecker product; (a ⊗ b)[i*rb+k, j*cb+l] = a[i,j]·b[k,l].
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Fold kron over a nonempty list, left to right.
ComplexMatrix kron_all(const std::vector<ComplexMatrix>& ops);

// Trace out the named factors. Returns the reduced operator and the layout
// of the remaining factors (original order preserved).
std::pair<ComplexMatrix, SpaceLayout> partial_trace(
    const ComplexMatrix& m, const SpaceLayout& layout,
    const std::set<std::string>& traced_labels);

// Reorder tensor factors. new_order must be a permutation of all labels.
std::pair<ComplexMatrix, SpaceLayout> permute_factors(
    const ComplexMatrix& m, const SpaceLayout& layout,
    const std::vector<std::string>& new_order);

bool is_hermitian(const ComplexMatrix& m, double tol = tol::kDefault);

// Hermitian within tol and all eigenvalues >= -tol. Non-square input is
// rejected.
bool is_psd(const ComplexMatrix& m, double tol = tol::kPsdFloor);

// Smallest eigenvalue of the Hermitian part (m + m†)/2. Used for reporting
// how far a matrix is from positive semidefinite.
double min_eigenvalue(const ComplexMatrix& m);

bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b,
                  double tol = tol::kDefault);

// Largest entrywise absolute difference.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

//=========================================================================
// Linear-frame inversion
//=========================================================================

struct FrameSolution {
  ComplexMatrix solution;
  Index rank = 0;            // numerical rank of the design matrix
  Index full_rank = 0;       // rank needed to span the operator space
  double residual = 0.0;     // ||A·vec(X) - coefficients||_2
  Eigen::VectorXd singular_values;

  bool frame_spans() const { return rank == full_rank; }
};

// Least-squares solve of tr(frame_k · X) = coefficients_k via SVD
// pseudoinverse with relative singular-value cutoff tol::kSvdCutoff.
// When the frame spans the operator space the solution is exact.
FrameSolution frame_solve(const std::vector<ComplexMatrix>& frame,
                          const std::vector<double>& coefficients);

// Dimension of the span of an operator family, via the rank of its Gram
// matrix G_uv = tr(ops_u† · ops_v) with relative cutoff tol::kSvdCutoff.
Index operator_family_rank(const std::vector<ComplexMatrix>& ops);

}  // namespace qcr

#endif  // QCR_TENSOR_HPP
