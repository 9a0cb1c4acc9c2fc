/*
 * This code is part of qcr.
 *
 * (C) Copyright 2026 the qcr developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QCR_TABLE_HPP
#define QCR_TABLE_HPP

#include <functional>
#include <string>
#include <vector>

#include "qcr/tensor.hpp"

namespace qcr {

struct TableAxis {
  std::string node;
  std::vector<std::string> labels;
};

// Dense joint probability table over per-node outcome tuples, row-major
// with the first axis most significant. Entries may carry numerical dust
// down to -1e-12; reads clip to 0.
class OutcomeTable {
 public:
  explicit OutcomeTable(std::vector<TableAxis> axes);
  static OutcomeTable from_probabilities(std::vector<TableAxis> axes,
                                         std::vector<double> probabilities);

  const std::vector<TableAxis>& axes() const { return axes_; }
  const TableAxis& axis(std::size_t i) const { return axes_.at(i); }
  std::size_t n_axes() const { return axes_.size(); }
  Index n_entries() const { return static_cast<Index>(probs_.size()); }

  std::size_t axis_of(const std::string& node) const;
  bool has_axis(const std::string& node) const;

  Index flatten(const std::vector<Index>& multi) const;
  std::vector<Index> unflatten(Index flat) const;

  // Clipped reads.
  double at(const std::vector<Index>& multi) const;
  double at_flat(Index flat) const;

  void set(const std::vector<Index>& multi, double value);
  void set_flat(Index flat, double value);

  double sum() const;
  bool is_normalized(double tolerance = tol::kDefault) const;

  // Marginal over the named nodes (axis order preserved from this table).
  OutcomeTable marginal(const std::vector<std::string>& nodes) const;

  // Same distribution with axes permuted into the given node order.
  OutcomeTable reordered(const std::vector<std::string>& node_order) const;

  double max_abs_difference(const OutcomeTable& other) const;

  void for_each(
      const std::function<void(const std::vector<Index>&, double)>& fn) const;

 private:
  std::vector<TableAxis> axes_;
  std::vector<double> probs_;
  std::vector<Index> strides_;
};

}  // namespace qcr

#endif  // QCR_TABLE_HPP
