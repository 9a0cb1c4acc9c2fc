/*
 * This code is part of qcr.
 *
 * (C) Copyright 2026 the qcr developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "qcr/table.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qcr/errors.hpp"

namespace qcr {

namespace {

constexpr double kEntryFloor = -1e-12;
constexpr Index kMaxEntries = 1000000;

}  // namespace

OutcomeTable::OutcomeTable(std::vector<TableAxis> axes)
    : axes_(std::move(axes)) {
  std::set<std::string> seen;
  Index total = 1;
  for (const auto& a : axes_) {
    if (a.labels.empty()) {
      throw ValidationError("OutcomeTable: axis '" + a.node +
                            "' has no outcome labels");
    }
    if (!seen.insert(a.node).second) {
      throw ValidationError("OutcomeTable: duplicate axis '" + a.node + "'");
    }
    total *= static_cast<Index>(a.labels.size());
    if (total > kMaxEntries) {
      throw ValidationError(
          "OutcomeTable: outcome space has at least " +
          std::to_string(total) + " entries, over the dense-table cap of " +
          std::to_string(kMaxEntries));
    }
  }
  probs_.assign(static_cast<std::size_t>(total), 0.0);
  strides_.assign(axes_.size(), 1);
  for (std::size_t i = axes_.size(); i-- > 1;) {
    strides_[i - 1] =
        strides_[i] * static_cast<Index>(axes_[i].labels.size());
  }
}

OutcomeTable OutcomeTable::from_probabilities(
    std::vector<TableAxis> axes, std::vector<double> probabilities) {
  OutcomeTable t(std::move(axes));
  if (probabilities.size() != t.probs_.size()) {
    throw ValidationError("OutcomeTable: probability count mismatch");
  }
  for (double p : probabilities) {
    if (p < kEntryFloor || !std::isfinite(p)) {
      throw ValidationError("OutcomeTable: negative or non-finite entry");
    }
  }
  t.probs_ = std::move(probabilities);
  return t;
}

std::size_t OutcomeTable::axis_of(const std::string& node) const {
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (axes_[i].node == node) return i;
  }
  throw ValidationError("OutcomeTable: no axis for node '" + node + "'");
}

bool OutcomeTable::has_axis(const std::string& node) const {
  return std::any_of(axes_.begin(), axes_.end(),
                     [&](const TableAxis& a) { return a.node == node; });
}

Index OutcomeTable::flatten(const std::vector<Index>& multi) const {
  if (multi.size() != axes_.size()) {
    throw ValidationError("OutcomeTable: multi-index arity mismatch");
  }
  Index flat = 0;
  for (std::size_t i = 0; i < multi.size(); ++i) {
    if (multi[i] < 0 ||
        multi[i] >= static_cast<Index>(axes_[i].labels.size())) {
      throw ValidationError("OutcomeTable: outcome index out of range");
    }
    flat += multi[i] * strides_[i];
  }
  return flat;
}

std::vector<Index> OutcomeTable::unflatten(Index flat) const {
  std::vector<Index> multi(axes_.size());
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    multi[i] = flat / strides_[i];
    flat %= strides_[i];
  }
  return multi;
}

double OutcomeTable::at(const std::vector<Index>& multi) const {
  return at_flat(flatten(multi));
}

double OutcomeTable::at_flat(Index flat) const {
  return std::max(0.0, probs_.at(static_cast<std::size_t>(flat)));
}

void OutcomeTable::set(const std::vector<Index>& multi, double value) {
  set_flat(flatten(multi), value);
}

void OutcomeTable::set_flat(Index flat, double value) {
  if (value < kEntryFloor || !std::isfinite(value)) {
    throw ValidationError("OutcomeTable: negative or non-finite entry");
  }
  probs_.at(static_cast<std::size_t>(flat)) = value;
}

double OutcomeTable::sum() const {
  double s = 0.0;
  for (double p : probs_) s += std::max(0.0, p);
  return s;
}

bool OutcomeTable::is_normalized(double tolerance) const {
  return std::abs(sum() - 1.0) <= tolerance;
}

OutcomeTable OutcomeTable::marginal(
    const std::vector<std::string>& nodes) const {
  std::set<std::string> keep(nodes.begin(), nodes.end());
  for (const auto& n : nodes) axis_of(n);  // validates
  std::vector<TableAxis> kept_axes;
  std::vector<std::size_t> kept_pos;
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (keep.count(axes_[i].node)) {
      kept_axes.push_back(axes_[i]);
      kept_pos.push_back(i);
    }
  }
  OutcomeTable out(kept_axes);
  std::vector<Index> reduced(kept_axes.size());
  for (Index flat = 0; flat < n_entries(); ++flat) {
    auto multi = unflatten(flat);
    for (std::size_t k = 0; k < kept_pos.size(); ++k) {
      reduced[k] = multi[kept_pos[k]];
    }
    Index rf = out.flatten(reduced);
    out.probs_[static_cast<std::size_t>(rf)] += at_flat(flat);
  }
  return out;
}

OutcomeTable OutcomeTable::reordered(
    const std::vector<std::string>& node_order) const {
  if (node_order.size() != axes_.size()) {
    throw ValidationError("OutcomeTable: reorder must list every axis");
  }
  std::vector<TableAxis> new_axes;
  std::vector<std::size_t> src_pos;
  for (const auto& n : node_order) {
    std::size_t p = axis_of(n);
    new_axes.push_back(axes_[p]);
    src_pos.push_back(p);
  }
  OutcomeTable out(new_axes);
  std::vector<Index> new_multi(axes_.size());
  for (Index flat = 0; flat < n_entries(); ++flat) {
    auto multi = unflatten(flat);
    for (std::size_t k = 0; k < src_pos.size(); ++k) {
      new_multi[k] = multi[src_pos[k]];
    }
    out.probs_[static_cast<std::size_t>(out.flatten(new_multi))] =
        probs_[static_cast<std::size_t>(flat)];
  }
  return out;
}

double OutcomeTable::max_abs_difference(const OutcomeTable& other) const {
  if (other.n_entries() != n_entries()) {
    throw ValidationError("OutcomeTable: comparing differently shaped "
                          "tables");
  }
  double m = 0.0;
  for (Index flat = 0; flat < n_entries(); ++flat) {
    m = std::max(m, std::abs(at_flat(flat) - other.at_flat(flat)));
  }
  return m;
}

void OutcomeTable::for_each(
    const std::function<void(const std::vector<Index>&, double)>& fn) const {
  for (Index flat = 0; flat < n_entries(); ++flat) {
    fn(unflatten(flat), at_flat(flat));
  }
}

}  // namespace qcr
