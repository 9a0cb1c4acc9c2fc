/*
 * This code is part of qcr.
 *
 * (C) Copyright 2026 the qcr developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QCR_ERRORS_HPP
#define QCR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qcr {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rejected input: violated precondition, malformed object, unknown label.
struct ValidationError : Error {
  using Error::Error;
};

// Numerical convention violation (e.g. imaginary residue on a probability),
// which indicates a layout/permutation bug rather than bad user input.
struct ConventionError : Error {
  using Error::Error;
};

}  // namespace qcr

#endif  // QCR_ERRORS_HPP
