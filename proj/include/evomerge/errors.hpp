// Copyright 2026 The evomerge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace evomerge {

/// Domain failure: malformed files, incompatible checkpoints, failed evaluations.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates the documented bounds of an operation (λ outside [0,1], …).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Bad command-line usage; mapped to exit status 2 by the CLI.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace evomerge
