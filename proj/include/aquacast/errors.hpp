// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace aquacast {

// User-facing failures (bad shapes, bad config, malformed input) derive from
// UserError; the CLI maps them to exit code 2. ContractError marks a broken
// internal invariant and maps to exit code 3.

class UserError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public UserError {
 public:
  using UserError::UserError;
};

class ConfigError : public UserError {
 public:
  using UserError::UserError;
};

class InputError : public UserError {
 public:
  using UserError::UserError;
};

/// A pipe network that is cyclic or has nodes with no way to a terminal.
class NetworkError : public UserError {
 public:
  using UserError::UserError;
};

class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A computation produced NaN or infinity (e.g. a diverging optimizer).
class NumericalError : public ContractError {
 public:
  using ContractError::ContractError;
};

}  // namespace aquacast
