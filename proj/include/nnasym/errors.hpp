// Copyright 2026 The nnasym Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nnasym {

/// Input that violates a documented precondition (sizes, signs, ranges).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Vector/matrix dimensions that do not agree with the model.
class DimensionMismatch : public InvalidInput {
 public:
  DimensionMismatch(std::string what, std::size_t expected, std::size_t got)
      : InvalidInput(what + ": expected dimension " + std::to_string(expected) +
                     ", got " + std::to_string(got)) {}
};

/// A quantity that must be non-zero (a norm, a Gram diagonal) vanished.
class Degenerate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical pipeline failure (non-finite objective, failed factorization).
class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration parse or validation failure; `line` is 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& msg)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace nnasym
