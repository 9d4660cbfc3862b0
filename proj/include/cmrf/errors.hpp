// Copyright 2026 The cmrf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CMRF_ERRORS_HPP
#define CMRF_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cmrf {

/// Bad input to an operation: dimension mismatch, asymmetric weights,
/// out-of-range vertex, violated parameter precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An enumeration, table or flow size cap would be exceeded.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Neumann series for the influence bound does not converge.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver stopped before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// A probability computation hit an event of zero mass.
class ZeroProbability : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A learner could not produce a trustworthy estimate (too many empty cells).
class LearnerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. `line` is 1-based; `column` is 1-based or 0 when
/// the whole line is at fault.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, std::size_t column,
             const std::string& message)
      : std::runtime_error(source + ":" + std::to_string(line) +
                           (column ? ":" + std::to_string(column) : std::string()) +
                           ": " + message),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace cmrf

#endif  // CMRF_ERRORS_HPP
