// Copyright 2026 The ssmatch Authors
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
#include <utility>

namespace ssmatch {

/// Failure categories. The CLI maps these to process exit codes.
enum class ErrorKind {
  invalid_argument,
  malformed_input,
  io_failure,
  budget_exceeded,
  width_violation,
  certificate_invalid,
  precondition_failed,
  verification_failed,
  unsupported,
  too_large,
  internal,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::malformed_input: return "malformed-input";
    case ErrorKind::io_failure: return "io-failure";
    case ErrorKind::budget_exceeded: return "budget-exceeded";
    case ErrorKind::width_violation: return "width-violation";
    case ErrorKind::certificate_invalid: return "certificate-invalid";
    case ErrorKind::precondition_failed: return "precondition-failed";
    case ErrorKind::verification_failed: return "verification-failed";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::too_large: return "too-large";
    case ErrorKind::internal: return "internal";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Rejected input record; `line` is 1-based, 0 when not tied to a line.
class MalformedInput : public Error {
 public:
  MalformedInput(std::size_t line, const std::string& what)
      : Error(ErrorKind::malformed_input,
              line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class BudgetExceeded : public Error {
 public:
  BudgetExceeded(std::string module, long long requested, long long budget)
      : Error(ErrorKind::budget_exceeded,
              "space budget exceeded by " + module + ": " +
                  std::to_string(requested) + " > " + std::to_string(budget) +
                  " bytes"),
        module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

}  // namespace ssmatch
