// Copyright 2026 The sarkit Authors
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

#ifndef SARKIT_ERROR_HPP_
#define SARKIT_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace sarkit {

// Failure categories reported by the library. Callers that map failures to
// process exit codes treat kArgument/kConfiguration as caller mistakes and
// everything else as runtime failures.
enum class ErrorKind {
  kArgument,        // bad value passed to an operation (shape, range, NaN)
  kConfiguration,   // invalid or inconsistent config object / file
  kContract,        // input violates a documented precondition of the data
  kDegenerateInput, // input is valid in shape but numerically unusable
  kConvergence,     // an iterative routine exhausted its iteration budget
  kSequencing,      // operation called before its prerequisite
  kIo,              // file could not be read, parsed, or written
};

// Single exception type for the whole library; the kind carries the taxonomy.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_error(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kArgument: return "argument";
    case ErrorKind::kConfiguration: return "configuration";
    case ErrorKind::kContract: return "contract";
    case ErrorKind::kDegenerateInput: return "degenerate-input";
    case ErrorKind::kConvergence: return "convergence";
    case ErrorKind::kSequencing: return "sequencing";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace sarkit

#endif  // SARKIT_ERROR_HPP_
