// Copyright 2026 The TokenFlow Authors
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

#ifndef TOKENFLOW_ERROR_H_
#define TOKENFLOW_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace tokenflow {

// Diagnostic codes. Input problems are distinguished so that callers (and the
// CLI) can report the exact violated rule.
enum class ErrorCode {
  kStructural,        // dangling arc endpoint, self loop, dimension mismatch
  kInvalidValue,      // a value violates a domain invariant (negative, NaN)
  kMissingField,      // required key absent from a scenario document
  kUnknownKey,        // key not part of the schema
  kTypeMismatch,      // key present with the wrong JSON type
  kParse,             // malformed document
  kIo,                // file could not be opened or written
  kPrecondition,      // operation called outside its domain
  kSolver,            // numerical failure inside the LP engine
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tokenflow

#endif  // TOKENFLOW_ERROR_H_
