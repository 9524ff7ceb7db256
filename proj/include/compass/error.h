// Copyright 2026 The Compass Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef COMPASS_ERROR_H_
#define COMPASS_ERROR_H_

#include <stdexcept>
#include <string>

namespace compass {

// Broad error classes. The CLI maps them onto exit codes and the service onto
// HTTP statuses.
enum class ErrorCode {
  kInvalidInput,  // malformed or inconsistent artifact
  kNotFound,      // unknown session/compartment/function
  kConflict,      // action not applicable in the current state
  kInternal,      // broken invariant
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void ThrowInvalid(const std::string &message) {
  throw Error(ErrorCode::kInvalidInput, message);
}

[[noreturn]] inline void ThrowNotFound(const std::string &message) {
  throw Error(ErrorCode::kNotFound, message);
}

}  // namespace compass

#endif  // COMPASS_ERROR_H_
