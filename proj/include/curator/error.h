// Copyright 2026 The Curator Authors.
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

#ifndef CURATOR_ERROR_H_
#define CURATOR_ERROR_H_

#include <stdexcept>
#include <string>

namespace curator {

enum class ErrorCode {
  kInvalidArgument,  // malformed input, bad rule, validation failures
  kNotFound,         // unknown document, rule, concept, task
  kConflict,         // duplicate id, round already running
  kDataError,        // malformed data file line
  kConfig,           // missing or unreadable configuration / lexicon file
  kUnavailable,      // feedback source or service temporarily unavailable
};

const char* ErrorCodeName(ErrorCode code);

// Single exception type carrying a machine-readable code. The service maps
// codes onto HTTP statuses and the CLI onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline Error InvalidArgument(const std::string& m) {
  return Error(ErrorCode::kInvalidArgument, m);
}
inline Error NotFound(const std::string& m) {
  return Error(ErrorCode::kNotFound, m);
}
inline Error Conflict(const std::string& m) {
  return Error(ErrorCode::kConflict, m);
}
inline Error DataError(const std::string& m) {
  return Error(ErrorCode::kDataError, m);
}
inline Error ConfigError(const std::string& m) {
  return Error(ErrorCode::kConfig, m);
}
inline Error Unavailable(const std::string& m) {
  return Error(ErrorCode::kUnavailable, m);
}

}  // namespace curator

#endif  // CURATOR_ERROR_H_
