// Copyright 2026 The detectkit Authors.
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

#ifndef DETECTKIT_ERROR_H_
#define DETECTKIT_ERROR_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace detectkit {

// Error classes surfaced to callers. The CLI prints ErrorCodeName() as the
// machine-parsable prefix of its one-line failure message.
enum class ErrorCode {
  kInvalidArgument,
  kNotFound,
  kParse,
  kInsufficientTokens,
  kUndefined,
  kExternal,
  kRateLimited,
  kTimeout,
  kIo,
  kMissingInputs,
  kInvalidConfig,
};

std::string_view ErrorCodeName(ErrorCode code);

// Inverse of ErrorCodeName.
std::optional<ErrorCode> ErrorCodeFromName(std::string_view name);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace detectkit

#endif  // DETECTKIT_ERROR_H_
