// Copyright 2026 The TALENT Harness Authors
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

#ifndef TALENT_ERROR_H_
#define TALENT_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace talent {

enum class ErrorCode {
  kInvalidArgument,
  kParse,
  kNotFound,
  kDanglingReference,
  kDuplicateId,
  kMissingFile,
  kIo,
  kDecode,
  kCorrupt,
  kRetryable,
  kRetriesExhausted,
  kUpstream,
  kReplayMiss,
  kPrecondition,
  kEmptyCompletion,
  kConflict,
  kRankDeficient,
  kEmptyEvaluation,
};

std::string_view ErrorCodeName(ErrorCode code);

// Base error for everything the harness surfaces. The code is stable and
// machine-readable; the message is meant for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Raised by transports. `status` is the HTTP status when one was received,
// 0 for connection-level failures.
class TransportError : public Error {
 public:
  TransportError(ErrorCode code, int status, const std::string& message)
      : Error(code, message), status_(status) {}

  int status() const { return status_; }
  bool retryable() const { return code() == ErrorCode::kRetryable; }

 private:
  int status_;
};

}  // namespace talent

#endif  // TALENT_ERROR_H_
