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

#include "talent/error.h"

namespace talent {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kDanglingReference: return "dangling_reference";
    case ErrorCode::kDuplicateId: return "duplicate_id";
    case ErrorCode::kMissingFile: return "missing_file";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kDecode: return "decode_error";
    case ErrorCode::kCorrupt: return "corrupt_entry";
    case ErrorCode::kRetryable: return "retryable";
    case ErrorCode::kRetriesExhausted: return "retries_exhausted";
    case ErrorCode::kUpstream: return "upstream_error";
    case ErrorCode::kReplayMiss: return "replay_miss";
    case ErrorCode::kPrecondition: return "precondition_failed";
    case ErrorCode::kEmptyCompletion: return "empty_completion";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kRankDeficient: return "rank_deficient";
    case ErrorCode::kEmptyEvaluation: return "empty_evaluation";
  }
  return "unknown";
}

}  // namespace talent
