// Copyright 2026 The CURI Authors.
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

#include "curi/errors.h"

namespace curi {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownToken: return "UnknownToken";
    case ErrorCode::kStackUnderflow: return "StackUnderflow";
    case ErrorCode::kTypeMismatch: return "TypeMismatch";
    case ErrorCode::kTrailingOperands: return "TrailingOperands";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kInfeasibleRange: return "InfeasibleRange";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kEmptySpace: return "EmptySpace";
    case ErrorCode::kDegenerateSplit: return "DegenerateSplit";
    case ErrorCode::kInsufficientPositives: return "InsufficientPositives";
    case ErrorCode::kInsufficientScenes: return "InsufficientScenes";
    case ErrorCode::kEmptyHypothesisSet: return "EmptyHypothesisSet";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kNoPositives: return "NoPositives";
    case ErrorCode::kMismatchedEpisodes: return "MismatchedEpisodes";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kDigestMismatch: return "DigestMismatch";
    case ErrorCode::kMissingArtifact: return "MissingArtifact";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

}  // namespace curi
