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

#ifndef CURI_ERRORS_H_
#define CURI_ERRORS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace curi {

// Numeric values are part of the C API (see include/curi/curi.h) and must not
// be renumbered.
enum class ErrorCode : int {
  kUnknownToken = 1,
  kStackUnderflow = 2,
  kTypeMismatch = 3,
  kTrailingOperands = 4,
  kInvalidConfig = 5,
  kInfeasibleRange = 6,
  kEmptyPool = 7,
  kEmptySpace = 8,
  kDegenerateSplit = 9,
  kInsufficientPositives = 10,
  kInsufficientScenes = 11,
  kEmptyHypothesisSet = 12,
  kSingleClass = 13,
  kNoPositives = 14,
  kMismatchedEpisodes = 15,
  kIo = 16,
  kDigestMismatch = 17,
  kMissingArtifact = 18,
  kInvalidArgument = 19,
};

std::string_view ErrorCodeName(ErrorCode code);

// All recoverable failures in the core library are reported by throwing
// Error. The C API translates them into status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace curi

#endif  // CURI_ERRORS_H_
