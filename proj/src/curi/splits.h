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

#ifndef CURI_SPLITS_H_
#define CURI_SPLITS_H_

// Train/validation/test partitions of the hypothesis space for the nine
// generalization regimes.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "curi/filter.h"
#include "json.hpp"

namespace curi {

enum class SplitKind : std::uint8_t {
  kInstanceIid,
  kConceptIid,
  kCounting,
  kExtrinsic,
  kIntrinsic,
  kBoolean,
  kComplexity,
  kBindingColor,
  kBindingShape,
};

inline constexpr std::array<SplitKind, 9> kAllSplitKinds = {
    SplitKind::kInstanceIid, SplitKind::kConceptIid,   SplitKind::kCounting,
    SplitKind::kExtrinsic,   SplitKind::kIntrinsic,    SplitKind::kBoolean,
    SplitKind::kComplexity,  SplitKind::kBindingColor, SplitKind::kBindingShape};

std::string_view SplitKindName(SplitKind kind);  // e.g. "binding_color"
// Throws kInvalidArgument for an unknown name.
SplitKind ParseSplitKind(std::string_view name);
// Every split except Instance IID holds out concepts.
bool IsCompositional(SplitKind kind);

struct HoldoutSpec {
  SplitKind kind = SplitKind::kInstanceIid;
  // Token pairs whose co-occurrence sends a concept to test:
  //   Boolean (color, op), Intrinsic (color, material),
  //   Extrinsic (location, color), Counting (number, property value).
  std::vector<std::pair<std::string, std::string>> pairs;
  // Binding splits: any of these tokens sends a concept to test.
  std::vector<std::string> tokens;
  int max_train_length = 10;   // Complexity: length <= this -> train
  double test_fraction = 0.2;  // Concept IID: fraction of synonym clusters
  double val_fraction = 0.1;   // fraction of train clusters carved for val
  std::uint64_t seed = 0;

  static HoldoutSpec Default(SplitKind kind, std::uint64_t seed = 0);
  // Throws kInvalidConfig if a token is outside the grammar vocabulary or a
  // fraction is outside [0, 1).
  void Validate() const;

  nlohmann::ordered_json ToJson() const;
  static HoldoutSpec FromJson(const nlohmann::json& j, SplitKind kind);
};

// (number, value) pairs compared through count=, e.g. =(count=(shape?(S),
// cube), 3) -> ("3", "cube").
std::vector<std::pair<std::string, std::string>> CountingPairs(const Concept& c);

// True if the concept belongs to H_test under a predicate-defined split.
// Not meaningful for Instance IID or Concept IID.
bool MatchesHoldout(const HoldoutSpec& spec, const SpaceConcept& c);

struct SplitAssignment {
  SplitKind kind = SplitKind::kInstanceIid;
  HoldoutSpec spec;
  std::vector<std::uint64_t> train;
  std::vector<std::uint64_t> val;
  std::vector<std::uint64_t> test;

  nlohmann::ordered_json ToJson() const;
  static SplitAssignment FromJson(const nlohmann::json& j);
};

// Throws kDegenerateSplit if train or test ends up empty.
SplitAssignment Assign(const HypothesisSpace& space, const HoldoutSpec& spec);

struct ValidationReport {
  std::vector<std::string> violations;
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;

  bool ok() const { return violations.empty(); }
};

ValidationReport Validate(const SplitAssignment& a, const HypothesisSpace& space);

}  // namespace curi

#endif  // CURI_SPLITS_H_
