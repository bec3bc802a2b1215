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

#ifndef CURI_VOCAB_H_
#define CURI_VOCAB_H_

// Token vocabulary of the concept grammar and the value domains of scene
// object properties.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace curi {

enum class Property : std::uint8_t {
  kColor = 0,
  kShape = 1,
  kMaterial = 2,
  kSize = 3,
  kLocationX = 4,
  kLocationY = 5,
};
inline constexpr int kNumProperties = 6;
inline constexpr std::array<Property, kNumProperties> kAllProperties = {
    Property::kColor,    Property::kShape,     Property::kMaterial,
    Property::kSize,     Property::kLocationX, Property::kLocationY};

// Scalar value types. kInteger is the type of an integer literal: it is
// accepted wherever a location or a number is expected.
enum class ValueType : std::uint8_t {
  kColor,
  kShape,
  kMaterial,
  kSize,
  kLocation,
  kNumber,
  kInteger,
};

inline constexpr std::array<std::string_view, 8> kColorNames = {
    "gray", "red", "blue", "green", "brown", "purple", "cyan", "yellow"};
inline constexpr std::array<std::string_view, 3> kShapeNames = {
    "cube", "sphere", "cylinder"};
inline constexpr std::array<std::string_view, 2> kMaterialNames = {"rubber",
                                                                  "metal"};
// Ordinal: small < large.
inline constexpr std::array<std::string_view, 2> kSizeNames = {"small",
                                                              "large"};
inline constexpr int kMinLocation = 1;
inline constexpr int kMaxLocation = 8;
inline constexpr int kGridCells = 64;
inline constexpr int kMinIntegerLiteral = 1;
inline constexpr int kMaxIntegerLiteral = 8;

namespace token {
inline constexpr std::string_view kObject = "x";
inline constexpr std::string_view kSet = "S";
inline constexpr std::string_view kSetMinusObject = "S_{-x}";
inline constexpr std::string_view kExists = "exists=";
inline constexpr std::string_view kForAll = "for-all=";
inline constexpr std::string_view kAnd = "and";
inline constexpr std::string_view kOr = "or";
inline constexpr std::string_view kNot = "not";
inline constexpr std::string_view kEq = "=";
inline constexpr std::string_view kGt = ">";
inline constexpr std::string_view kAll = "all";
inline constexpr std::string_view kAny = "any";
inline constexpr std::string_view kCountEq = "count=";
}  // namespace token

ValueType PropertyType(Property p);
std::string_view PropertyToken(Property p);
std::optional<Property> PropertyFromToken(std::string_view token);
// Scene JSON key for a property ("color", ..., "locx", "locy").
std::string_view PropertyJsonKey(Property p);

// Number of distinct values a property takes; values are 0-based for the
// categorical properties and 1-based for locations.
int PropertyDomainSize(Property p);
int PropertyMinValue(Property p);

// Spelling of a constant of the given type. Integer-valued types print as
// decimal.
std::string ValueToken(ValueType type, int value);

// Resolves a categorical constant token ("red", "cube", "metal", "large").
struct CategoricalConstant {
  ValueType type;
  int value;
};
std::optional<CategoricalConstant> CategoricalFromToken(std::string_view t);

// Resolves a categorical value name for a given property, e.g. ("color",
// "red") -> 1. Returns nullopt for unknown names.
std::optional<int> PropertyValueFromName(Property p, std::string_view name);

// True for every token the grammar can emit, including integer literals.
bool IsVocabularyToken(std::string_view token);

}  // namespace curi

#endif  // CURI_VOCAB_H_
