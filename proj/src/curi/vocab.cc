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

#include "curi/vocab.h"

#include <algorithm>

namespace curi {
namespace {

template <std::size_t N>
std::optional<int> IndexOf(const std::array<std::string_view, N>& names,
                           std::string_view name) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<int>(it - names.begin());
}

}  // namespace

ValueType PropertyType(Property p) {
  switch (p) {
    case Property::kColor: return ValueType::kColor;
    case Property::kShape: return ValueType::kShape;
    case Property::kMaterial: return ValueType::kMaterial;
    case Property::kSize: return ValueType::kSize;
    case Property::kLocationX:
    case Property::kLocationY: return ValueType::kLocation;
  }
  return ValueType::kColor;
}

std::string_view PropertyToken(Property p) {
  switch (p) {
    case Property::kColor: return "color?";
    case Property::kShape: return "shape?";
    case Property::kMaterial: return "material?";
    case Property::kSize: return "size?";
    case Property::kLocationX: return "locationX?";
    case Property::kLocationY: return "locationY?";
  }
  return "";
}

std::optional<Property> PropertyFromToken(std::string_view token) {
  for (Property p : kAllProperties) {
    if (PropertyToken(p) == token) return p;
  }
  return std::nullopt;
}

std::string_view PropertyJsonKey(Property p) {
  switch (p) {
    case Property::kColor: return "color";
    case Property::kShape: return "shape";
    case Property::kMaterial: return "material";
    case Property::kSize: return "size";
    case Property::kLocationX: return "locx";
    case Property::kLocationY: return "locy";
  }
  return "";
}

int PropertyDomainSize(Property p) {
  switch (p) {
    case Property::kColor: return static_cast<int>(kColorNames.size());
    case Property::kShape: return static_cast<int>(kShapeNames.size());
    case Property::kMaterial: return static_cast<int>(kMaterialNames.size());
    case Property::kSize: return static_cast<int>(kSizeNames.size());
    case Property::kLocationX:
    case Property::kLocationY: return kMaxLocation - kMinLocation + 1;
  }
  return 0;
}

int PropertyMinValue(Property p) {
  return PropertyType(p) == ValueType::kLocation ? kMinLocation : 0;
}

std::string ValueToken(ValueType type, int value) {
  switch (type) {
    case ValueType::kColor: return std::string(kColorNames.at(value));
    case ValueType::kShape: return std::string(kShapeNames.at(value));
    case ValueType::kMaterial: return std::string(kMaterialNames.at(value));
    case ValueType::kSize: return std::string(kSizeNames.at(value));
    case ValueType::kLocation:
    case ValueType::kNumber:
    case ValueType::kInteger: return std::to_string(value);
  }
  return {};
}

std::optional<CategoricalConstant> CategoricalFromToken(std::string_view t) {
  if (auto i = IndexOf(kColorNames, t)) return CategoricalConstant{ValueType::kColor, *i};
  if (auto i = IndexOf(kShapeNames, t)) return CategoricalConstant{ValueType::kShape, *i};
  if (auto i = IndexOf(kMaterialNames, t)) return CategoricalConstant{ValueType::kMaterial, *i};
  if (auto i = IndexOf(kSizeNames, t)) return CategoricalConstant{ValueType::kSize, *i};
  return std::nullopt;
}

std::optional<int> PropertyValueFromName(Property p, std::string_view name) {
  switch (p) {
    case Property::kColor: return IndexOf(kColorNames, name);
    case Property::kShape: return IndexOf(kShapeNames, name);
    case Property::kMaterial: return IndexOf(kMaterialNames, name);
    case Property::kSize: return IndexOf(kSizeNames, name);
    case Property::kLocationX:
    case Property::kLocationY: break;
  }
  return std::nullopt;
}

bool IsVocabularyToken(std::string_view t) {
  static constexpr std::array<std::string_view, 13> kFixed = {
      token::kObject, token::kSet,   token::kSetMinusObject, token::kExists,
      token::kForAll, token::kAnd,   token::kOr,             token::kNot,
      token::kEq,     token::kGt,    token::kAll,            token::kAny,
      token::kCountEq};
  if (std::find(kFixed.begin(), kFixed.end(), t) != kFixed.end()) return true;
  if (PropertyFromToken(t) || CategoricalFromToken(t)) return true;
  return t.size() == 1 && t[0] >= '0' + kMinIntegerLiteral &&
         t[0] <= '0' + kMaxIntegerLiteral;
}

}  // namespace curi
