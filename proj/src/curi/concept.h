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

#ifndef CURI_CONCEPT_H_
#define CURI_CONCEPT_H_

// Typed expression trees for concepts and their postfix token form.
//
// A concept is a quantifier over the objects x of a scene S with a boolean
// body. Inside the body, property accessors apply either to the bound object
// x (yielding a scalar) or to one of the sets S and S_{-x} (yielding the
// multiset of member properties, consumed only by all/any/count=).

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "curi/vocab.h"

namespace curi {

enum class Quantifier : std::uint8_t { kExists, kForAll };

// Which object set a set accessor ranges over.
enum class SetRef : std::uint8_t {
  kScene,         // S
  kOthers,        // S_{-x}
};

enum class Op : std::uint8_t {
  kAnd,
  kOr,
  kNot,
  kEq,
  kGt,
  kAll,             // args: [set accessor, value]
  kAny,             // args: [set accessor, value]
  kCountEq,         // args: [set accessor, value]; integer-valued
  kObjectProperty,  // property of x
  kSetProperty,     // property over S or S_{-x}
  kConstant,
};

struct Expr {
  Op op = Op::kConstant;
  Property property = Property::kColor;  // kObjectProperty, kSetProperty
  SetRef set = SetRef::kScene;           // kSetProperty
  ValueType type = ValueType::kColor;    // kConstant
  int value = 0;                         // kConstant
  std::vector<Expr> args;

  friend bool operator==(const Expr&, const Expr&) = default;
};

struct Concept {
  Quantifier quantifier = Quantifier::kExists;
  Expr body;

  friend bool operator==(const Concept&, const Concept&) = default;
};

// Constructors that fill in the canonical field values for each node kind.
// Structural equality relies on every tree being built through these.
namespace ast {
Expr And(Expr a, Expr b);
Expr Or(Expr a, Expr b);
Expr Not(Expr a);
Expr Eq(Expr a, Expr b);
Expr Gt(Expr a, Expr b);
Expr All(Expr set, Expr value);
Expr Any(Expr set, Expr value);
Expr CountEq(Expr set, Expr value);
Expr Of(Property p);                     // p(x)
Expr OfSet(Property p, SetRef set);      // p(S) or p(S_{-x})
Expr Constant(ValueType type, int value);
Expr Color(std::string_view name);
Expr Shape(std::string_view name);
Expr Material(std::string_view name);
Expr Size(std::string_view name);
Expr Int(int value);
Concept Exists(Expr body);
Concept ForAll(Expr body);
}  // namespace ast

using TokenString = std::vector<std::string>;

TokenString SerializePostfix(const Concept& c);
std::string JoinTokens(const TokenString& tokens);
TokenString SplitTokens(std::string_view text);

// Stack-based typed parse. Throws Error with kUnknownToken, kStackUnderflow,
// kTypeMismatch or kTrailingOperands.
Concept ParsePostfix(std::span<const std::string> tokens);
Concept ParsePostfix(std::string_view text);

// Number of tokens in the postfix serialization.
int ConceptLength(const Concept& c);

// Infix rendering for display, e.g.
//   exists x in S =(2, count=(color?(S-x), cyan))
std::string PrettyPrint(const Concept& c);

// Throws kTypeMismatch if the tree is not well typed.
void CheckWellTyped(const Concept& c);

// Visits every node of the body in pre-order.
template <typename Fn>
void VisitExprs(const Expr& e, Fn&& fn) {
  fn(e);
  for (const Expr& a : e.args) VisitExprs(a, fn);
}

}  // namespace curi

#endif  // CURI_CONCEPT_H_
