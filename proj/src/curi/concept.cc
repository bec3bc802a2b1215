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

#include "curi/concept.h"

#include <optional>
#include <sstream>
#include <utility>

#include "curi/errors.h"

namespace curi {
namespace ast {
namespace {

Expr Node(Op op, std::vector<Expr> args) {
  Expr e;
  e.op = op;
  e.args = std::move(args);
  return e;
}

Expr Named(ValueType type, std::string_view name) {
  auto c = CategoricalFromToken(name);
  if (!c || c->type != type) {
    throw Error(ErrorCode::kInvalidArgument,
                "not a constant of the requested type: " + std::string(name));
  }
  return Constant(type, c->value);
}

}  // namespace

Expr And(Expr a, Expr b) { return Node(Op::kAnd, {std::move(a), std::move(b)}); }
Expr Or(Expr a, Expr b) { return Node(Op::kOr, {std::move(a), std::move(b)}); }
Expr Not(Expr a) { return Node(Op::kNot, {std::move(a)}); }
Expr Eq(Expr a, Expr b) { return Node(Op::kEq, {std::move(a), std::move(b)}); }
Expr Gt(Expr a, Expr b) { return Node(Op::kGt, {std::move(a), std::move(b)}); }
Expr All(Expr set, Expr value) {
  return Node(Op::kAll, {std::move(set), std::move(value)});
}
Expr Any(Expr set, Expr value) {
  return Node(Op::kAny, {std::move(set), std::move(value)});
}
Expr CountEq(Expr set, Expr value) {
  return Node(Op::kCountEq, {std::move(set), std::move(value)});
}

Expr Of(Property p) {
  Expr e;
  e.op = Op::kObjectProperty;
  e.property = p;
  return e;
}

Expr OfSet(Property p, SetRef set) {
  Expr e;
  e.op = Op::kSetProperty;
  e.property = p;
  e.set = set;
  return e;
}

Expr Constant(ValueType type, int value) {
  Expr e;
  e.op = Op::kConstant;
  // Location and number literals share one canonical integer type.
  e.type = (type == ValueType::kLocation || type == ValueType::kNumber)
               ? ValueType::kInteger
               : type;
  e.value = value;
  return e;
}

Expr Color(std::string_view name) { return Named(ValueType::kColor, name); }
Expr Shape(std::string_view name) { return Named(ValueType::kShape, name); }
Expr Material(std::string_view name) {
  return Named(ValueType::kMaterial, name);
}
Expr Size(std::string_view name) { return Named(ValueType::kSize, name); }
Expr Int(int value) { return Constant(ValueType::kInteger, value); }

Concept Exists(Expr body) { return Concept{Quantifier::kExists, std::move(body)}; }
Concept ForAll(Expr body) { return Concept{Quantifier::kForAll, std::move(body)}; }

}  // namespace ast

namespace {

std::optional<ValueType> Unify(ValueType a, ValueType b) {
  if (a == b) return a;
  auto integral = [](ValueType t) {
    return t == ValueType::kLocation || t == ValueType::kNumber;
  };
  if (a == ValueType::kInteger && integral(b)) return b;
  if (b == ValueType::kInteger && integral(a)) return a;
  return std::nullopt;
}

bool IsOrdinal(ValueType t) {
  return t == ValueType::kSize || t == ValueType::kLocation ||
         t == ValueType::kNumber || t == ValueType::kInteger;
}

std::string_view OpToken(Op op) {
  switch (op) {
    case Op::kAnd: return token::kAnd;
    case Op::kOr: return token::kOr;
    case Op::kNot: return token::kNot;
    case Op::kEq: return token::kEq;
    case Op::kGt: return token::kGt;
    case Op::kAll: return token::kAll;
    case Op::kAny: return token::kAny;
    case Op::kCountEq: return token::kCountEq;
    default: return "";
  }
}

std::string_view SetToken(SetRef s) {
  return s == SetRef::kScene ? token::kSet : token::kSetMinusObject;
}

void Emit(const Expr& e, TokenString& out) {
  switch (e.op) {
    case Op::kObjectProperty:
      out.emplace_back(token::kObject);
      out.emplace_back(PropertyToken(e.property));
      return;
    case Op::kSetProperty:
      out.emplace_back(SetToken(e.set));
      out.emplace_back(PropertyToken(e.property));
      return;
    case Op::kConstant:
      out.push_back(ValueToken(e.type, e.value));
      return;
    default:
      for (const Expr& a : e.args) Emit(a, out);
      out.emplace_back(OpToken(e.op));
  }
}

int CountTokens(const Expr& e) {
  switch (e.op) {
    case Op::kObjectProperty:
    case Op::kSetProperty: return 2;
    case Op::kConstant: return 1;
    default: break;
  }
  int n = 1;
  for (const Expr& a : e.args) n += CountTokens(a);
  return n;
}

// ---------------------------------------------------------------------------
// Parser

struct Item {
  enum class Kind { kObjectVar, kSetVar, kValue, kSetValues, kBool, kConcept };
  Kind kind;
  SetRef set = SetRef::kScene;          // kSetVar
  ValueType type = ValueType::kColor;   // kValue, kSetValues
  Expr expr;
  Quantifier quantifier = Quantifier::kExists;  // kConcept
};

class Parser {
 public:
  explicit Parser(std::span<const std::string> tokens) : tokens_(tokens) {}

  Concept Run() {
    for (pos_ = 0; pos_ < tokens_.size(); ++pos_) Step(tokens_[pos_]);
    if (stack_.empty()) Fail(ErrorCode::kStackUnderflow, "empty expression");
    if (stack_.size() > 1) {
      Fail(ErrorCode::kTrailingOperands,
           std::to_string(stack_.size()) + " items left on the stack");
    }
    Item& top = stack_.back();
    if (top.kind != Item::Kind::kConcept) {
      Fail(ErrorCode::kTypeMismatch, "expression is not quantified");
    }
    return Concept{top.quantifier, std::move(top.expr)};
  }

 private:
  [[noreturn]] void Fail(ErrorCode code, const std::string& what) const {
    std::ostringstream msg;
    msg << what << " (token " << pos_;
    if (pos_ < tokens_.size()) msg << " '" << tokens_[pos_] << "'";
    msg << ")";
    throw Error(code, msg.str());
  }

  void Need(std::size_t n) const {
    if (stack_.size() < n) {
      Fail(ErrorCode::kStackUnderflow, "operator lacks operands");
    }
  }

  Item Pop() {
    Item it = std::move(stack_.back());
    stack_.pop_back();
    return it;
  }

  void PushValue(ValueType type, Expr e) {
    stack_.push_back(Item{Item::Kind::kValue, SetRef::kScene, type, std::move(e)});
  }

  void PushBool(Expr e) {
    stack_.push_back(Item{Item::Kind::kBool, SetRef::kScene, ValueType::kColor,
                          std::move(e)});
  }

  void Step(const std::string& t) {
    if (t == token::kObject) {
      stack_.push_back(Item{Item::Kind::kObjectVar, SetRef::kScene, ValueType::kColor, {}});
    } else if (t == token::kSet || t == token::kSetMinusObject) {
      const SetRef set = t == token::kSet ? SetRef::kScene : SetRef::kOthers;
      stack_.push_back(Item{Item::Kind::kSetVar, set, ValueType::kColor, {}});
    } else if (auto p = PropertyFromToken(t)) {
      Accessor(*p);
    } else if (auto c = CategoricalFromToken(t)) {
      PushValue(c->type, ast::Constant(c->type, c->value));
    } else if (t.size() == 1 && t[0] >= '0' + kMinIntegerLiteral &&
               t[0] <= '0' + kMaxIntegerLiteral) {
      PushValue(ValueType::kInteger, ast::Int(t[0] - '0'));
    } else if (t == token::kEq || t == token::kGt) {
      Comparison(t == token::kEq ? Op::kEq : Op::kGt);
    } else if (t == token::kAll || t == token::kAny || t == token::kCountEq) {
      SetPredicate(t == token::kAll   ? Op::kAll
                   : t == token::kAny ? Op::kAny
                                      : Op::kCountEq);
    } else if (t == token::kAnd || t == token::kOr) {
      Need(2);
      Item b = Pop();
      Item a = Pop();
      if (a.kind != Item::Kind::kBool || b.kind != Item::Kind::kBool) {
        Fail(ErrorCode::kTypeMismatch, "boolean operands expected");
      }
      PushBool(t == token::kAnd ? ast::And(std::move(a.expr), std::move(b.expr))
                                : ast::Or(std::move(a.expr), std::move(b.expr)));
    } else if (t == token::kNot) {
      Need(1);
      Item a = Pop();
      if (a.kind != Item::Kind::kBool) {
        Fail(ErrorCode::kTypeMismatch, "boolean operand expected");
      }
      PushBool(ast::Not(std::move(a.expr)));
    } else if (t == token::kExists || t == token::kForAll) {
      Need(1);
      Item a = Pop();
      if (a.kind != Item::Kind::kBool) {
        Fail(ErrorCode::kTypeMismatch, "quantifier body must be boolean");
      }
      Item q{Item::Kind::kConcept, SetRef::kScene, ValueType::kColor, {}};
      q.expr = std::move(a.expr);
      q.quantifier = t == token::kExists ? Quantifier::kExists : Quantifier::kForAll;
      stack_.push_back(std::move(q));
    } else {
      Fail(ErrorCode::kUnknownToken, "unknown token");
    }
  }

  void Accessor(Property p) {
    Need(1);
    Item a = Pop();
    if (a.kind == Item::Kind::kObjectVar) {
      PushValue(PropertyType(p), ast::Of(p));
    } else if (a.kind == Item::Kind::kSetVar) {
      Item s{Item::Kind::kSetValues, a.set, PropertyType(p), ast::OfSet(p, a.set)};
      stack_.push_back(std::move(s));
    } else {
      Fail(ErrorCode::kTypeMismatch, "accessor needs x, S or S_{-x}");
    }
  }

  void Comparison(Op op) {
    Need(2);
    Item b = Pop();
    Item a = Pop();
    if (a.kind != Item::Kind::kValue || b.kind != Item::Kind::kValue) {
      Fail(ErrorCode::kTypeMismatch, "comparison needs scalar operands");
    }
    auto t = Unify(a.type, b.type);
    if (!t) Fail(ErrorCode::kTypeMismatch, "comparison of different types");
    if (op == Op::kGt && !IsOrdinal(*t)) {
      Fail(ErrorCode::kTypeMismatch, "'>' needs ordinal operands");
    }
    PushBool(op == Op::kEq ? ast::Eq(std::move(a.expr), std::move(b.expr))
                           : ast::Gt(std::move(a.expr), std::move(b.expr)));
  }

  void SetPredicate(Op op) {
    Need(2);
    Item v = Pop();
    Item s = Pop();
    if (s.kind != Item::Kind::kSetValues || v.kind != Item::Kind::kValue) {
      Fail(ErrorCode::kTypeMismatch, "set predicate needs (set, value)");
    }
    auto t = Unify(s.type, v.type);
    if (!t || *t != s.type) {
      Fail(ErrorCode::kTypeMismatch, "value type differs from set element type");
    }
    switch (op) {
      case Op::kAll:
        PushBool(ast::All(std::move(s.expr), std::move(v.expr)));
        break;
      case Op::kAny:
        PushBool(ast::Any(std::move(s.expr), std::move(v.expr)));
        break;
      default:
        PushValue(ValueType::kNumber,
                  ast::CountEq(std::move(s.expr), std::move(v.expr)));
    }
  }

  std::span<const std::string> tokens_;
  std::size_t pos_ = 0;
  std::vector<Item> stack_;
};

// ---------------------------------------------------------------------------
// Recursive type checker (independent of the parser).

enum class Form { kBool, kValue, kSetValues };
struct Typed {
  Form form;
  ValueType type = ValueType::kColor;
};

[[noreturn]] void TypeFail(const std::string& what) {
  throw Error(ErrorCode::kTypeMismatch, what);
}

Typed TypeOf(const Expr& e) {
  auto arity = [&](std::size_t n) {
    if (e.args.size() != n) TypeFail("wrong number of operands");
  };
  switch (e.op) {
    case Op::kAnd:
    case Op::kOr:
      arity(2);
      if (TypeOf(e.args[0]).form != Form::kBool ||
          TypeOf(e.args[1]).form != Form::kBool) {
        TypeFail("boolean operands expected");
      }
      return {Form::kBool};
    case Op::kNot:
      arity(1);
      if (TypeOf(e.args[0]).form != Form::kBool) TypeFail("boolean expected");
      return {Form::kBool};
    case Op::kEq:
    case Op::kGt: {
      arity(2);
      Typed a = TypeOf(e.args[0]);
      Typed b = TypeOf(e.args[1]);
      if (a.form != Form::kValue || b.form != Form::kValue) {
        TypeFail("comparison needs scalars");
      }
      auto t = Unify(a.type, b.type);
      if (!t || (e.op == Op::kGt && !IsOrdinal(*t))) TypeFail("bad comparison");
      return {Form::kBool};
    }
    case Op::kAll:
    case Op::kAny:
    case Op::kCountEq: {
      arity(2);
      Typed s = TypeOf(e.args[0]);
      Typed v = TypeOf(e.args[1]);
      if (s.form != Form::kSetValues || v.form != Form::kValue) {
        TypeFail("set predicate needs (set, value)");
      }
      auto t = Unify(s.type, v.type);
      if (!t || *t != s.type) TypeFail("set element type mismatch");
      return e.op == Op::kCountEq ? Typed{Form::kValue, ValueType::kNumber}
                                  : Typed{Form::kBool};
    }
    case Op::kObjectProperty:
      arity(0);
      return {Form::kValue, PropertyType(e.property)};
    case Op::kSetProperty:
      arity(0);
      return {Form::kSetValues, PropertyType(e.property)};
    case Op::kConstant: {
      arity(0);
      bool ok = false;
      switch (e.type) {
        case ValueType::kColor:
        case ValueType::kShape:
        case ValueType::kMaterial:
        case ValueType::kSize: {
          Property p = e.type == ValueType::kColor   ? Property::kColor
                       : e.type == ValueType::kShape ? Property::kShape
                       : e.type == ValueType::kMaterial ? Property::kMaterial
                                                        : Property::kSize;
          ok = e.value >= 0 && e.value < PropertyDomainSize(p);
          break;
        }
        case ValueType::kInteger:
          ok = e.value >= kMinIntegerLiteral && e.value <= kMaxIntegerLiteral;
          break;
        default:
          ok = false;  // literals are always canonical kInteger
      }
      if (!ok) TypeFail("constant out of domain");
      return {Form::kValue, e.type};
    }
  }
  TypeFail("unknown node");
}

void Pretty(const Expr& e, std::string& out) {
  switch (e.op) {
    case Op::kObjectProperty:
      out += PropertyToken(e.property);
      out += "(x)";
      return;
    case Op::kSetProperty:
      out += PropertyToken(e.property);
      out += e.set == SetRef::kScene ? "(S)" : "(S-x)";
      return;
    case Op::kConstant:
      out += ValueToken(e.type, e.value);
      return;
    default:
      break;
  }
  out += OpToken(e.op);
  out += '(';
  for (std::size_t i = 0; i < e.args.size(); ++i) {
    if (i > 0) out += ", ";
    Pretty(e.args[i], out);
  }
  out += ')';
}

}  // namespace

TokenString SerializePostfix(const Concept& c) {
  TokenString out;
  out.reserve(ConceptLength(c));
  Emit(c.body, out);
  out.emplace_back(c.quantifier == Quantifier::kExists ? token::kExists
                                                       : token::kForAll);
  return out;
}

std::string JoinTokens(const TokenString& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

TokenString SplitTokens(std::string_view text) {
  TokenString out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' ||
                               text[i] == '\n' || text[i] == '\r')) {
      ++i;
    }
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '\t' &&
           text[j] != '\n' && text[j] != '\r') {
      ++j;
    }
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

Concept ParsePostfix(std::span<const std::string> tokens) {
  return Parser(tokens).Run();
}

Concept ParsePostfix(std::string_view text) {
  TokenString tokens = SplitTokens(text);
  return ParsePostfix(std::span<const std::string>(tokens));
}

int ConceptLength(const Concept& c) { return CountTokens(c.body) + 1; }

std::string PrettyPrint(const Concept& c) {
  std::string out = c.quantifier == Quantifier::kExists ? "exists x in S "
                                                        : "for-all x in S ";
  Pretty(c.body, out);
  return out;
}

void CheckWellTyped(const Concept& c) {
  if (TypeOf(c.body).form != Form::kBool) {
    TypeFail("quantifier body must be boolean");
  }
}

}  // namespace curi
