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

#include "curi/grammar.h"

#include <algorithm>
#include <limits>
#include <utility>

#include "curi/errors.h"

namespace curi {
namespace {

constexpr std::array<std::string_view, kNumNonterminals> kNames = {
    "START", "BOOL", "NUM",  "SETFC", "SETFSH", "SETFM", "SETFSI",
    "SETFL", "C",    "SH",   "M",     "SI",     "L",     "FC",
    "FSH",   "FM",   "FSI",  "FL",    "OBJECT", "SET"};

Symbol N(Nonterminal nt) { return Symbol{false, nt, {}}; }
Symbol T(std::string_view token) {
  return Symbol{true, Nonterminal::kStart, std::string(token)};
}

int Index(Nonterminal nt) { return static_cast<int>(nt); }

struct PropertyRow {
  Nonterminal value;   // C, SH, ...
  Nonterminal set_fn;  // SETFC, ...
  Nonterminal fn;      // FC, ...
  std::string_view name;
};

constexpr std::array<PropertyRow, 5> kRows = {{
    {Nonterminal::kC, Nonterminal::kSetFC, Nonterminal::kFC, "C"},
    {Nonterminal::kSH, Nonterminal::kSetFSH, Nonterminal::kFSH, "SH"},
    {Nonterminal::kM, Nonterminal::kSetFM, Nonterminal::kFM, "M"},
    {Nonterminal::kSI, Nonterminal::kSetFSI, Nonterminal::kFSI, "SI"},
    {Nonterminal::kL, Nonterminal::kSetFL, Nonterminal::kFL, "L"},
}};

Production MakeBool() {
  Production p{Nonterminal::kBool, {}};
  using NT = Nonterminal;
  p.alternatives.push_back({"and", {N(NT::kBool), N(NT::kBool), T("and")}, 1.0});
  p.alternatives.push_back({"or", {N(NT::kBool), N(NT::kBool), T("or")}, 0.5});
  p.alternatives.push_back({"not", {N(NT::kBool), T("not")}, 1.0});
  for (const auto& r : kRows) {
    std::string n(r.name);
    p.alternatives.push_back({n + "=", {N(r.value), N(r.value), T("=")}, 1.0});
  }
  p.alternatives.push_back({"NUM=", {N(NT::kNum), N(NT::kNum), T("=")}, 1.0});
  p.alternatives.push_back({"SI>", {N(NT::kSI), N(NT::kSI), T(">")}, 1.0});
  p.alternatives.push_back({"L>", {N(NT::kL), N(NT::kL), T(">")}, 1.0});
  p.alternatives.push_back({"NUM>", {N(NT::kNum), N(NT::kNum), T(">")}, 1.0});
  for (std::string_view op : {"all", "any"}) {
    for (const auto& r : kRows) {
      p.alternatives.push_back({std::string(r.name) + "-" + std::string(op),
                                {N(r.set_fn), N(r.value), T(op)},
                                1.0});
    }
  }
  return p;
}

Production MakeNum() {
  Production p{Nonterminal::kNum, {}};
  for (const auto& r : kRows) {
    p.alternatives.push_back({std::string(r.name) + "-count",
                              {N(r.set_fn), N(r.value), T("count=")},
                              1.0});
  }
  for (std::string_view lit : {"1", "2", "3"}) {
    p.alternatives.push_back({std::string(lit), {T(lit)}, 1.0});
  }
  return p;
}

template <std::size_t K>
Production MakeValue(Nonterminal nt, Nonterminal fn,
                     const std::array<std::string_view, K>& constants) {
  Production p{nt, {}};
  for (std::string_view c : constants) {
    p.alternatives.push_back({std::string(c), {T(c)}, 1.0});
  }
  p.alternatives.push_back({"object", {N(Nonterminal::kObject), N(fn)}, 1.0});
  return p;
}

Production MakeSingle(Nonterminal nt, std::string label, std::vector<Symbol> rhs) {
  Production p{nt, {}};
  p.alternatives.push_back({std::move(label), std::move(rhs), 1.0});
  return p;
}

Production* Find(std::vector<Production>& table, std::string_view name) {
  for (auto& p : table) {
    if (NonterminalName(p.lhs) == name) return &p;
  }
  return nullptr;
}

}  // namespace

std::string_view NonterminalName(Nonterminal nt) { return kNames[Index(nt)]; }

GrammarConfig GrammarConfig::Default() {
  using NT = Nonterminal;
  GrammarConfig c;
  std::vector<Production> t(kNumNonterminals);
  t[Index(NT::kStart)] = Production{
      NT::kStart,
      {{"exists=", {N(NT::kBool), T("exists=")}, 1.0},
       {"for-all=", {N(NT::kBool), T("for-all=")}, 1.0}}};
  t[Index(NT::kBool)] = MakeBool();
  t[Index(NT::kNum)] = MakeNum();
  for (const auto& r : kRows) {
    t[Index(r.set_fn)] = MakeSingle(r.set_fn, "SET-" + std::string(NonterminalName(r.fn)),
                                    {N(NT::kSet), N(r.fn)});
  }
  t[Index(NT::kC)] = MakeValue(NT::kC, NT::kFC, kColorNames);
  t[Index(NT::kSH)] = MakeValue(NT::kSH, NT::kFSH, kShapeNames);
  t[Index(NT::kM)] = MakeValue(NT::kM, NT::kFM, kMaterialNames);
  t[Index(NT::kSI)] = MakeValue(NT::kSI, NT::kFSI, kSizeNames);
  t[Index(NT::kL)] = MakeValue(
      NT::kL, NT::kFL,
      std::array<std::string_view, 8>{"1", "2", "3", "4", "5", "6", "7", "8"});
  t[Index(NT::kFC)] = MakeSingle(NT::kFC, "color?", {T("color?")});
  t[Index(NT::kFSH)] = MakeSingle(NT::kFSH, "shape?", {T("shape?")});
  t[Index(NT::kFM)] = MakeSingle(NT::kFM, "material?", {T("material?")});
  t[Index(NT::kFSI)] = MakeSingle(NT::kFSI, "size?", {T("size?")});
  t[Index(NT::kFL)] = Production{
      NT::kFL,
      {{"locationX?", {T("locationX?")}, 1.0},
       {"locationY?", {T("locationY?")}, 1.0}}};
  t[Index(NT::kObject)] = MakeSingle(NT::kObject, "x", {T("x")});
  t[Index(NT::kSet)] = Production{
      NT::kSet, {{"S", {T("S")}, 1.0}, {"S_{-x}", {T("S_{-x}")}, 1.0}}};
  c.productions = std::move(t);
  return c;
}

void GrammarConfig::SetWeight(std::string_view nonterminal,
                              std::string_view label, double weight) {
  if (!(weight > 0.0) || weight == std::numeric_limits<double>::infinity()) {
    throw Error(ErrorCode::kInvalidConfig, "grammar weights must be positive");
  }
  Production* p = Find(productions, nonterminal);
  if (p == nullptr) {
    throw Error(ErrorCode::kInvalidConfig,
                "unknown nonterminal: " + std::string(nonterminal));
  }
  for (auto& a : p->alternatives) {
    if (a.label == label) {
      a.weight = weight;
      return;
    }
  }
  throw Error(ErrorCode::kInvalidConfig,
              "unknown alternative " + std::string(label) + " of " +
                  std::string(nonterminal));
}

double GrammarConfig::Probability(Nonterminal nt, std::string_view label) const {
  const Production& p = productions.at(Index(nt));
  double total = 0.0;
  double mine = 0.0;
  for (const auto& a : p.alternatives) {
    total += a.weight;
    if (a.label == label) mine = a.weight;
  }
  return total > 0 ? mine / total : 0.0;
}

std::vector<std::pair<std::string, double>> GrammarConfig::NormalizedTable() const {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& p : productions) {
    for (const auto& a : p.alternatives) {
      out.emplace_back(std::string(NonterminalName(p.lhs)) + "." + a.label,
                       Probability(p.lhs, a.label));
    }
  }
  return out;
}

int MinHeight(const GrammarConfig& config, Nonterminal nt) {
  constexpr int kInf = std::numeric_limits<int>::max() / 2;
  std::array<int, kNumNonterminals> h;
  h.fill(kInf);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : config.productions) {
      for (const auto& a : p.alternatives) {
        int need = 0;
        for (const auto& s : a.rhs) {
          if (!s.terminal) need = std::max(need, h[Index(s.nonterminal)]);
        }
        if (need < kInf && need + 1 < h[Index(p.lhs)]) {
          h[Index(p.lhs)] = need + 1;
          changed = true;
        }
      }
    }
  }
  return h[Index(nt)];
}

void GrammarConfig::Validate() const {
  if (productions.size() != static_cast<std::size_t>(kNumNonterminals)) {
    throw Error(ErrorCode::kInvalidConfig, "incomplete production table");
  }
  for (const auto& p : productions) {
    if (p.alternatives.empty()) {
      throw Error(ErrorCode::kInvalidConfig,
                  "no alternatives for " + std::string(NonterminalName(p.lhs)));
    }
    for (const auto& a : p.alternatives) {
      if (!(a.weight > 0.0)) {
        throw Error(ErrorCode::kInvalidConfig,
                    "non-positive weight for " +
                        std::string(NonterminalName(p.lhs)) + "." + a.label);
      }
    }
  }
  const int need = MinHeight(*this, Nonterminal::kStart);
  if (max_depth < need) {
    throw Error(ErrorCode::kInvalidConfig,
                "max depth " + std::to_string(max_depth) +
                    " cannot complete a derivation (minimum " +
                    std::to_string(need) + ")");
  }
}

ConceptSampler::ConceptSampler(GrammarConfig config) : config_(std::move(config)) {
  config_.Validate();
  for (int i = 0; i < kNumNonterminals; ++i) {
    min_height_[i] = MinHeight(config_, static_cast<Nonterminal>(i));
  }
}

void ConceptSampler::Expand(Nonterminal nt, int depth, Rng& rng,
                            Derivation& out) const {
  out.depth = std::max(out.depth, depth);
  const Production& p = config_.productions[Index(nt)];
  // Only alternatives whose children can still terminate within the bound.
  std::vector<double> weights(p.alternatives.size(), 0.0);
  bool any = false;
  for (std::size_t i = 0; i < p.alternatives.size(); ++i) {
    bool fits = true;
    for (const auto& s : p.alternatives[i].rhs) {
      if (!s.terminal && depth + min_height_[Index(s.nonterminal)] > config_.max_depth) {
        fits = false;
        break;
      }
    }
    if (fits) {
      weights[i] = p.alternatives[i].weight;
      any = true;
    }
  }
  if (!any) {
    // Unreachable after Validate(): the parent only picks fitting children.
    throw Error(ErrorCode::kInvalidConfig,
                "no terminating expansion for " + std::string(NonterminalName(nt)));
  }
  const Alternative& alt = p.alternatives[rng.Weighted(weights)];
  for (const auto& s : alt.rhs) {
    if (s.terminal) {
      out.tokens.push_back(s.token);
    } else {
      Expand(s.nonterminal, depth + 1, rng, out);
    }
  }
}

Derivation ConceptSampler::SampleDerivation(Rng& rng) const {
  Derivation d;
  Expand(Nonterminal::kStart, 1, rng, d);
  return d;
}

Concept ConceptSampler::Sample(Rng& rng) const {
  Derivation d = SampleDerivation(rng);
  return ParsePostfix(std::span<const std::string>(d.tokens));
}

Concept SampleConcept(const GrammarConfig& config, Rng& rng) {
  return ConceptSampler(config).Sample(rng);
}

}  // namespace curi
