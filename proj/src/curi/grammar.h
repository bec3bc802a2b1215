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

#ifndef CURI_GRAMMAR_H_
#define CURI_GRAMMAR_H_

// Probabilistic context-free grammar over postfix concept strings, with
// depth-bounded sampling.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "curi/concept.h"
#include "curi/rng.h"

namespace curi {

enum class Nonterminal : std::uint8_t {
  kStart, kBool, kNum,
  kSetFC, kSetFSH, kSetFM, kSetFSI, kSetFL,
  kC, kSH, kM, kSI, kL,
  kFC, kFSH, kFM, kFSI, kFL,
  kObject, kSet,
};
inline constexpr int kNumNonterminals = 20;

std::string_view NonterminalName(Nonterminal nt);

struct Symbol {
  bool terminal = true;
  Nonterminal nonterminal = Nonterminal::kStart;  // when !terminal
  std::string token;                              // when terminal
};

struct Alternative {
  std::string label;  // unique within its production, e.g. "or", "C=", "red"
  std::vector<Symbol> rhs;  // postfix order
  double weight = 1.0;      // unnormalized, > 0
};

struct Production {
  Nonterminal lhs;
  std::vector<Alternative> alternatives;
};

struct GrammarConfig {
  std::vector<Production> productions;  // indexed by Nonterminal
  int max_depth = 6;

  // Default table: every alternative has weight 1 except "or", which gets
  // half the weight of "and".
  static GrammarConfig Default();

  // Throws kInvalidConfig for an unknown nonterminal/label or w <= 0.
  void SetWeight(std::string_view nonterminal, std::string_view label,
                 double weight);
  // Normalized probability of an alternative.
  double Probability(Nonterminal nt, std::string_view label) const;
  // "NT.label" -> normalized probability, in table order.
  std::vector<std::pair<std::string, double>> NormalizedTable() const;
  // Throws kInvalidConfig unless weights are positive and max_depth is at
  // least the minimal height of START.
  void Validate() const;
};

// Minimal number of nonterminal levels (including `nt` itself) needed to
// derive a terminal string from `nt`.
int MinHeight(const GrammarConfig& config, Nonterminal nt);

struct Derivation {
  TokenString tokens;
  int depth = 0;  // deepest nonterminal node, START at depth 1
};

class ConceptSampler {
 public:
  explicit ConceptSampler(GrammarConfig config);

  Derivation SampleDerivation(Rng& rng) const;
  Concept Sample(Rng& rng) const;

  const GrammarConfig& config() const { return config_; }

 private:
  void Expand(Nonterminal nt, int depth, Rng& rng, Derivation& out) const;

  GrammarConfig config_;
  std::array<int, kNumNonterminals> min_height_{};
};

Concept SampleConcept(const GrammarConfig& config, Rng& rng);

}  // namespace curi

#endif  // CURI_GRAMMAR_H_
