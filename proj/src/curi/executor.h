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

#ifndef CURI_EXECUTOR_H_
#define CURI_EXECUTOR_H_

// Concept execution on scenes.
//
// Two independent evaluators share the same semantics:
//  * Evaluate(): a direct tree-walking interpreter over one scene.
//  * CompiledConcept + PoolIndex: postfix bytecode run on an operator stack
//    whose slots are vectors over (scene, binding) lanes of a whole batch of
//    scenes. Used for evaluation signatures over large pools.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curi/bitvector.h"
#include "curi/concept.h"
#include "curi/scene.h"

namespace curi {

bool Evaluate(const Concept& c, const Scene& scene);

// Per-binding body value; exposed for brute-force cross-checks.
bool EvaluateBody(const Concept& c, const Scene& scene, std::size_t binding);

class PoolIndex {
 public:
  explicit PoolIndex(const ScenePool& pool);

  std::size_t num_scenes() const { return scene_offset_.size() - 1; }
  std::size_t num_lanes() const { return lane_scene_.size(); }

 private:
  friend class CompiledConcept;
  static constexpr int kHistValues = 9;  // values 0..8 cover every domain
  static constexpr int kHistStride = kNumProperties * kHistValues;

  std::vector<std::uint32_t> scene_offset_;  // lanes of scene s: [off[s], off[s+1])
  std::array<std::vector<std::int8_t>, kNumProperties> lane_property_;
  std::vector<std::uint32_t> lane_scene_;
  std::vector<std::int8_t> lane_scene_size_;
  std::vector<std::uint8_t> histogram_;  // [scene][property][value] counts
};

class CompiledConcept {
 public:
  static CompiledConcept Compile(const Concept& c);

  // Truth values on every scene of the indexed pool. When max_true is set
  // and the running true count exceeds it, stops early and returns nullopt.
  std::optional<BitVector> Run(const PoolIndex& index,
                               std::optional<std::uint64_t> max_true = {}) const;

  std::size_t num_instructions() const { return code_.size(); }

 private:
  enum class Code : std::uint8_t {
    kLoad, kConst, kAll, kAny, kCount, kEq, kGt, kAnd, kOr, kNot,
  };
  struct Instruction {
    Code code;
    std::uint8_t property = 0;
    bool others = false;  // set predicate over S_{-x}
    std::int8_t value = 0;
  };

  void Emit(const Expr& e, int& depth);
  void RunBatch(const PoolIndex& index, std::size_t s0, std::size_t s1,
                std::vector<std::vector<std::int8_t>>& stack,
                BitVector& out, std::uint64_t& true_count) const;

  Quantifier quantifier_ = Quantifier::kExists;
  std::vector<Instruction> code_;
  int max_stack_ = 0;
};

using SignatureHash = std::array<std::uint8_t, 16>;

// Truncated SHA-256 over the bit count and the packed little-endian words.
SignatureHash HashBits(const BitVector& bits);

struct EvaluationSignature {
  std::uint64_t concept_id = 0;
  BitVector bits;
  std::uint64_t true_count = 0;
  double true_rate = 0.0;
  SignatureHash hash{};
};

EvaluationSignature MakeSignature(std::uint64_t concept_id, BitVector bits);

// Throws kEmptyPool on an empty pool.
EvaluationSignature ComputeSignature(std::uint64_t concept_id, const Concept& c,
                                     const ScenePool& pool);
EvaluationSignature ComputeSignature(std::uint64_t concept_id, const Concept& c,
                                     const PoolIndex& index);

}  // namespace curi

#endif  // CURI_EXECUTOR_H_
