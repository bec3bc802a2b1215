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

#include "curi/executor.h"

#include <algorithm>
#include <cstring>

#include "curi/digest.h"
#include "curi/errors.h"

namespace curi {
namespace {

constexpr std::size_t kBatchScenes = 1024;

// ---------------------------------------------------------------------------
// Tree-walking interpreter.

class Interpreter {
 public:
  Interpreter(const Scene& scene, std::size_t x) : scene_(scene), x_(x) {}

  bool Bool(const Expr& e) const {
    switch (e.op) {
      case Op::kAnd: return Bool(e.args[0]) && Bool(e.args[1]);
      case Op::kOr: return Bool(e.args[0]) || Bool(e.args[1]);
      case Op::kNot: return !Bool(e.args[0]);
      case Op::kEq: return Value(e.args[0]) == Value(e.args[1]);
      case Op::kGt: return Value(e.args[0]) > Value(e.args[1]);
      case Op::kAll: {
        const int v = Value(e.args[1]);
        for (int m : Members(e.args[0])) {
          if (m != v) return false;
        }
        return true;
      }
      case Op::kAny: {
        const int v = Value(e.args[1]);
        for (int m : Members(e.args[0])) {
          if (m == v) return true;
        }
        return false;
      }
      default:
        throw Error(ErrorCode::kTypeMismatch, "expected a boolean node");
    }
  }

  int Value(const Expr& e) const {
    switch (e.op) {
      case Op::kObjectProperty: return scene_.objects[x_].Get(e.property);
      case Op::kConstant: return e.value;
      case Op::kCountEq: {
        const int v = Value(e.args[1]);
        const auto m = Members(e.args[0]);
        return static_cast<int>(std::count(m.begin(), m.end(), v));
      }
      default:
        throw Error(ErrorCode::kTypeMismatch, "expected a scalar node");
    }
  }

  std::vector<int> Members(const Expr& e) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < scene_.objects.size(); ++i) {
      if (e.set == SetRef::kOthers && i == x_) continue;
      out.push_back(scene_.objects[i].Get(e.property));
    }
    return out;
  }

 private:
  const Scene& scene_;
  std::size_t x_;
};

}  // namespace

bool EvaluateBody(const Concept& c, const Scene& scene, std::size_t binding) {
  return Interpreter(scene, binding).Bool(c.body);
}

bool Evaluate(const Concept& c, const Scene& scene) {
  const std::size_t n = scene.objects.size();
  if (c.quantifier == Quantifier::kExists) {
    for (std::size_t x = 0; x < n; ++x) {
      if (EvaluateBody(c, scene, x)) return true;
    }
    return false;
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (!EvaluateBody(c, scene, x)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Batched stack machine.

PoolIndex::PoolIndex(const ScenePool& pool) {
  const std::size_t n = pool.size();
  scene_offset_.resize(n + 1);
  histogram_.assign(n * kHistStride, 0);
  std::size_t lanes = 0;
  for (std::size_t s = 0; s < n; ++s) lanes += pool[s].objects.size();
  for (auto& v : lane_property_) v.reserve(lanes);
  lane_scene_.reserve(lanes);
  lane_scene_size_.reserve(lanes);
  std::uint32_t off = 0;
  for (std::size_t s = 0; s < n; ++s) {
    scene_offset_[s] = off;
    const auto& objects = pool[s].objects;
    for (const SceneObject& o : objects) {
      for (Property p : kAllProperties) {
        const int v = o.Get(p);
        lane_property_[static_cast<int>(p)].push_back(static_cast<std::int8_t>(v));
        ++histogram_[s * kHistStride + static_cast<int>(p) * kHistValues + v];
      }
      lane_scene_.push_back(static_cast<std::uint32_t>(s));
      lane_scene_size_.push_back(static_cast<std::int8_t>(objects.size()));
      ++off;
    }
  }
  scene_offset_[n] = off;
}

CompiledConcept CompiledConcept::Compile(const Concept& c) {
  CompiledConcept out;
  out.quantifier_ = c.quantifier;
  int depth = 0;
  out.Emit(c.body, depth);
  return out;
}

void CompiledConcept::Emit(const Expr& e, int& depth) {
  auto push = [&](Instruction ins) {
    code_.push_back(ins);
  };
  auto grow = [&] {
    ++depth;
    max_stack_ = std::max(max_stack_, depth);
  };
  switch (e.op) {
    case Op::kObjectProperty:
      push({Code::kLoad, static_cast<std::uint8_t>(e.property)});
      grow();
      return;
    case Op::kConstant:
      push({Code::kConst, 0, false, static_cast<std::int8_t>(e.value)});
      grow();
      return;
    case Op::kAll:
    case Op::kAny:
    case Op::kCountEq: {
      // The set accessor contributes no stack slot; only the value does.
      Emit(e.args[1], depth);
      const Expr& set = e.args[0];
      const Code code = e.op == Op::kAll   ? Code::kAll
                        : e.op == Op::kAny ? Code::kAny
                                           : Code::kCount;
      push({code, static_cast<std::uint8_t>(set.property),
            set.set == SetRef::kOthers});
      return;
    }
    case Op::kNot:
      Emit(e.args[0], depth);
      push({Code::kNot});
      return;
    case Op::kAnd:
    case Op::kOr:
    case Op::kEq:
    case Op::kGt: {
      Emit(e.args[0], depth);
      Emit(e.args[1], depth);
      const Code code = e.op == Op::kAnd  ? Code::kAnd
                        : e.op == Op::kOr ? Code::kOr
                        : e.op == Op::kEq ? Code::kEq
                                          : Code::kGt;
      push({code});
      --depth;
      return;
    }
    case Op::kSetProperty:
      break;
  }
  throw Error(ErrorCode::kTypeMismatch, "set accessor outside a set predicate");
}

void CompiledConcept::RunBatch(const PoolIndex& index, std::size_t s0,
                               std::size_t s1,
                               std::vector<std::vector<std::int8_t>>& stack,
                               BitVector& out, std::uint64_t& true_count) const {
  const std::size_t l0 = index.scene_offset_[s0];
  const std::size_t n = index.scene_offset_[s1] - l0;
  const std::uint32_t* lane_scene = index.lane_scene_.data() + l0;
  const std::int8_t* lane_size = index.lane_scene_size_.data() + l0;
  const std::uint8_t* hist = index.histogram_.data();
  int sp = 0;
  for (const Instruction& ins : code_) {
    switch (ins.code) {
      case Code::kLoad: {
        std::memcpy(stack[sp].data(), index.lane_property_[ins.property].data() + l0, n);
        ++sp;
        break;
      }
      case Code::kConst:
        std::memset(stack[sp].data(), ins.value, n);
        ++sp;
        break;
      case Code::kAll:
      case Code::kAny:
      case Code::kCount: {
        std::int8_t* v = stack[sp - 1].data();
        const std::int8_t* self = index.lane_property_[ins.property].data() + l0;
        const std::size_t base = static_cast<std::size_t>(ins.property) * PoolIndex::kHistValues;
        for (std::size_t i = 0; i < n; ++i) {
          const int value = v[i];
          int count = 0;
          if (value >= 0 && value < PoolIndex::kHistValues) {
            count = hist[lane_scene[i] * PoolIndex::kHistStride + base + value];
            if (ins.others) count -= (self[i] == value);
          }
          const int members = lane_size[i] - (ins.others ? 1 : 0);
          std::int8_t r;
          if (ins.code == Code::kAll) {
            r = count == members;
          } else if (ins.code == Code::kAny) {
            r = count > 0;
          } else {
            r = static_cast<std::int8_t>(count);
          }
          v[i] = r;
        }
        break;
      }
      case Code::kNot: {
        std::int8_t* a = stack[sp - 1].data();
        for (std::size_t i = 0; i < n; ++i) a[i] = !a[i];
        break;
      }
      default: {
        std::int8_t* a = stack[sp - 2].data();
        const std::int8_t* b = stack[sp - 1].data();
        switch (ins.code) {
          case Code::kAnd:
            for (std::size_t i = 0; i < n; ++i) a[i] = a[i] & b[i];
            break;
          case Code::kOr:
            for (std::size_t i = 0; i < n; ++i) a[i] = a[i] | b[i];
            break;
          case Code::kEq:
            for (std::size_t i = 0; i < n; ++i) a[i] = a[i] == b[i];
            break;
          default:
            for (std::size_t i = 0; i < n; ++i) a[i] = a[i] > b[i];
            break;
        }
        --sp;
      }
    }
  }
  const std::int8_t* result = stack[0].data();
  const bool exists = quantifier_ == Quantifier::kExists;
  for (std::size_t s = s0; s < s1; ++s) {
    const std::size_t begin = index.scene_offset_[s] - l0;
    const std::size_t end = index.scene_offset_[s + 1] - l0;
    bool truth = !exists;
    for (std::size_t i = begin; i < end; ++i) {
      if (exists ? result[i] != 0 : result[i] == 0) {
        truth = exists;
        break;
      }
    }
    if (truth) {
      out.Set(s);
      ++true_count;
    }
  }
}

std::optional<BitVector> CompiledConcept::Run(
    const PoolIndex& index, std::optional<std::uint64_t> max_true) const {
  const std::size_t scenes = index.num_scenes();
  BitVector out(scenes);
  std::size_t widest = 0;
  for (std::size_t s0 = 0; s0 < scenes; s0 += kBatchScenes) {
    const std::size_t s1 = std::min(scenes, s0 + kBatchScenes);
    widest = std::max<std::size_t>(
        widest, index.scene_offset_[s1] - index.scene_offset_[s0]);
  }
  std::vector<std::vector<std::int8_t>> stack(std::max(max_stack_, 1),
                                              std::vector<std::int8_t>(widest));
  std::uint64_t true_count = 0;
  for (std::size_t s0 = 0; s0 < scenes; s0 += kBatchScenes) {
    const std::size_t s1 = std::min(scenes, s0 + kBatchScenes);
    RunBatch(index, s0, s1, stack, out, true_count);
    if (max_true && true_count > *max_true) return std::nullopt;
  }
  return out;
}

SignatureHash HashBits(const BitVector& bits) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(8 + bits.words().size() * 8);
  auto put = [&](std::uint64_t w) {
    for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<std::uint8_t>(w >> (8 * b)));
  };
  put(bits.size());
  for (std::uint64_t w : bits.words()) put(w);
  const Sha256Digest full = Sha256(bytes);
  SignatureHash out;
  std::copy_n(full.begin(), out.size(), out.begin());
  return out;
}

EvaluationSignature MakeSignature(std::uint64_t concept_id, BitVector bits) {
  EvaluationSignature sig;
  sig.concept_id = concept_id;
  sig.true_count = bits.Count();
  sig.true_rate = bits.size() == 0 ? 0.0
                                   : static_cast<double>(sig.true_count) /
                                         static_cast<double>(bits.size());
  sig.hash = HashBits(bits);
  sig.bits = std::move(bits);
  return sig;
}

EvaluationSignature ComputeSignature(std::uint64_t concept_id, const Concept& c,
                                     const PoolIndex& index) {
  if (index.num_scenes() == 0) {
    throw Error(ErrorCode::kEmptyPool, "signature over an empty pool");
  }
  return MakeSignature(concept_id, *CompiledConcept::Compile(c).Run(index));
}

EvaluationSignature ComputeSignature(std::uint64_t concept_id, const Concept& c,
                                     const ScenePool& pool) {
  if (pool.empty()) throw Error(ErrorCode::kEmptyPool, "signature over an empty pool");
  return ComputeSignature(concept_id, c, PoolIndex(pool));
}

}  // namespace curi
