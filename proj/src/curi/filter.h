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

#ifndef CURI_FILTER_H_
#define CURI_FILTER_H_

// Turns raw grammar samples into the hypothesis space: exact dedup,
// structural rejection, the true-rate window, and synonym clustering.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "curi/concept.h"
#include "curi/executor.h"
#include "curi/scene.h"

namespace curi {

enum class RejectReason : std::uint8_t {
  // R1: a for-all quantifier together with any use of S_{-x}.
  kForAllWithOthers,
  // R2: an accessor of x compared with the same accessor of x.
  kSelfComparison,
  // R3: a set predicate over F(S) whose value is F(x), i.e. the bound object
  // compared against a set that contains it.
  kSceneSetVersusObject,
};

std::string_view RejectReasonName(RejectReason r);  // "R1", "R2", "R3"

std::optional<RejectReason> StructuralReject(const Concept& c);

struct FilterThresholds {
  double max_rate = 0.10;      // reject if true-rate > max_rate
  std::uint64_t min_true = 10; // reject if true-count < min_true

  // Throws kInvalidConfig unless max_rate is in (0, 1].
  void Validate() const;
};

bool Interesting(const EvaluationSignature& sig, const FilterThresholds& t);
bool Interesting(std::uint64_t true_count, std::uint64_t pool_size,
                 const FilterThresholds& t);

// Largest true count that still satisfies the rate bound on a pool of the
// given size.
std::uint64_t MaxTrueCount(std::uint64_t pool_size, double max_rate);

struct RawConcept {
  std::uint64_t id = 0;
  Concept hypothesis;
};

struct SpaceConcept {
  std::uint64_t id = 0;
  Concept hypothesis;
  TokenString tokens;
  int length = 0;
  EvaluationSignature signature;
  std::size_t cluster = 0;
};

struct Provenance {
  std::uint64_t raw = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t rejected_r1 = 0;
  std::uint64_t rejected_r2 = 0;
  std::uint64_t rejected_r3 = 0;
  std::uint64_t too_frequent = 0;
  std::uint64_t too_rare = 0;
  std::uint64_t accepted = 0;
};

struct HypothesisSpace {
  std::vector<SpaceConcept> concepts;
  // Partition of concept positions by identical signature bits; cluster ids
  // are numbered by first appearance.
  std::vector<std::vector<std::size_t>> clusters;
  Provenance provenance;
  FilterThresholds thresholds;
  std::uint64_t pool_seed = 0;
  std::uint64_t pool_size = 0;

  std::size_t size() const { return concepts.size(); }
  // Position of a concept id, or nullopt.
  std::optional<std::size_t> Find(std::uint64_t id) const;
  void RebuildIndex();

 private:
  std::unordered_map<std::uint64_t, std::size_t> by_id_;
};

// Dedup by postfix string, structural rejection, signature, true-rate window,
// synonym clustering. Throws kEmptySpace if nothing survives, kEmptyPool if
// the pool is empty.
HypothesisSpace BuildSpace(std::span<const RawConcept> raw, const ScenePool& pool,
                           const FilterThresholds& thresholds, int threads = 0);

// Recomputes cluster assignments from signature bits (hash first, full
// comparison on collision).
void AssignClusters(HypothesisSpace& space);

struct ClusterStats {
  std::map<std::size_t, std::size_t> histogram;  // cluster size -> #clusters
  std::size_t num_clusters = 0;
  std::size_t modal_size = 0;
  std::size_t largest = 0;
};

ClusterStats SynonymClusters(const HypothesisSpace& space);

}  // namespace curi

#endif  // CURI_FILTER_H_
