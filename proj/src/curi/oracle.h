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

#ifndef CURI_ORACLE_H_
#define CURI_ORACLE_H_

// Exact Bayesian ideal learners over a finite hypothesis set with a length
// prior and a deterministic 0/1 likelihood.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "curi/filter.h"
#include "curi/splits.h"

namespace curi {

inline constexpr double kLengthPriorRate = 0.2;

// exp(-0.2 * length).
double UnnormalizedPrior(int length);

enum class OracleKind : std::uint8_t { kStrong, kWeak };

std::string_view OracleKindName(OracleKind kind);  // "strong" | "weak"

struct OraclePrior {
  OracleKind kind = OracleKind::kStrong;
  std::vector<std::uint64_t> ids;
  // Position of each hypothesis in the space, when built from one.
  std::vector<std::size_t> positions;
  std::vector<double> weights;  // sums to 1
};

// Throws kEmptyHypothesisSet when ids is empty.
OraclePrior MakePrior(OracleKind kind, std::span<const std::uint64_t> ids,
                      std::span<const int> lengths);
OraclePrior MakePrior(OracleKind kind, const HypothesisSpace& space,
                      std::span<const std::uint64_t> ids);

// Strong: train and test concepts in space order. Weak: train only.
OraclePrior StrongPrior(const HypothesisSpace& space, const SplitAssignment& split);
OraclePrior WeakPrior(const HypothesisSpace& space, const SplitAssignment& split);

struct LabeledScene {
  std::uint64_t scene = 0;
  bool label = false;
};

struct OraclePosterior {
  // Indices into the prior of the hypotheses consistent with the support,
  // in prior order, and their normalized weights.
  std::vector<std::size_t> consistent;
  std::vector<double> weights;
  bool fallback = false;  // no consistent hypothesis; predictive is 0.5
};

// Consistency read from signature bits; support scene ids index the pool
// the space was filtered on. The prior must carry space positions.
OraclePosterior Posterior(const OraclePrior& prior, const HypothesisSpace& space,
                          std::span<const LabeledScene> support);

// Consistency by running each hypothesis on the given scenes (aligned with
// `support`).
OraclePosterior PosteriorByEvaluation(const OraclePrior& prior,
                                      const HypothesisSpace& space,
                                      std::span<const LabeledScene> support,
                                      std::span<const Scene> scenes);

// p(y = 1 | scene, support) for a pool scene.
double Predictive(const OraclePrior& prior, const OraclePosterior& post,
                  const HypothesisSpace& space, std::uint64_t scene);

std::vector<double> ScorePoolScenes(const OraclePrior& prior,
                                    const OraclePosterior& post,
                                    const HypothesisSpace& space,
                                    std::span<const std::uint64_t> scenes);

}  // namespace curi

#endif  // CURI_ORACLE_H_
