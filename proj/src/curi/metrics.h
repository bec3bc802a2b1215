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

#ifndef CURI_METRICS_H_
#define CURI_METRICS_H_

// Ranking and accuracy metrics, the mAP scene pool T, and the
// compositionality gap between the strong and weak oracles.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "curi/episodes.h"
#include "curi/filter.h"
#include "curi/oracle.h"
#include "curi/scene.h"
#include "json.hpp"

namespace curi {

// Mean of the positive-class and negative-class accuracies. A score counts
// as a positive prediction only if it is strictly above the threshold.
// Throws kSingleClass unless both classes are present.
double ClassBalancedAccuracy(std::span<const double> scores, std::span<const std::uint8_t> labels,
                             double threshold = 0.5);

// Precision at the rank of each positive, averaged over positives. Items are
// ranked by descending score, ties by ascending id. Throws kNoPositives.
double AveragePrecision(std::span<const double> scores, std::span<const std::uint8_t> labels,
                        std::span<const std::uint64_t> ids);
// Ids default to the item index.
double AveragePrecision(std::span<const double> scores, std::span<const std::uint8_t> labels);

// Sum in a fixed pairwise order.
double PairwiseSum(std::span<const double> v);
double Mean(std::span<const double> v);

struct MapPool {
  // T: pool scenes keep their pool id; scenes sampled fresh get ids from the
  // pool size upward.
  std::vector<Scene> scenes;
  // For each space position, indices into `scenes` where the concept holds.
  std::vector<std::vector<std::uint32_t>> truth;
  int k = 3;
  std::uint64_t seed = 0;
  std::size_t num_fresh = 0;

  std::vector<std::uint8_t> Labels(std::size_t space_position) const;
  std::vector<std::uint64_t> Ids() const;
};

// k positives per concept from the pool (fresh scenes when the pool holds
// fewer than k), deduplicated.
MapPool BuildMapPool(const HypothesisSpace& space, const ScenePool& pool, int k,
                     std::uint64_t seed, const ObjectCountRange& range = {},
                     int threads = 0);
// Recomputes the ground truth of every concept on `scenes`.
void ComputeMapTruth(MapPool& t, const HypothesisSpace& space, int threads = 0);

nlohmann::ordered_json MapPoolToJson(const MapPool& t, std::uint64_t pool_size);
// Rebuilds T from pool ids and stored fresh scenes, then its ground truth.
MapPool MapPoolFromJson(const nlohmann::json& j, const ScenePool& pool,
                        const HypothesisSpace& space, int threads = 0);

// Predictive of the posterior on every scene of T.
std::vector<double> ScoreMapPool(const OraclePrior& prior, const OraclePosterior& post,
                                 const MapPool& t);

enum class Metric : std::uint8_t { kMap, kCba };

std::string_view MetricName(Metric m);  // "map" | "cba"
Metric ParseMetric(std::string_view name);

struct EpisodeScore {
  std::uint64_t idx = 0;
  std::size_t consistent = 0;
  bool fallback = false;
  double cba = 0.0;
  double ap = 0.0;
  std::vector<double> query_scores;
};

struct OracleRun {
  OracleKind kind = OracleKind::kStrong;
  std::vector<EpisodeScore> episodes;
  double map = 0.0;
  double cba = 0.0;
  double fallback_fraction = 0.0;

  double Get(Metric m) const { return m == Metric::kMap ? map : cba; }
};

OracleRun RunOracle(const OraclePrior& prior, const HypothesisSpace& space,
                    const MapPool& t, std::span<const Episode> episodes,
                    int threads = 0);

// M(strong) - M(weak). Throws kMismatchedEpisodes unless both runs scored the
// same episodes.
double CompGap(const OracleRun& strong, const OracleRun& weak, Metric m);

struct MetricsReport {
  SplitKind kind = SplitKind::kInstanceIid;
  NegativesMode mode = NegativesMode::kHard;
  OracleRun strong;
  OracleRun weak;
  double gap_map = 0.0;
  double gap_cba = 0.0;
  std::uint64_t seed = 0;

  double Gap(Metric m) const { return m == Metric::kMap ? gap_map : gap_cba; }
  nlohmann::ordered_json ToJson() const;
};

MetricsReport MakeReport(SplitKind kind, NegativesMode mode, OracleRun strong,
                         OracleRun weak, std::uint64_t seed);

// One JSON object per episode: idx, oracle, consistent, fallback, scores.
nlohmann::ordered_json EpisodeScoreToJson(const EpisodeScore& s, OracleKind kind);

}  // namespace curi

#endif  // CURI_METRICS_H_
