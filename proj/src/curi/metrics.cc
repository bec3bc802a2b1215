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

#include "curi/metrics.h"

#include <algorithm>
#include <numeric>
#include <string>
#include <unordered_set>

#include "curi/errors.h"
#include "curi/executor.h"
#include "curi/parallel.h"
#include "curi/rng.h"

namespace curi {
namespace {

// Fresh scenes tried per concept before giving up.
constexpr int kFreshAttempts = 1'000'000;

double SumRange(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return SumRange(v.first(half)) + SumRange(v.subspan(half));
}

}  // namespace

double PairwiseSum(std::span<const double> v) { return SumRange(v); }

double Mean(std::span<const double> v) {
  return v.empty() ? 0.0 : PairwiseSum(v) / static_cast<double>(v.size());
}

double ClassBalancedAccuracy(std::span<const double> scores, std::span<const std::uint8_t> labels,
                             double threshold) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::kInvalidArgument, "scores and labels differ in size");
  }
  std::size_t pos = 0, neg = 0, tp = 0, tn = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] > threshold;
    if (labels[i]) {
      ++pos;
      tp += predicted;
    } else {
      ++neg;
      tn += !predicted;
    }
  }
  if (pos == 0 || neg == 0) {
    throw Error(ErrorCode::kSingleClass, "labels need both classes");
  }
  return 0.5 * (static_cast<double>(tp) / static_cast<double>(pos) +
                static_cast<double>(tn) / static_cast<double>(neg));
}

double AveragePrecision(std::span<const double> scores, std::span<const std::uint8_t> labels,
                        std::span<const std::uint64_t> ids) {
  if (scores.size() != labels.size() || scores.size() != ids.size()) {
    throw Error(ErrorCode::kInvalidArgument, "scores, labels and ids differ in size");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids[a] < ids[b];
  });
  std::size_t hits = 0;
  std::vector<double> precisions;
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (labels[order[r]]) {
      ++hits;
      precisions.push_back(static_cast<double>(hits) / static_cast<double>(r + 1));
    }
  }
  if (hits == 0) throw Error(ErrorCode::kNoPositives, "no positive labels");
  return Mean(precisions);
}

double AveragePrecision(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  std::vector<std::uint64_t> ids(scores.size());
  std::iota(ids.begin(), ids.end(), 0);
  return AveragePrecision(scores, labels, ids);
}

std::vector<std::uint8_t> MapPool::Labels(std::size_t space_position) const {
  std::vector<std::uint8_t> out(scenes.size(), 0);
  for (auto t : truth[space_position]) out[t] = 1;
  return out;
}

std::vector<std::uint64_t> MapPool::Ids() const {
  std::vector<std::uint64_t> out;
  out.reserve(scenes.size());
  for (const auto& s : scenes) out.push_back(s.id);
  return out;
}

MapPool BuildMapPool(const HypothesisSpace& space, const ScenePool& pool, int k,
                     std::uint64_t seed, const ObjectCountRange& range, int threads) {
  if (k < 1) throw Error(ErrorCode::kInvalidConfig, "map_k must be positive");
  ValidateRange(range);
  const Rng root(seed);
  std::vector<std::vector<std::uint64_t>> picked(space.size());
  std::vector<std::vector<Scene>> fresh(space.size());
  ParallelFor(space.size(), threads, [&](std::size_t p) {
    const SpaceConcept& c = space.concepts[p];
    std::vector<std::uint64_t> trues;
    c.signature.bits.ForEachSet([&](std::size_t s) { trues.push_back(s); });
    Rng rng = root.Substream("mappool", p);
    picked[p] = rng.SampleWithoutReplacement(trues, static_cast<std::size_t>(k));
    Rng fresh_rng = root.Substream("mappool_fresh", p);
    int attempts = 0;
    while (picked[p].size() + fresh[p].size() < static_cast<std::size_t>(k)) {
      if (++attempts > kFreshAttempts) {
        throw Error(ErrorCode::kInsufficientScenes,
                    "no fresh positive scenes for concept " + std::to_string(c.id));
      }
      Scene s = SampleScene(fresh_rng, range);
      if (Evaluate(c.hypothesis, s)) fresh[p].push_back(std::move(s));
    }
  });

  MapPool t;
  t.k = k;
  t.seed = seed;
  std::vector<std::uint64_t> ids;
  for (const auto& v : picked) ids.insert(ids.end(), v.begin(), v.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  for (auto id : ids) t.scenes.push_back(pool[id]);
  std::uint64_t next_id = pool.size();
  for (auto& v : fresh) {
    for (auto& s : v) {
      s.id = next_id++;
      t.scenes.push_back(std::move(s));
      ++t.num_fresh;
    }
  }
  ComputeMapTruth(t, space, threads);
  return t;
}

void ComputeMapTruth(MapPool& t, const HypothesisSpace& space, int threads) {
  std::vector<Scene> local = t.scenes;
  for (std::size_t i = 0; i < local.size(); ++i) local[i].id = i;
  const ScenePool local_pool(0, std::move(local));
  t.truth.assign(space.size(), {});
  if (local_pool.empty()) return;
  const PoolIndex index(local_pool);
  ParallelFor(space.size(), threads, [&](std::size_t p) {
    const BitVector bits = *CompiledConcept::Compile(space.concepts[p].hypothesis).Run(index);
    auto& out = t.truth[p];
    bits.ForEachSet([&](std::size_t i) { out.push_back(static_cast<std::uint32_t>(i)); });
  });
}

nlohmann::ordered_json MapPoolToJson(const MapPool& t, std::uint64_t pool_size) {
  nlohmann::ordered_json j;
  j["k"] = t.k;
  j["seed"] = t.seed;
  j["pool_size"] = pool_size;
  std::vector<std::uint64_t> pool_ids;
  nlohmann::ordered_json fresh = nlohmann::ordered_json::array();
  for (const auto& s : t.scenes) {
    if (s.id < pool_size) {
      pool_ids.push_back(s.id);
    } else {
      fresh.push_back(SceneToJson(s));
    }
  }
  j["pool_scenes"] = pool_ids;
  j["fresh_scenes"] = std::move(fresh);
  return j;
}

MapPool MapPoolFromJson(const nlohmann::json& j, const ScenePool& pool,
                        const HypothesisSpace& space, int threads) {
  MapPool t;
  try {
    t.k = j.at("k").get<int>();
    t.seed = j.at("seed").get<std::uint64_t>();
    if (j.at("pool_size").get<std::uint64_t>() != pool.size()) {
      throw Error(ErrorCode::kInvalidArgument, "map pool was built on another pool");
    }
    for (auto id : j.at("pool_scenes").get<std::vector<std::uint64_t>>()) {
      if (id >= pool.size()) throw Error(ErrorCode::kIo, "map pool scene out of range");
      t.scenes.push_back(pool[id]);
    }
    for (const auto& s : j.at("fresh_scenes")) {
      t.scenes.push_back(SceneFromJson(s));
      ++t.num_fresh;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("malformed map pool: ") + e.what());
  }
  ComputeMapTruth(t, space, threads);
  return t;
}

std::vector<double> ScoreMapPool(const OraclePrior& prior, const OraclePosterior& post,
                                 const MapPool& t) {
  if (post.fallback) return std::vector<double>(t.scenes.size(), 0.5);
  std::vector<double> scores(t.scenes.size(), 0.0);
  for (std::size_t k = 0; k < post.consistent.size(); ++k) {
    const double w = post.weights[k];
    for (auto i : t.truth[prior.positions[post.consistent[k]]]) scores[i] += w;
  }
  for (double& s : scores) s = std::min(s, 1.0);
  return scores;
}

std::string_view MetricName(Metric m) { return m == Metric::kMap ? "map" : "cba"; }

Metric ParseMetric(std::string_view name) {
  if (name == "map") return Metric::kMap;
  if (name == "cba") return Metric::kCba;
  throw Error(ErrorCode::kInvalidArgument, "unknown metric: " + std::string(name));
}

OracleRun RunOracle(const OraclePrior& prior, const HypothesisSpace& space,
                    const MapPool& t, std::span<const Episode> episodes, int threads) {
  OracleRun run;
  run.kind = prior.kind;
  run.episodes.resize(episodes.size());
  const std::vector<std::uint64_t> t_ids = t.Ids();
  ParallelFor(episodes.size(), threads, [&](std::size_t i) {
    const Episode& e = episodes[i];
    std::vector<LabeledScene> support;
    for (const auto& ex : e.support) support.push_back({ex.scene, ex.label});
    const OraclePosterior post = Posterior(prior, space, support);

    EpisodeScore& s = run.episodes[i];
    s.idx = e.idx;
    s.consistent = post.consistent.size();
    s.fallback = post.fallback;
    std::vector<std::uint8_t> query_labels;
    for (const auto& ex : e.query) {
      s.query_scores.push_back(Predictive(prior, post, space, ex.scene));
      query_labels.push_back(ex.label);
    }
    s.cba = ClassBalancedAccuracy(s.query_scores, query_labels);

    auto pos = space.Find(e.concept_id);
    if (!pos) throw Error(ErrorCode::kInvalidArgument, "episode concept not in space");
    const std::vector<double> scores = ScoreMapPool(prior, post, t);
    s.ap = AveragePrecision(scores, t.Labels(*pos), t_ids);
  });
  std::vector<double> aps, cbas;
  std::size_t fallbacks = 0;
  for (const auto& s : run.episodes) {
    aps.push_back(s.ap);
    cbas.push_back(s.cba);
    fallbacks += s.fallback;
  }
  run.map = Mean(aps);
  run.cba = Mean(cbas);
  run.fallback_fraction =
      episodes.empty() ? 0.0
                       : static_cast<double>(fallbacks) / static_cast<double>(episodes.size());
  return run;
}

double CompGap(const OracleRun& strong, const OracleRun& weak, Metric m) {
  bool same = strong.episodes.size() == weak.episodes.size();
  for (std::size_t i = 0; same && i < strong.episodes.size(); ++i) {
    same = strong.episodes[i].idx == weak.episodes[i].idx;
  }
  if (!same) {
    throw Error(ErrorCode::kMismatchedEpisodes,
                "strong and weak runs scored different episodes");
  }
  return strong.Get(m) - weak.Get(m);
}

MetricsReport MakeReport(SplitKind kind, NegativesMode mode, OracleRun strong,
                         OracleRun weak, std::uint64_t seed) {
  MetricsReport r;
  r.kind = kind;
  r.mode = mode;
  r.gap_map = CompGap(strong, weak, Metric::kMap);
  r.gap_cba = CompGap(strong, weak, Metric::kCba);
  r.strong = std::move(strong);
  r.weak = std::move(weak);
  r.seed = seed;
  return r;
}

nlohmann::ordered_json MetricsReport::ToJson() const {
  auto oracle = [](const OracleRun& run) {
    nlohmann::ordered_json j;
    j["map"] = run.map;
    j["cba"] = run.cba;
    j["fallback_fraction"] = run.fallback_fraction;
    return j;
  };
  nlohmann::ordered_json j;
  j["split"] = SplitKindName(kind);
  j["negatives"] = NegativesModeName(mode);
  j["episodes"] = strong.episodes.size();
  j["seed"] = seed;
  j["strong"] = oracle(strong);
  j["weak"] = oracle(weak);
  j["comp_gap"] = {{"map", gap_map}, {"cba", gap_cba}};
  return j;
}

nlohmann::ordered_json EpisodeScoreToJson(const EpisodeScore& s, OracleKind kind) {
  nlohmann::ordered_json j;
  j["idx"] = s.idx;
  j["oracle"] = OracleKindName(kind);
  j["consistent"] = s.consistent;
  j["fallback"] = s.fallback;
  j["cba"] = s.cba;
  j["ap"] = s.ap;
  j["scores"] = s.query_scores;
  return j;
}

}  // namespace curi
