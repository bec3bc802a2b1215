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

#include <random>

#include <gtest/gtest.h>

#include "curi/episodes.h"
#include "curi/errors.h"
#include "curi/executor.h"
#include "curi/metrics.h"
#include "curi/splits.h"
#include "oracles/reference.h"
#include "test_util.h"

namespace curi {
namespace {

using Labels = std::vector<std::uint8_t>;
using Scores = std::vector<double>;

ErrorCode Code(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;
}

TEST(ClassBalancedAccuracy, Examples) {
  Labels labels(25, 0);
  for (int i = 0; i < 5; ++i) labels[i] = 1;
  Scores perfect(25, 0.0);
  for (int i = 0; i < 5; ++i) perfect[i] = 0.9;
  EXPECT_DOUBLE_EQ(ClassBalancedAccuracy(perfect, labels), 1.0);
  EXPECT_DOUBLE_EQ(ClassBalancedAccuracy(Scores(25, 1.0), labels), 0.5);
  EXPECT_DOUBLE_EQ(ClassBalancedAccuracy(Scores(25, 0.5), labels), 0.5);
  // One of five positives missed, two of twenty negatives wrong.
  Scores mixed = perfect;
  mixed[0] = 0.1;
  mixed[10] = mixed[11] = 0.8;
  EXPECT_DOUBLE_EQ(ClassBalancedAccuracy(mixed, labels), (0.8 + 0.9) / 2);
  EXPECT_EQ(Code([] { ClassBalancedAccuracy(Scores(3, 0.1), Labels(3, 1)); }),
            ErrorCode::kSingleClass);
}

TEST(AveragePrecision, Examples) {
  EXPECT_DOUBLE_EQ(AveragePrecision(Scores{0.9, 0.8, 0.1}, Labels{1, 1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(AveragePrecision(Scores{0.2, 0.9}, Labels{1, 0}), 0.5);
  // Ranks 1 and 3: (1/1 + 2/3) / 2.
  EXPECT_DOUBLE_EQ(AveragePrecision(Scores{0.9, 0.5, 0.4}, Labels{1, 0, 1}), (1.0 + 2.0 / 3) / 2);
  EXPECT_EQ(Code([] { AveragePrecision(Scores{0.1, 0.2}, Labels{0, 0}); }),
            ErrorCode::kNoPositives);
}

TEST(AveragePrecision, TiesBreakByAscendingId) {
  const Scores s = {0.5, 0.5};
  const Labels y = {0, 1};
  EXPECT_DOUBLE_EQ(AveragePrecision(s, y, std::vector<std::uint64_t>{0, 1}), 0.5);
  EXPECT_DOUBLE_EQ(AveragePrecision(s, y, std::vector<std::uint64_t>{1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(AveragePrecision(s, y), 0.5);
}

TEST(AveragePrecision, MatchesReference) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + gen() % 60;
    Scores s(n);
    Labels y(n);
    std::vector<std::uint64_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(gen() % 5) / 4.0;
      y[i] = gen() % 3 == 0;
      ids[i] = i;
    }
    y[gen() % n] = 1;
    std::shuffle(ids.begin(), ids.end(), gen);
    EXPECT_NEAR(AveragePrecision(s, y, ids), reference::AveragePrecision(s, y, ids), 1e-12);
  }
}

TEST(PairwiseSum, Accurate) {
  Scores v(1 << 20, 0.1);
  long double exact = 0.0L;
  for (double x : v) exact += x;
  EXPECT_NEAR(PairwiseSum(v), static_cast<double>(exact), 1e-9);
  EXPECT_DOUBLE_EQ(Mean(Scores{1.0, 2.0, 6.0}), 3.0);
}

struct Fixture {
  SplitAssignment split;
  MapPool t;
  std::vector<Episode> episodes;
};

const Fixture& Get() {
  static const Fixture* f = [] {
    const auto& w = testing::World();
    auto* f = new Fixture;
    f->split = Assign(w.space, HoldoutSpec::Default(SplitKind::kBindingColor));
    f->t = BuildMapPool(w.space, w.pool, 3, 5, {}, 1);
    f->episodes = BuildEpisodeSet(f->split, EpisodePart::kTest, w.space, 60,
                                  NegativesMode::kHard, 3, {}, 1);
    return f;
  }();
  return *f;
}

TEST(MapPool, HoldsPositivesForEveryConcept) {
  const auto& w = testing::World();
  const MapPool& t = Get().t;
  ASSERT_EQ(t.truth.size(), w.space.size());
  const auto ids = t.Ids();
  for (std::size_t i = 1; i < ids.size(); ++i) EXPECT_LT(ids[i - 1], ids[i]);
  for (std::size_t p = 0; p < w.space.size(); ++p) {
    EXPECT_GE(t.truth[p].size(), 3u);
    // Truth lists agree with the tree interpreter.
    std::vector<std::uint32_t> expected;
    for (std::size_t i = 0; i < t.scenes.size(); ++i) {
      if (Evaluate(w.space.concepts[p].hypothesis, t.scenes[i])) {
        expected.push_back(static_cast<std::uint32_t>(i));
      }
    }
    ASSERT_EQ(t.truth[p], expected);
  }
  const MapPool back = MapPoolFromJson(MapPoolToJson(t, w.pool.size()), w.pool, w.space, 1);
  EXPECT_EQ(back.scenes, t.scenes);
  EXPECT_EQ(back.truth, t.truth);
}

TEST(RunOracle, StrongSingletonIsPerfect) {
  const auto& w = testing::World();
  const Fixture& f = Get();
  const OracleRun strong = RunOracle(StrongPrior(w.space, f.split), w.space, f.t, f.episodes, 1);
  int singletons = 0;
  for (const EpisodeScore& s : strong.episodes) {
    EXPECT_FALSE(s.fallback);
    if (s.consistent == 1) {
      ++singletons;
      EXPECT_DOUBLE_EQ(s.ap, 1.0);
      EXPECT_DOUBLE_EQ(s.cba, 1.0);
    }
  }
  EXPECT_GT(singletons, 0);
}

TEST(RunOracle, FallbackScoresAreHalf) {
  const Fixture& f = Get();
  OraclePosterior post;
  post.fallback = true;
  for (double s : ScoreMapPool(OraclePrior{}, post, f.t)) EXPECT_EQ(s, 0.5);
}

TEST(CompGap, InstanceIidIsZero) {
  const auto& w = testing::World();
  const SplitAssignment split = Assign(w.space, HoldoutSpec::Default(SplitKind::kInstanceIid));
  const auto episodes =
      BuildEpisodeSet(split, EpisodePart::kTest, w.space, 30, NegativesMode::kHard, 2, {}, 1);
  const OracleRun strong = RunOracle(StrongPrior(w.space, split), w.space, Get().t, episodes, 1);
  const OracleRun weak = RunOracle(WeakPrior(w.space, split), w.space, Get().t, episodes, 1);
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    EXPECT_EQ(strong.episodes[i].query_scores, weak.episodes[i].query_scores);
  }
  EXPECT_EQ(CompGap(strong, weak, Metric::kMap), 0.0);
  EXPECT_EQ(CompGap(strong, weak, Metric::kCba), 0.0);
}

TEST(CompGap, BindingColorIsPositiveAndMismatchRaises) {
  const auto& w = testing::World();
  const Fixture& f = Get();
  OracleRun strong = RunOracle(StrongPrior(w.space, f.split), w.space, f.t, f.episodes, 1);
  OracleRun weak = RunOracle(WeakPrior(w.space, f.split), w.space, f.t, f.episodes, 2);
  const MetricsReport r = MakeReport(SplitKind::kBindingColor, NegativesMode::kHard, strong, weak, 0);
  EXPECT_GT(r.gap_map, 0.0);
  EXPECT_EQ(r.ToJson()["comp_gap"]["map"].get<double>(), r.gap_map);
  weak.episodes.pop_back();
  EXPECT_EQ(Code([&] { CompGap(strong, weak, Metric::kMap); }), ErrorCode::kMismatchedEpisodes);
}

}  // namespace
}  // namespace curi
