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

#include <set>

#include <gtest/gtest.h>

#include "curi/concept.h"
#include "curi/errors.h"
#include "curi/executor.h"
#include "curi/filter.h"
#include "test_util.h"

namespace curi {
namespace {

std::optional<RejectReason> Reject(std::string_view text) {
  return StructuralReject(ParsePostfix(text));
}

TEST(StructuralReject, Patterns) {
  EXPECT_EQ(Reject("S_{-x} color? red all for-all="), RejectReason::kForAllWithOthers);
  EXPECT_EQ(Reject("x color? x color? = exists="), RejectReason::kSelfComparison);
  EXPECT_EQ(Reject("x size? x size? > exists="), RejectReason::kSelfComparison);
  EXPECT_EQ(Reject("S color? x color? any exists="), RejectReason::kSceneSetVersusObject);
  EXPECT_EQ(Reject("x locationX? x locationY? = exists="), std::nullopt);
  EXPECT_EQ(Reject("S_{-x} color? x color? any exists="), std::nullopt);
  EXPECT_EQ(Reject("S_{-x} color? red all exists="), std::nullopt);
  EXPECT_EQ(RejectReasonName(RejectReason::kSceneSetVersusObject), "R3");
}

TEST(Interesting, Window) {
  const FilterThresholds t;
  EXPECT_FALSE(Interesting(50'000, 100'000, t));
  EXPECT_FALSE(Interesting(3, 100'000, t));
  EXPECT_TRUE(Interesting(10, 100, t));
  EXPECT_FALSE(Interesting(11, 100, t));
  EXPECT_FALSE(Interesting(9, 90, t));
  EXPECT_TRUE(Interesting(10'000, 100'000, t));
  EXPECT_FALSE(Interesting(10'001, 100'000, t));
  EXPECT_EQ(MaxTrueCount(100'000, 0.1), 10'000u);
  EXPECT_THROW((FilterThresholds{0.0, 10}).Validate(), Error);
  EXPECT_THROW((FilterThresholds{1.5, 10}).Validate(), Error);
}

TEST(BuildSpace, DedupAndProvenance) {
  const ScenePool pool = BuildPool(500, 1);
  const FilterThresholds loose{1.0, 1};
  std::vector<RawConcept> raw = {
      {0, ParsePostfix("x color? red = exists=")},
      {1, ParsePostfix("x color? red = exists=")},
      {2, ParsePostfix("x color? x color? = exists=")},
      {3, ParsePostfix("S_{-x} color? red all for-all=")},
      {4, ParsePostfix("S color? x color? any exists=")},
      {5, ParsePostfix("x color? blue = exists=")},
  };
  const HypothesisSpace space = BuildSpace(raw, pool, loose, 1);
  ASSERT_EQ(space.size(), 2u);
  EXPECT_EQ(space.concepts[0].id, 0u);
  EXPECT_EQ(space.concepts[1].id, 5u);
  const Provenance& p = space.provenance;
  EXPECT_EQ(p.raw, 6u);
  EXPECT_EQ(p.duplicates, 1u);
  EXPECT_EQ(p.rejected_r1 + p.rejected_r2 + p.rejected_r3, 3u);
  EXPECT_EQ(p.accepted, 2u);
  EXPECT_TRUE(space.Find(5).has_value());
  EXPECT_FALSE(space.Find(1).has_value());
}

TEST(BuildSpace, Errors) {
  const std::vector<RawConcept> raw = {{0, ParsePostfix("x color? x color? = exists=")}};
  EXPECT_THROW(BuildSpace(raw, BuildPool(100, 0), FilterThresholds{}, 1), Error);
  EXPECT_THROW(BuildSpace(raw, BuildPool(0, 0), FilterThresholds{}, 1), Error);
}

TEST(BuildSpace, SurvivorsRecheckClean) {
  const auto& w = testing::World();
  const Provenance& p = w.space.provenance;
  EXPECT_GT(p.accepted, 0u);
  EXPECT_LT(p.accepted, p.raw);
  EXPECT_EQ(p.raw, p.duplicates + p.rejected_r1 + p.rejected_r2 + p.rejected_r3 +
                       p.too_frequent + p.too_rare + p.accepted);
  std::set<TokenString> seen;
  for (const SpaceConcept& c : w.space.concepts) {
    EXPECT_FALSE(StructuralReject(c.hypothesis).has_value());
    const auto sig = ComputeSignature(c.id, c.hypothesis, w.pool);
    EXPECT_EQ(sig.bits, c.signature.bits);
    EXPECT_TRUE(Interesting(sig, w.space.thresholds));
    EXPECT_TRUE(seen.insert(c.tokens).second);
  }
}

TEST(SynonymClusters, IdenticalSignaturesShareCluster) {
  const ScenePool pool = BuildPool(1000, 3);
  const std::vector<RawConcept> raw = {
      {0, ParsePostfix("x locationX? 3 > exists=")},
      {1, ParsePostfix("x color? red = exists=")},
      {2, ParsePostfix("x locationX? 3 = not 3 x locationX? > not and exists=")},
  };
  const HypothesisSpace space = BuildSpace(raw, pool, FilterThresholds{1.0, 1}, 1);
  ASSERT_EQ(space.size(), 3u);
  EXPECT_EQ(space.concepts[0].cluster, space.concepts[2].cluster);
  EXPECT_NE(space.concepts[0].cluster, space.concepts[1].cluster);
  const ClusterStats stats = SynonymClusters(space);
  EXPECT_EQ(stats.num_clusters, 2u);
  EXPECT_EQ(stats.largest, 2u);
  EXPECT_EQ(stats.histogram.at(1), 1u);
  EXPECT_EQ(stats.histogram.at(2), 1u);
}

TEST(SynonymClusters, PartitionMatchesBits) {
  const auto& w = testing::World();
  for (std::size_t c = 0; c < w.space.clusters.size(); ++c) {
    const auto& members = w.space.clusters[c];
    for (std::size_t m : members) {
      EXPECT_EQ(w.space.concepts[m].cluster, c);
      EXPECT_EQ(w.space.concepts[m].signature.bits, w.space.concepts[members[0]].signature.bits);
    }
  }
}

}  // namespace
}  // namespace curi
