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

#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "curi/errors.h"
#include "curi/splits.h"
#include "test_util.h"

namespace curi {
namespace {

SpaceConcept Make(std::string_view text) {
  SpaceConcept c;
  c.hypothesis = ParsePostfix(text);
  c.tokens = SerializePostfix(c.hypothesis);
  c.length = static_cast<int>(c.tokens.size());
  return c;
}

bool Held(SplitKind kind, std::string_view text) {
  return MatchesHoldout(HoldoutSpec::Default(kind), Make(text));
}

TEST(MatchesHoldout, Examples) {
  EXPECT_TRUE(Held(SplitKind::kBoolean, "x color? green = x shape? cube = or exists="));
  EXPECT_FALSE(Held(SplitKind::kBoolean, "x color? green = exists="));
  EXPECT_FALSE(Held(SplitKind::kBoolean, "x color? blue = x shape? cube = or exists="));
  EXPECT_TRUE(Held(SplitKind::kBindingShape, "x shape? cylinder = exists="));
  EXPECT_FALSE(Held(SplitKind::kBindingShape, "x shape? cube = exists="));
  EXPECT_TRUE(Held(SplitKind::kBindingColor, "S color? yellow any exists="));
  EXPECT_TRUE(Held(SplitKind::kIntrinsic, "x color? green = x material? metal = and exists="));
  EXPECT_FALSE(Held(SplitKind::kIntrinsic, "x color? green = x size? large = and exists="));
  EXPECT_TRUE(Held(SplitKind::kExtrinsic, "x color? gray = x locationX? 7 = and exists="));
  EXPECT_FALSE(Held(SplitKind::kExtrinsic, "x color? gray = x locationX? 6 = and exists="));
}

TEST(MatchesHoldout, ComplexityBoundary) {
  // Length 9 and 10 stay in train; 11 goes to test.
  const SpaceConcept nine = Make("x color? red = not not not not exists=");
  const SpaceConcept eleven = Make("x color? red = x shape? cube = and not exists=");
  ASSERT_EQ(nine.length, 9);
  ASSERT_EQ(eleven.length, 11);
  const HoldoutSpec spec = HoldoutSpec::Default(SplitKind::kComplexity);
  EXPECT_FALSE(MatchesHoldout(spec, nine));
  EXPECT_FALSE(MatchesHoldout(spec, Make("x color? red = x shape? cube = and exists=")));
  EXPECT_TRUE(MatchesHoldout(spec, eleven));
}

TEST(CountingPairs, CountComparedWithLiteral) {
  const auto p = CountingPairs(ParsePostfix("2 S_{-x} color? cyan count= = exists="));
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0], (std::pair<std::string, std::string>{"2", "cyan"}));
  EXPECT_TRUE(CountingPairs(ParsePostfix("x color? cyan = exists=")).empty());
  HoldoutSpec spec = HoldoutSpec::Default(SplitKind::kCounting);
  spec.pairs = {{"2", "cyan"}};
  EXPECT_TRUE(MatchesHoldout(spec, Make("2 S_{-x} color? cyan count= = exists=")));
  EXPECT_FALSE(MatchesHoldout(spec, Make("3 S_{-x} color? cyan count= = exists=")));
}

std::vector<std::uint64_t> Sorted(std::vector<std::uint64_t> v) {
  std::sort(v.begin(), v.end());
  return v;
}

TEST(Assign, InstanceIid) {
  const auto& space = testing::World().space;
  const SplitAssignment a = Assign(space, HoldoutSpec::Default(SplitKind::kInstanceIid));
  EXPECT_EQ(a.train, a.test);
  EXPECT_EQ(a.train.size(), space.size());
  EXPECT_TRUE(Validate(a, space).ok());
}

TEST(Assign, ConceptIidKeepsSynonymsTogether) {
  const auto& space = testing::World().space;
  const SplitAssignment a = Assign(space, HoldoutSpec::Default(SplitKind::kConceptIid, 4));
  std::map<std::uint64_t, int> side;
  for (auto id : a.train) side[id] = 0;
  for (auto id : a.val) side[id] = 1;
  for (auto id : a.test) side[id] = 2;
  bool saw_shared_cluster = false;
  for (const auto& cluster : space.clusters) {
    if (cluster.size() > 1) saw_shared_cluster = true;
    for (auto p : cluster) {
      EXPECT_EQ(side.at(space.concepts[p].id), side.at(space.concepts[cluster[0]].id));
    }
  }
  EXPECT_TRUE(saw_shared_cluster);
  EXPECT_TRUE(Validate(a, space).ok());
}

TEST(Assign, EveryKindValidates) {
  const auto& space = testing::World().space;
  for (SplitKind kind : kAllSplitKinds) {
    const SplitAssignment a = Assign(space, HoldoutSpec::Default(kind));
    const ValidationReport r = Validate(a, space);
    EXPECT_TRUE(r.ok()) << SplitKindName(kind) << ": " << r.violations.front();
    if (kind != SplitKind::kInstanceIid) {
      EXPECT_EQ(a.train.size() + a.val.size() + a.test.size(), space.size());
      EXPECT_FALSE(a.val.empty());
    }
    EXPECT_EQ(SplitAssignment::FromJson(a.ToJson()).ToJson().dump(), a.ToJson().dump());
  }
}

TEST(Assign, BooleanTrainHasNoHeldPair) {
  const auto& space = testing::World().space;
  const SplitAssignment a = Assign(space, HoldoutSpec::Default(SplitKind::kBoolean));
  auto has = [](const TokenString& t, const char* tok) {
    return std::find(t.begin(), t.end(), tok) != t.end();
  };
  for (auto id : a.train) {
    const auto& t = space.concepts[*space.Find(id)].tokens;
    EXPECT_FALSE(has(t, "green") && has(t, "or"));
  }
}

TEST(Assign, Deterministic) {
  const auto& space = testing::World().space;
  for (SplitKind kind : {SplitKind::kConceptIid, SplitKind::kBindingColor}) {
    const auto a = Assign(space, HoldoutSpec::Default(kind, 9));
    const auto b = Assign(space, HoldoutSpec::Default(kind, 9));
    EXPECT_EQ(a.ToJson().dump(), b.ToJson().dump());
  }
  const auto c = Assign(space, HoldoutSpec::Default(SplitKind::kConceptIid, 10));
  EXPECT_NE(Sorted(c.test), Sorted(Assign(space, HoldoutSpec::Default(
                                                     SplitKind::kConceptIid, 9)).test));
}

TEST(Validate, DetectsCorruption) {
  const auto& space = testing::World().space;
  SplitAssignment a = Assign(space, HoldoutSpec::Default(SplitKind::kBindingShape));
  a.train.push_back(a.test.front());
  EXPECT_FALSE(Validate(a, space).ok());
  a = Assign(space, HoldoutSpec::Default(SplitKind::kBindingShape));
  a.test.push_back(a.train.front());
  a.train.erase(a.train.begin());
  EXPECT_FALSE(Validate(a, space).ok());
}

TEST(Assign, DegenerateSplit) {
  const auto& space = testing::World().space;
  HoldoutSpec spec = HoldoutSpec::Default(SplitKind::kComplexity);
  spec.max_train_length = 1;
  EXPECT_THROW(Assign(space, spec), Error);
  spec.max_train_length = 1000;
  EXPECT_THROW(Assign(space, spec), Error);
}

}  // namespace
}  // namespace curi
