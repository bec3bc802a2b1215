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

#include <fstream>
#include <map>

#include <gtest/gtest.h>

#include "curi/digest.h"
#include "curi/errors.h"
#include "curi/pipeline.h"
#include "test_util.h"

namespace curi {
namespace {

namespace fs = std::filesystem;

ErrorCode Code(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kUnknownToken;
}

RunConfig Small(const fs::path& out, int threads = 1) {
  RunConfig c = RunConfig::Parse(
      "# small run\n"
      "raw_concepts = 6000\n"
      "pool_size = 3000\n"
      "splits = instance_iid, binding_color, binding_shape\n"
      "episodes_train = 20\n"
      "episodes_val = 5\n"
      "episodes_test = 30\n");
  c.out = out.string();
  c.threads = threads;
  return c;
}

// Relative path -> sha256 of every file under `dir` except the manifest.
std::map<std::string, std::string> Tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().filename() == "manifest.json") continue;
    out[fs::relative(e.path(), dir).string()] = ToHex(Sha256File(e.path()));
  }
  return out;
}

TEST(RunConfig, Parse) {
  const RunConfig c = RunConfig::Parse(
      "seed = 4\n"
      "  # comment\n"
      "\n"
      "max_rate = 0.2\n"
      "negatives = easy\n"
      "splits = counting,complexity\n"
      "weight.BOOL.or = 2\n"
      "disjoint_support_query = false\n");
  EXPECT_EQ(c.seed, 4u);
  EXPECT_DOUBLE_EQ(c.thresholds.max_rate, 0.2);
  EXPECT_EQ(c.negatives, NegativesMode::kEasy);
  EXPECT_EQ(c.splits, (std::vector<SplitKind>{SplitKind::kCounting, SplitKind::kComplexity}));
  EXPECT_DOUBLE_EQ(c.grammar.Probability(Nonterminal::kBool, "or"),
                   c.grammar.Probability(Nonterminal::kBool, "and") * 2);
  EXPECT_FALSE(c.disjoint_support_query);
  EXPECT_EQ(c.ToJson().count("out"), 0u);
  EXPECT_EQ(c.ToJson().count("threads"), 0u);
}

TEST(RunConfig, ShippedConfigs) {
  const RunConfig desk = RunConfig::Load(fs::path(CURI_CONFIG_DIR) / "desk.conf");
  desk.Validate();
  EXPECT_EQ(desk.ToJson().dump(), RunConfig().ToJson().dump());
  const RunConfig full = RunConfig::Load(fs::path(CURI_CONFIG_DIR) / "full_scale.conf");
  full.Validate();
  EXPECT_EQ(full.episodes_train, 500'000u);
  EXPECT_EQ(full.episodes_val, 5'000u);
  EXPECT_EQ(full.episodes_test, 20'000u);
  EXPECT_EQ(full.pool_size, 990'000u);
}

TEST(RunConfig, Errors) {
  EXPECT_EQ(Code([] { RunConfig::Parse("colour = red\n"); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(Code([] { RunConfig::Parse("seed = minus one\n"); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(Code([] { RunConfig::Parse("splits = nope\n"); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(Code([] { RunConfig::Parse("weight.BOOL = 1\n"); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(Code([] { RunConfig::Parse("no equals sign\n"); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(Code([] { RunConfig::Parse("max_rate = 0\n").Validate(); }),
            ErrorCode::kInvalidConfig);
  EXPECT_EQ(Code([] { RunConfig::Parse("min_objects = 6\nmax_objects = 5\n").Validate(); }),
            ErrorCode::kInfeasibleRange);
}

TEST(Pipeline, StagesSkipWhenFresh) {
  const fs::path dir = testing::TempDir("fresh");
  {
    Pipeline p(Small(dir));
    p.Filter();
    EXPECT_FALSE(p.WasSkipped("filter"));
  }
  {
    Pipeline p(Small(dir));
    p.Filter();
    EXPECT_TRUE(p.WasSkipped("filter"));
    EXPECT_TRUE(p.WasSkipped("build-pool"));
  }
  // A missing output is rebuilt.
  fs::remove(dir / "space.jsonl");
  {
    Pipeline p(Small(dir));
    p.Filter();
    EXPECT_FALSE(p.WasSkipped("filter"));
    EXPECT_TRUE(p.WasSkipped("sample-concepts"));
  }
  // A changed input key reruns the stage.
  {
    RunConfig c = Small(dir);
    c.thresholds.max_rate = 0.09;
    Pipeline p(c);
    p.Filter();
    EXPECT_FALSE(p.WasSkipped("filter"));
  }
}

TEST(Pipeline, TamperedArtifactRaises) {
  const fs::path dir = testing::TempDir("tamper");
  {
    Pipeline p(Small(dir));
    p.BuildPool();
  }
  std::ofstream(dir / "pool.jsonl", std::ios::app) << "\n";
  Pipeline p(Small(dir));
  EXPECT_EQ(Code([&] { p.BuildPool(); }), ErrorCode::kDigestMismatch);
}

TEST(Pipeline, SpaceAndSignaturesRoundTrip) {
  const fs::path dir = testing::TempDir("space");
  Pipeline p(Small(dir));
  const HypothesisSpace& space = p.space();
  const HypothesisSpace back = ReadSpace(dir);
  ASSERT_EQ(back.size(), space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    EXPECT_EQ(back.concepts[i].id, space.concepts[i].id);
    EXPECT_EQ(back.concepts[i].tokens, space.concepts[i].tokens);
    EXPECT_EQ(back.concepts[i].signature.bits, space.concepts[i].signature.bits);
    EXPECT_EQ(back.concepts[i].cluster, space.concepts[i].cluster);
  }
  const auto bits = ReadSignatureBits(dir / "signatures.bin");
  ASSERT_EQ(bits.size(), space.size());
  EXPECT_EQ(bits.back(), space.concepts.back().signature.bits);
  std::ifstream in(dir / "signatures.bin", std::ios::binary);
  char magic[8];
  in.read(magic, 8);
  EXPECT_EQ(std::string(magic, 8), "CURISIG1");
}

TEST(Pipeline, InstanceIidGapIsZeroAndReportsAreStable) {
  const fs::path dir = testing::TempDir("gap");
  std::string first;
  {
    Pipeline p(Small(dir));
    const MetricsReport r = p.CompGap(SplitKind::kInstanceIid, NegativesMode::kHard);
    EXPECT_EQ(r.gap_map, 0.0);
    EXPECT_EQ(r.gap_cba, 0.0);
    std::ifstream in(dir / "reports" / "instance_iid_hard.json");
    first.assign(std::istreambuf_iterator<char>(in), {});
  }
  fs::remove(dir / "reports" / "instance_iid_hard.json");
  Pipeline p(Small(dir));
  p.CompGap(SplitKind::kInstanceIid, NegativesMode::kHard);
  std::ifstream in(dir / "reports" / "instance_iid_hard.json");
  EXPECT_EQ(std::string(std::istreambuf_iterator<char>(in), {}), first);
}

TEST(Pipeline, DeterministicAcrossThreadsAndResume) {
  const fs::path a = testing::TempDir("det_a");
  const fs::path b = testing::TempDir("det_b");
  Pipeline(Small(a, 1)).All();
  {
    // Partial run, then a resumed full run with more threads.
    Pipeline p(Small(b, 3));
    p.Split(SplitKind::kBindingShape);
  }
  Pipeline(Small(b, 3)).All();
  const auto ta = Tree(a);
  EXPECT_EQ(ta, Tree(b));
  EXPECT_TRUE(ta.count("summary.csv"));
  EXPECT_TRUE(ta.count("episodes/binding_color_easy_test.jsonl"));
  const Manifest ma = Manifest::FromJson(nlohmann::json::parse(std::ifstream(a / "manifest.json")));
  const Manifest mb = Manifest::FromJson(nlohmann::json::parse(std::ifstream(b / "manifest.json")));
  ASSERT_EQ(ma.stages.size(), mb.stages.size());
  for (const auto& [name, rec] : ma.stages) {
    EXPECT_EQ(rec.key, mb.stages.at(name).key) << name;
    EXPECT_EQ(rec.outputs, mb.stages.at(name).outputs) << name;
  }
  std::ifstream csv(a / "summary.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header.rfind("split,negatives,", 0), 0u);
}

}  // namespace
}  // namespace curi
