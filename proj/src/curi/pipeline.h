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

#ifndef CURI_PIPELINE_H_
#define CURI_PIPELINE_H_

// End-to-end benchmark generation with on-disk artifacts and a manifest of
// per-stage input keys and output digests.
//
// Layout under the output directory:
//   concepts.jsonl            raw grammar samples
//   pool.jsonl                scene pool
//   space.jsonl, space.json   accepted concepts and filter statistics
//   signatures.jsonl/.bin     evaluation signatures of accepted concepts
//   splits/<kind>.json
//   episodes/<kind>_<mode>_<part>.jsonl
//   mappool.json              the mAP scene pool T
//   reports/<kind>_<mode>.json (+ _strong.jsonl, _weak.jsonl)
//   summary.csv, summary.json
//   manifest.json

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curi/episodes.h"
#include "curi/filter.h"
#include "curi/grammar.h"
#include "curi/metrics.h"
#include "curi/scene.h"
#include "curi/splits.h"
#include "json.hpp"

namespace curi {

struct RunConfig {
  std::uint64_t seed = 0;
  std::uint64_t raw_concepts = 50'000;
  std::uint64_t pool_size = 100'000;
  FilterThresholds thresholds;
  std::vector<SplitKind> splits{kAllSplitKinds.begin(), kAllSplitKinds.end()};
  std::uint64_t episodes_train = 2'000;
  std::uint64_t episodes_val = 200;
  std::uint64_t episodes_test = 500;
  NegativesMode negatives = NegativesMode::kHard;
  int map_k = 3;
  std::string out = "out";
  ObjectCountRange objects;
  int complexity_max_train_length = 10;
  double concept_iid_test_fraction = 0.2;
  double val_fraction = 0.1;
  bool disjoint_support_query = true;
  int threads = 0;  // 0: CURI_THREADS or hardware concurrency
  GrammarConfig grammar = GrammarConfig::Default();
  // "weight.<NT>.<label>" overrides in the order given.
  std::vector<std::pair<std::string, double>> weight_overrides;

  // Applies one `key = value` setting. Throws kInvalidConfig.
  void Set(std::string_view key, std::string_view value);
  // Parses the flat text format: one `key = value` per line, `#` comments.
  static RunConfig Parse(std::string_view text);
  static RunConfig Load(const std::filesystem::path& path);
  void Validate() const;

  HoldoutSpec SplitSpec(SplitKind kind) const;
  std::uint64_t StageSeed(std::string_view stage) const;
  // Excludes `out` and `threads`, which do not affect outputs.
  nlohmann::ordered_json ToJson() const;
};

struct StageRecord {
  std::string key;
  std::map<std::string, std::string> outputs;  // relative path -> sha256 hex
  double seconds = 0.0;
};

struct Manifest {
  std::string version;
  nlohmann::ordered_json config;
  std::map<std::string, StageRecord> stages;

  nlohmann::ordered_json ToJson() const;
  static Manifest FromJson(const nlohmann::json& j);
};

std::string LibraryVersion();

// Order of splits in the summary: descending hard-negative mAP gap, ties by
// the canonical split order.
std::vector<SplitKind> SummaryOrder(const std::vector<MetricsReport>& reports);

class Pipeline {
 public:
  explicit Pipeline(RunConfig config);
  ~Pipeline();

  const RunConfig& config() const { return config_; }
  const std::filesystem::path& out() const { return out_; }
  const Manifest& manifest() const { return manifest_; }

  // Each stage runs its missing upstream stages first, and is skipped when
  // the manifest holds the same input key and the outputs still match their
  // digests. A recorded output whose digest no longer matches raises
  // kDigestMismatch.
  void SampleConcepts();
  void BuildPool();
  void Filter();
  void Split(SplitKind kind);
  void Episodes(SplitKind kind, NegativesMode mode);
  void BuildMapPool();
  MetricsReport CompGap(SplitKind kind, NegativesMode mode);
  // Every configured split under both negatives modes, then the summary.
  std::vector<MetricsReport> All();

  // Loaded artifacts (stages run on demand).
  const ScenePool& pool();
  const HypothesisSpace& space();
  const SplitAssignment& split(SplitKind kind);
  const MapPool& map_pool();
  std::vector<Episode> LoadEpisodes(SplitKind kind, NegativesMode mode,
                                    EpisodePart part);

  // Whether the last call to each stage name was served from cache.
  bool WasSkipped(const std::string& stage) const;

 private:
  struct Cache;

  bool Fresh(const std::string& stage, const std::string& key);
  void Record(const std::string& stage, const std::string& key,
              const std::vector<std::string>& outputs, double seconds);
  // Verifies the recorded digest of a consumed artifact.
  void Require(const std::string& stage, const std::string& output);
  std::string Digest(const std::string& stage, const std::string& output) const;
  void SaveManifest();
  int threads() const;

  RunConfig config_;
  std::filesystem::path out_;
  Manifest manifest_;
  std::map<std::string, bool> skipped_;
  std::unique_ptr<Cache> cache_;
};

// Packed signature bits: magic "CURISIG1", u64 concept count, u64 pool size,
// then for each concept ceil(pool/64) little-endian u64 words, bit i of the
// vector at bit i % 64 of word i / 64.
void WriteSignatureBits(const std::filesystem::path& path, const HypothesisSpace& space);
std::vector<BitVector> ReadSignatureBits(const std::filesystem::path& path);

void WriteSpace(const std::filesystem::path& dir, const HypothesisSpace& space);
HypothesisSpace ReadSpace(const std::filesystem::path& dir);

}  // namespace curi

#endif  // CURI_PIPELINE_H_
