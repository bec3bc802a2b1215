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

#ifndef CURI_EPISODES_H_
#define CURI_EPISODES_H_

// Few-shot episodes: a support set and a query set of pool scenes, each with
// 5 positives and 20 negatives of one concept.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "curi/filter.h"
#include "curi/rng.h"
#include "curi/scene.h"
#include "curi/splits.h"
#include "json.hpp"

namespace curi {

inline constexpr int kPositivesPerSet = 5;
inline constexpr int kNegativesPerSet = 20;

enum class NegativesMode : std::uint8_t { kHard, kEasy };

std::string_view NegativesModeName(NegativesMode mode);  // "hard" | "easy"
NegativesMode ParseNegativesMode(std::string_view name);

enum class EpisodePart : std::uint8_t { kTrain, kVal, kTest };

std::string_view EpisodePartName(EpisodePart part);  // "train" | "val" | "test"
EpisodePart ParseEpisodePart(std::string_view name);

struct Example {
  std::uint64_t scene = 0;
  bool label = false;
  // Hard negatives: the first recorded alternative true on this scene.
  // Empty for positives, easy negatives and random top-ups.
  std::optional<std::uint64_t> cover;

  friend bool operator==(const Example&, const Example&) = default;
};

struct Episode {
  std::uint64_t idx = 0;
  std::uint64_t concept_id = 0;
  SplitKind kind = SplitKind::kInstanceIid;
  NegativesMode mode = NegativesMode::kHard;
  std::vector<Example> support;  // positives first, then negatives
  std::vector<Example> query;
  std::vector<std::uint64_t> alt_support;  // alternatives from support positives
  std::vector<std::uint64_t> alt_query;    // alternatives from query positives
  std::uint64_t seed = 0;                  // key of the episode's stream

  friend bool operator==(const Episode&, const Episode&) = default;
};

struct EpisodeOptions {
  // Forbid a scene from appearing twice anywhere in the episode.
  bool disjoint_support_query = true;
};

// Draws a concept from `side` (ids in space order) with probability
// proportional to exp(-0.2 * length).
class ConceptDrawer {
 public:
  ConceptDrawer(const HypothesisSpace& space, std::span<const std::uint64_t> side);
  std::uint64_t Draw(Rng& rng) const;

 private:
  std::vector<std::uint64_t> ids_;
  std::vector<double> cumulative_;
};

// Every concept other than `h` that is true on all of `positives` (pool scene
// ids), in space order.
std::vector<std::uint64_t> FindAlternatives(std::uint64_t h,
                                            std::span<const std::uint64_t> positives,
                                            const HypothesisSpace& space);

// Same, by running each concept on the given scenes.
std::vector<std::uint64_t> FindAlternativesByEvaluation(
    std::uint64_t h, std::span<const Scene> positives, const HypothesisSpace& space);

// Throws kInsufficientPositives when h has too few true scenes for two
// disjoint positive sets and kInsufficientScenes when the pool cannot supply
// the negatives.
Episode SampleEpisode(std::uint64_t h, const HypothesisSpace& space,
                      NegativesMode mode, Rng rng, const EpisodeOptions& options = {});

// Episode i draws its concept from the `part` side of the split with the
// stream Rng(seed).Substream("episodes/<kind>/<part>", i). The concept and
// positives do not depend on the negatives mode, so hard and easy sets pair
// up episode by episode.
std::vector<Episode> BuildEpisodeSet(const SplitAssignment& split, EpisodePart part,
                                     const HypothesisSpace& space, std::size_t count,
                                     NegativesMode mode, std::uint64_t seed,
                                     const EpisodeOptions& options = {},
                                     int threads = 0);

// Problems found by re-running the concept on every scene of the episode.
std::vector<std::string> AuditEpisode(const Episode& e, const HypothesisSpace& space,
                                      const ScenePool& pool);

nlohmann::ordered_json EpisodeToJson(const Episode& e);
Episode EpisodeFromJson(const nlohmann::json& j);
void WriteEpisodesJsonl(std::ostream& out, std::span<const Episode> episodes);
std::vector<Episode> ReadEpisodesJsonl(std::istream& in);

}  // namespace curi

#endif  // CURI_EPISODES_H_
