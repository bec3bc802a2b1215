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

#include "curi/episodes.h"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_set>

#include "curi/errors.h"
#include "curi/executor.h"
#include "curi/oracle.h"
#include "curi/parallel.h"

namespace curi {
namespace {

constexpr int kExamplesPerSet = kPositivesPerSet + kNegativesPerSet;
// Random top-up draws per needed negative before giving up.
constexpr int kTopUpAttempts = 4096;

const SpaceConcept& Lookup(const HypothesisSpace& space, std::uint64_t id) {
  auto pos = space.Find(id);
  if (!pos) {
    throw Error(ErrorCode::kInvalidArgument,
                "concept " + std::to_string(id) + " is not in the space");
  }
  return space.concepts[*pos];
}

class SetBuilder {
 public:
  SetBuilder(const HypothesisSpace& space, const SpaceConcept& h, NegativesMode mode,
             std::unordered_set<std::uint64_t>& used)
      : space_(space), h_(h), mode_(mode), used_(used) {}

  // Returns the examples and the alternatives found from the positives.
  std::vector<Example> Build(Rng pos_rng, Rng neg_rng,
                             std::vector<std::uint64_t>& alternatives) {
    const BitVector& bits = h_.signature.bits;
    std::vector<std::uint64_t> candidates;
    bits.ForEachSet([&](std::size_t s) {
      if (!used_.count(s)) candidates.push_back(s);
    });
    if (candidates.size() < kPositivesPerSet) {
      throw Error(ErrorCode::kInsufficientPositives,
                  "concept " + std::to_string(h_.id) + " has too few unused true scenes");
    }
    std::vector<Example> out;
    out.reserve(kExamplesPerSet);
    const auto positives = pos_rng.SampleWithoutReplacement(candidates, kPositivesPerSet);
    for (auto s : positives) {
      out.push_back({s, true, std::nullopt});
      used_.insert(s);
    }

    alternatives.clear();
    if (mode_ == NegativesMode::kHard) {
      alternatives = FindAlternatives(h_.id, positives, space_);
      BitVector covered(bits.size());
      for (auto id : alternatives) covered |= Lookup(space_, id).signature.bits;
      covered.AndNot(bits);
      std::vector<std::uint64_t> hard;
      covered.ForEachSet([&](std::size_t s) {
        if (!used_.count(s)) hard.push_back(s);
      });
      for (auto s : neg_rng.SampleWithoutReplacement(hard, kNegativesPerSet)) {
        out.push_back({s, false, CoverOf(alternatives, s)});
        used_.insert(s);
      }
    }
    TopUp(neg_rng, out);
    return out;
  }

 private:
  std::uint64_t CoverOf(const std::vector<std::uint64_t>& alternatives,
                        std::uint64_t scene) const {
    for (auto id : alternatives) {
      if (Lookup(space_, id).signature.bits.Get(scene)) return id;
    }
    return 0;  // unreachable: scene came from the union of alternatives
  }

  // Uniform h-false scenes not used yet, by rejection.
  void TopUp(Rng& rng, std::vector<Example>& out) {
    const BitVector& bits = h_.signature.bits;
    const std::uint64_t n = bits.size();
    int attempts = 0;
    while (out.size() < static_cast<std::size_t>(kExamplesPerSet)) {
      if (++attempts > kTopUpAttempts * kNegativesPerSet) {
        throw Error(ErrorCode::kInsufficientScenes,
                    "could not find enough unused negatives for concept " +
                        std::to_string(h_.id));
      }
      const std::uint64_t s = rng.Uniform(n);
      if (bits.Get(s) || used_.count(s)) continue;
      out.push_back({s, false, std::nullopt});
      used_.insert(s);
    }
  }

  const HypothesisSpace& space_;
  const SpaceConcept& h_;
  NegativesMode mode_;
  std::unordered_set<std::uint64_t>& used_;
};

}  // namespace

std::string_view NegativesModeName(NegativesMode mode) {
  return mode == NegativesMode::kHard ? "hard" : "easy";
}

NegativesMode ParseNegativesMode(std::string_view name) {
  if (name == "hard") return NegativesMode::kHard;
  if (name == "easy") return NegativesMode::kEasy;
  throw Error(ErrorCode::kInvalidArgument, "unknown negatives mode: " + std::string(name));
}

std::string_view EpisodePartName(EpisodePart part) {
  switch (part) {
    case EpisodePart::kTrain: return "train";
    case EpisodePart::kVal: return "val";
    case EpisodePart::kTest: return "test";
  }
  return "";
}

EpisodePart ParseEpisodePart(std::string_view name) {
  for (auto p : {EpisodePart::kTrain, EpisodePart::kVal, EpisodePart::kTest}) {
    if (EpisodePartName(p) == name) return p;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown episode part: " + std::string(name));
}

ConceptDrawer::ConceptDrawer(const HypothesisSpace& space,
                             std::span<const std::uint64_t> side)
    : ids_(side.begin(), side.end()) {
  if (ids_.empty()) {
    throw Error(ErrorCode::kEmptyHypothesisSet, "cannot draw from an empty split side");
  }
  double total = 0.0;
  cumulative_.reserve(ids_.size());
  for (auto id : ids_) {
    total += UnnormalizedPrior(Lookup(space, id).length);
    cumulative_.push_back(total);
  }
}

std::uint64_t ConceptDrawer::Draw(Rng& rng) const {
  const double u = rng.UniformDouble() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return ids_[static_cast<std::size_t>(it - cumulative_.begin())];
}

std::vector<std::uint64_t> FindAlternatives(std::uint64_t h,
                                            std::span<const std::uint64_t> positives,
                                            const HypothesisSpace& space) {
  std::vector<std::uint64_t> out;
  for (const auto& c : space.concepts) {
    if (c.id == h) continue;
    bool all = true;
    for (auto s : positives) {
      if (!c.signature.bits.Get(s)) {
        all = false;
        break;
      }
    }
    if (all) out.push_back(c.id);
  }
  return out;
}

std::vector<std::uint64_t> FindAlternativesByEvaluation(
    std::uint64_t h, std::span<const Scene> positives, const HypothesisSpace& space) {
  std::vector<std::uint64_t> out;
  for (const auto& c : space.concepts) {
    if (c.id == h) continue;
    if (std::all_of(positives.begin(), positives.end(),
                    [&](const Scene& s) { return Evaluate(c.hypothesis, s); })) {
      out.push_back(c.id);
    }
  }
  return out;
}

Episode SampleEpisode(std::uint64_t h, const HypothesisSpace& space,
                      NegativesMode mode, Rng rng, const EpisodeOptions& options) {
  const SpaceConcept& concept_h = Lookup(space, h);
  const std::uint64_t needed = options.disjoint_support_query ? 2 * kPositivesPerSet
                                                              : kPositivesPerSet;
  if (concept_h.signature.true_count < needed) {
    throw Error(ErrorCode::kInsufficientPositives,
                "concept " + std::to_string(h) + " is true on " +
                    std::to_string(concept_h.signature.true_count) + " scenes, needs " +
                    std::to_string(needed));
  }
  const std::uint64_t falses = space.pool_size - concept_h.signature.true_count;
  if (falses < (options.disjoint_support_query ? 2u : 1u) * kNegativesPerSet) {
    throw Error(ErrorCode::kInsufficientScenes,
                "pool has " + std::to_string(falses) + " negatives for concept " +
                    std::to_string(h));
  }

  Episode e;
  e.concept_id = h;
  e.mode = mode;
  e.seed = rng.key();
  std::unordered_set<std::uint64_t> used;
  {
    SetBuilder b(space, concept_h, mode, used);
    e.support = b.Build(rng.Substream("support_pos", 0), rng.Substream("support_neg", 0),
                        e.alt_support);
  }
  if (!options.disjoint_support_query) used.clear();
  {
    SetBuilder b(space, concept_h, mode, used);
    e.query = b.Build(rng.Substream("query_pos", 0), rng.Substream("query_neg", 0),
                      e.alt_query);
  }
  return e;
}

std::vector<Episode> BuildEpisodeSet(const SplitAssignment& split, EpisodePart part,
                                     const HypothesisSpace& space, std::size_t count,
                                     NegativesMode mode, std::uint64_t seed,
                                     const EpisodeOptions& options, int threads) {
  const std::vector<std::uint64_t>& side = part == EpisodePart::kTrain ? split.train
                                           : part == EpisodePart::kVal ? split.val
                                                                       : split.test;
  std::vector<Episode> out(count);
  if (count == 0) return out;
  const ConceptDrawer drawer(space, side);
  const std::string tag = "episodes/" + std::string(SplitKindName(split.kind)) + "/" +
                          std::string(EpisodePartName(part));
  const Rng root(seed);
  ParallelFor(count, threads, [&](std::size_t i) {
    Rng rng = root.Substream(tag, i);
    Rng concept_rng = rng.Substream("concept", 0);
    const std::uint64_t h = drawer.Draw(concept_rng);
    Episode e = SampleEpisode(h, space, mode, rng, options);
    e.idx = i;
    e.kind = split.kind;
    out[i] = std::move(e);
  });
  return out;
}

std::vector<std::string> AuditEpisode(const Episode& e, const HypothesisSpace& space,
                                      const ScenePool& pool) {
  std::vector<std::string> problems;
  auto problem = [&](std::string what) {
    problems.push_back("episode " + std::to_string(e.idx) + ": " + std::move(what));
  };
  auto pos = space.Find(e.concept_id);
  if (!pos) {
    problem("unknown concept");
    return problems;
  }
  const Concept& h = space.concepts[*pos].hypothesis;
  std::unordered_set<std::uint64_t> seen;
  auto check = [&](const std::vector<Example>& set, const std::vector<std::uint64_t>& alts,
                   const char* name) {
    int pos_count = 0;
    int neg_count = 0;
    for (const auto& ex : set) {
      if (ex.scene >= pool.size()) {
        problem(std::string(name) + " scene outside the pool");
        continue;
      }
      (ex.label ? pos_count : neg_count)++;
      if (Evaluate(h, pool[ex.scene]) != ex.label) {
        problem(std::string(name) + " label mismatch on scene " + std::to_string(ex.scene));
      }
      if (!seen.insert(ex.scene).second) {
        problem(std::string(name) + " reuses scene " + std::to_string(ex.scene));
      }
      if (ex.cover) {
        const bool recorded = std::find(alts.begin(), alts.end(), *ex.cover) != alts.end();
        auto cpos = space.Find(*ex.cover);
        if (ex.label || !recorded || !cpos ||
            !Evaluate(space.concepts[*cpos].hypothesis, pool[ex.scene])) {
          problem(std::string(name) + " unsound hard negative " + std::to_string(ex.scene));
        }
      }
    }
    if (pos_count != kPositivesPerSet || neg_count != kNegativesPerSet) {
      problem(std::string(name) + " has " + std::to_string(pos_count) + "/" +
              std::to_string(neg_count) + " examples");
    }
  };
  check(e.support, e.alt_support, "support");
  check(e.query, e.alt_query, "query");
  return problems;
}

namespace {

nlohmann::ordered_json ExamplesToJson(const std::vector<Example>& set) {
  nlohmann::ordered_json a = nlohmann::ordered_json::array();
  for (const auto& ex : set) {
    nlohmann::ordered_json j;
    j["scene"] = ex.scene;
    j["y"] = ex.label ? 1 : 0;
    if (ex.cover) j["cover"] = *ex.cover;
    a.push_back(std::move(j));
  }
  return a;
}

std::vector<Example> ExamplesFromJson(const nlohmann::json& a) {
  std::vector<Example> out;
  for (const auto& j : a) {
    Example ex;
    ex.scene = j.at("scene").get<std::uint64_t>();
    ex.label = j.at("y").get<int>() != 0;
    if (j.contains("cover")) ex.cover = j.at("cover").get<std::uint64_t>();
    out.push_back(ex);
  }
  return out;
}

}  // namespace

nlohmann::ordered_json EpisodeToJson(const Episode& e) {
  nlohmann::ordered_json j;
  j["idx"] = e.idx;
  j["concept_id"] = e.concept_id;
  j["split"] = SplitKindName(e.kind);
  j["mode"] = NegativesModeName(e.mode);
  j["support"] = ExamplesToJson(e.support);
  j["query"] = ExamplesToJson(e.query);
  j["alt_support"] = e.alt_support;
  j["alt_query"] = e.alt_query;
  j["seed"] = e.seed;
  return j;
}

Episode EpisodeFromJson(const nlohmann::json& j) {
  Episode e;
  try {
    e.idx = j.at("idx").get<std::uint64_t>();
    e.concept_id = j.at("concept_id").get<std::uint64_t>();
    e.kind = ParseSplitKind(j.at("split").get<std::string>());
    e.mode = ParseNegativesMode(j.at("mode").get<std::string>());
    e.support = ExamplesFromJson(j.at("support"));
    e.query = ExamplesFromJson(j.at("query"));
    e.alt_support = j.at("alt_support").get<std::vector<std::uint64_t>>();
    e.alt_query = j.at("alt_query").get<std::vector<std::uint64_t>>();
    e.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kIo, std::string("malformed episode: ") + ex.what());
  }
  return e;
}

void WriteEpisodesJsonl(std::ostream& out, std::span<const Episode> episodes) {
  for (const auto& e : episodes) out << EpisodeToJson(e).dump() << '\n';
}

std::vector<Episode> ReadEpisodesJsonl(std::istream& in) {
  std::vector<Episode> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::kIo, std::string("malformed episode line: ") + ex.what());
    }
    out.push_back(EpisodeFromJson(j));
  }
  return out;
}

}  // namespace curi
