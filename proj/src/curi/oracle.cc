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

#include "curi/oracle.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "curi/errors.h"
#include "curi/executor.h"

namespace curi {
namespace {

template <typename Consistent>
OraclePosterior Restrict(const OraclePrior& prior, Consistent&& consistent) {
  OraclePosterior post;
  double z = 0.0;
  for (std::size_t i = 0; i < prior.ids.size(); ++i) {
    if (consistent(i)) {
      post.consistent.push_back(i);
      z += prior.weights[i];
    }
  }
  if (post.consistent.empty()) {
    post.fallback = true;
    return post;
  }
  post.weights.reserve(post.consistent.size());
  for (std::size_t i : post.consistent) post.weights.push_back(prior.weights[i] / z);
  return post;
}

void RequirePositions(const OraclePrior& prior) {
  if (prior.positions.size() != prior.ids.size()) {
    throw Error(ErrorCode::kInvalidArgument, "prior has no space positions");
  }
}

}  // namespace

double UnnormalizedPrior(int length) { return std::exp(-kLengthPriorRate * length); }

std::string_view OracleKindName(OracleKind kind) {
  return kind == OracleKind::kStrong ? "strong" : "weak";
}

OraclePrior MakePrior(OracleKind kind, std::span<const std::uint64_t> ids,
                      std::span<const int> lengths) {
  if (ids.empty()) {
    throw Error(ErrorCode::kEmptyHypothesisSet,
                std::string(OracleKindName(kind)) + " oracle has no hypotheses");
  }
  if (ids.size() != lengths.size()) {
    throw Error(ErrorCode::kInvalidArgument, "ids and lengths differ in size");
  }
  OraclePrior p;
  p.kind = kind;
  p.ids.assign(ids.begin(), ids.end());
  p.weights.reserve(ids.size());
  double z = 0.0;
  for (int l : lengths) {
    p.weights.push_back(UnnormalizedPrior(l));
    z += p.weights.back();
  }
  for (double& w : p.weights) w /= z;
  return p;
}

OraclePrior MakePrior(OracleKind kind, const HypothesisSpace& space,
                      std::span<const std::uint64_t> ids) {
  std::vector<int> lengths;
  std::vector<std::size_t> positions;
  lengths.reserve(ids.size());
  positions.reserve(ids.size());
  for (auto id : ids) {
    auto pos = space.Find(id);
    if (!pos) {
      throw Error(ErrorCode::kInvalidArgument,
                  "concept " + std::to_string(id) + " is not in the space");
    }
    positions.push_back(*pos);
    lengths.push_back(space.concepts[*pos].length);
  }
  OraclePrior p = MakePrior(kind, ids, lengths);
  p.positions = std::move(positions);
  return p;
}

OraclePrior StrongPrior(const HypothesisSpace& space, const SplitAssignment& split) {
  std::vector<char> member(space.size(), 0);
  for (const auto* side : {&split.train, &split.test}) {
    for (auto id : *side) {
      if (auto p = space.Find(id)) member[*p] = 1;
    }
  }
  std::vector<std::uint64_t> ids;
  for (std::size_t p = 0; p < space.size(); ++p) {
    if (member[p]) ids.push_back(space.concepts[p].id);
  }
  return MakePrior(OracleKind::kStrong, space, ids);
}

OraclePrior WeakPrior(const HypothesisSpace& space, const SplitAssignment& split) {
  return MakePrior(OracleKind::kWeak, space, split.train);
}

OraclePosterior Posterior(const OraclePrior& prior, const HypothesisSpace& space,
                          std::span<const LabeledScene> support) {
  RequirePositions(prior);
  for (const auto& ex : support) {
    if (ex.scene >= space.pool_size) {
      throw Error(ErrorCode::kInvalidArgument,
                  "scene " + std::to_string(ex.scene) + " is outside the indexed pool");
    }
  }
  return Restrict(prior, [&](std::size_t i) {
    const BitVector& bits = space.concepts[prior.positions[i]].signature.bits;
    for (const auto& ex : support) {
      if (bits.Get(ex.scene) != ex.label) return false;
    }
    return true;
  });
}

OraclePosterior PosteriorByEvaluation(const OraclePrior& prior,
                                      const HypothesisSpace& space,
                                      std::span<const LabeledScene> support,
                                      std::span<const Scene> scenes) {
  RequirePositions(prior);
  if (scenes.size() != support.size()) {
    throw Error(ErrorCode::kInvalidArgument, "support and scenes differ in size");
  }
  return Restrict(prior, [&](std::size_t i) {
    const Concept& h = space.concepts[prior.positions[i]].hypothesis;
    for (std::size_t k = 0; k < support.size(); ++k) {
      if (Evaluate(h, scenes[k]) != support[k].label) return false;
    }
    return true;
  });
}

double Predictive(const OraclePrior& prior, const OraclePosterior& post,
                  const HypothesisSpace& space, std::uint64_t scene) {
  if (post.fallback) return 0.5;
  RequirePositions(prior);
  double p = 0.0;
  for (std::size_t k = 0; k < post.consistent.size(); ++k) {
    const std::size_t pos = prior.positions[post.consistent[k]];
    if (space.concepts[pos].signature.bits.Get(scene)) p += post.weights[k];
  }
  return std::min(p, 1.0);
}

std::vector<double> ScorePoolScenes(const OraclePrior& prior,
                                    const OraclePosterior& post,
                                    const HypothesisSpace& space,
                                    std::span<const std::uint64_t> scenes) {
  std::vector<double> out;
  out.reserve(scenes.size());
  for (auto s : scenes) out.push_back(Predictive(prior, post, space, s));
  return out;
}

}  // namespace curi
