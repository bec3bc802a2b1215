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

#include "curi/filter.h"

#include <cmath>
#include <string>
#include <unordered_set>

#include "curi/errors.h"
#include "curi/parallel.h"

namespace curi {
namespace {

bool UsesOthers(const Expr& body) {
  bool found = false;
  VisitExprs(body, [&](const Expr& e) {
    if (e.op == Op::kSetProperty && e.set == SetRef::kOthers) found = true;
  });
  return found;
}

bool HasSelfComparison(const Expr& body) {
  bool found = false;
  VisitExprs(body, [&](const Expr& e) {
    if ((e.op == Op::kEq || e.op == Op::kGt) &&
        e.args[0].op == Op::kObjectProperty &&
        e.args[1].op == Op::kObjectProperty &&
        e.args[0].property == e.args[1].property) {
      found = true;
    }
  });
  return found;
}

bool HasSceneSetVersusObject(const Expr& body) {
  bool found = false;
  VisitExprs(body, [&](const Expr& e) {
    if ((e.op == Op::kAll || e.op == Op::kAny || e.op == Op::kCountEq) &&
        e.args[0].set == SetRef::kScene &&
        e.args[1].op == Op::kObjectProperty &&
        e.args[1].property == e.args[0].property) {
      found = true;
    }
  });
  return found;
}

struct Outcome {
  enum class Kind : std::uint8_t { kPending, kTooFrequent, kTooRare, kAccepted };
  Kind kind = Kind::kPending;
  EvaluationSignature signature;
};

}  // namespace

std::string_view RejectReasonName(RejectReason r) {
  switch (r) {
    case RejectReason::kForAllWithOthers: return "R1";
    case RejectReason::kSelfComparison: return "R2";
    case RejectReason::kSceneSetVersusObject: return "R3";
  }
  return "";
}

std::optional<RejectReason> StructuralReject(const Concept& c) {
  if (c.quantifier == Quantifier::kForAll && UsesOthers(c.body)) {
    return RejectReason::kForAllWithOthers;
  }
  if (HasSelfComparison(c.body)) return RejectReason::kSelfComparison;
  if (HasSceneSetVersusObject(c.body)) return RejectReason::kSceneSetVersusObject;
  return std::nullopt;
}

void FilterThresholds::Validate() const {
  if (!(max_rate > 0.0 && max_rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "max_rate must lie in (0, 1]");
  }
}

bool Interesting(std::uint64_t true_count, std::uint64_t pool_size,
                 const FilterThresholds& t) {
  if (pool_size == 0) return false;
  const double rate =
      static_cast<double>(true_count) / static_cast<double>(pool_size);
  return rate <= t.max_rate && true_count >= t.min_true;
}

bool Interesting(const EvaluationSignature& sig, const FilterThresholds& t) {
  return Interesting(sig.true_count, sig.bits.size(), t);
}

std::uint64_t MaxTrueCount(std::uint64_t pool_size, double max_rate) {
  const double n = static_cast<double>(pool_size);
  auto ok = [&](std::uint64_t c) { return static_cast<double>(c) / n <= max_rate; };
  auto c = static_cast<std::uint64_t>(std::floor(max_rate * n));
  if (c > pool_size) c = pool_size;
  while (c > 0 && !ok(c)) --c;
  while (c < pool_size && ok(c + 1)) ++c;
  return c;
}

std::optional<std::size_t> HypothesisSpace::Find(std::uint64_t id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

void HypothesisSpace::RebuildIndex() {
  by_id_.clear();
  for (std::size_t i = 0; i < concepts.size(); ++i) by_id_[concepts[i].id] = i;
}

void AssignClusters(HypothesisSpace& space) {
  space.clusters.clear();
  std::map<SignatureHash, std::vector<std::size_t>> by_hash;  // -> cluster ids
  for (std::size_t i = 0; i < space.concepts.size(); ++i) {
    SpaceConcept& c = space.concepts[i];
    auto& candidates = by_hash[c.signature.hash];
    bool placed = false;
    for (std::size_t cid : candidates) {
      const auto& rep = space.concepts[space.clusters[cid].front()];
      if (rep.signature.bits == c.signature.bits) {
        space.clusters[cid].push_back(i);
        c.cluster = cid;
        placed = true;
        break;
      }
    }
    if (!placed) {
      c.cluster = space.clusters.size();
      candidates.push_back(c.cluster);
      space.clusters.push_back({i});
    }
  }
}

HypothesisSpace BuildSpace(std::span<const RawConcept> raw, const ScenePool& pool,
                           const FilterThresholds& thresholds, int threads) {
  thresholds.Validate();
  if (pool.empty()) throw Error(ErrorCode::kEmptyPool, "filter pool is empty");
  HypothesisSpace space;
  space.thresholds = thresholds;
  space.pool_seed = pool.seed();
  space.pool_size = pool.size();
  Provenance& prov = space.provenance;
  prov.raw = raw.size();

  struct Candidate {
    std::size_t raw_index;
    TokenString tokens;
  };
  std::vector<Candidate> candidates;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    TokenString tokens = SerializePostfix(raw[i].hypothesis);
    if (!seen.insert(JoinTokens(tokens)).second) {
      ++prov.duplicates;
      continue;
    }
    if (auto reason = StructuralReject(raw[i].hypothesis)) {
      switch (*reason) {
        case RejectReason::kForAllWithOthers: ++prov.rejected_r1; break;
        case RejectReason::kSelfComparison: ++prov.rejected_r2; break;
        case RejectReason::kSceneSetVersusObject: ++prov.rejected_r3; break;
      }
      continue;
    }
    candidates.push_back({i, std::move(tokens)});
  }

  const PoolIndex index(pool);
  const std::uint64_t max_true = MaxTrueCount(pool.size(), thresholds.max_rate);
  std::vector<Outcome> outcomes(candidates.size());
  ParallelFor(candidates.size(), threads, [&](std::size_t k) {
    const RawConcept& rc = raw[candidates[k].raw_index];
    auto bits = CompiledConcept::Compile(rc.hypothesis).Run(index, max_true);
    Outcome& out = outcomes[k];
    if (!bits) {
      out.kind = Outcome::Kind::kTooFrequent;
      return;
    }
    const std::uint64_t count = bits->Count();
    if (!Interesting(count, pool.size(), thresholds)) {
      out.kind = count >= thresholds.min_true ? Outcome::Kind::kTooFrequent
                                              : Outcome::Kind::kTooRare;
      return;
    }
    out.kind = Outcome::Kind::kAccepted;
    out.signature = MakeSignature(rc.id, std::move(*bits));
  });

  for (std::size_t k = 0; k < candidates.size(); ++k) {
    Outcome& out = outcomes[k];
    switch (out.kind) {
      case Outcome::Kind::kTooFrequent: ++prov.too_frequent; break;
      case Outcome::Kind::kTooRare: ++prov.too_rare; break;
      case Outcome::Kind::kAccepted: {
        const RawConcept& rc = raw[candidates[k].raw_index];
        SpaceConcept sc;
        sc.id = rc.id;
        sc.hypothesis = rc.hypothesis;
        sc.length = static_cast<int>(candidates[k].tokens.size());
        sc.tokens = std::move(candidates[k].tokens);
        sc.signature = std::move(out.signature);
        space.concepts.push_back(std::move(sc));
        break;
      }
      case Outcome::Kind::kPending: break;
    }
  }
  prov.accepted = space.concepts.size();
  if (space.concepts.empty()) {
    throw Error(ErrorCode::kEmptySpace,
                "no concept survived filtering (" + std::to_string(prov.raw) +
                    " raw samples, pool of " + std::to_string(pool.size()) + ")");
  }
  AssignClusters(space);
  space.RebuildIndex();
  return space;
}

ClusterStats SynonymClusters(const HypothesisSpace& space) {
  ClusterStats stats;
  stats.num_clusters = space.clusters.size();
  for (const auto& c : space.clusters) {
    ++stats.histogram[c.size()];
    stats.largest = std::max(stats.largest, c.size());
  }
  std::size_t best = 0;
  for (const auto& [size, count] : stats.histogram) {
    if (count > best) {
      best = count;
      stats.modal_size = size;
    }
  }
  return stats;
}

}  // namespace curi
