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

#include "curi/splits.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "curi/errors.h"
#include "curi/rng.h"

namespace curi {
namespace {

using Pairs = std::vector<std::pair<std::string, std::string>>;

Pairs DefaultCountingPairs() {
  std::vector<std::string> values;
  for (auto n : kColorNames) values.emplace_back(n);
  for (auto n : kShapeNames) values.emplace_back(n);
  for (auto n : kMaterialNames) values.emplace_back(n);
  for (auto n : kSizeNames) values.emplace_back(n);
  for (int l = kMinLocation; l <= kMaxLocation; ++l) values.push_back(std::to_string(l));
  Pairs all;
  for (int number = 1; number <= 3; ++number) {
    for (const auto& v : values) all.emplace_back(std::to_string(number), v);
  }
  Rng rng(0);
  return rng.SampleWithoutReplacement(all, 5);
}

bool Contains(const TokenString& tokens, std::string_view t) {
  return std::find(tokens.begin(), tokens.end(), t) != tokens.end();
}

std::vector<std::size_t> Positions(const HypothesisSpace& space,
                                   const std::vector<std::uint64_t>& ids) {
  std::vector<std::size_t> out;
  out.reserve(ids.size());
  for (auto id : ids) {
    if (auto p = space.Find(id)) out.push_back(*p);
  }
  return out;
}

std::vector<std::uint64_t> IdsInSpaceOrder(const HypothesisSpace& space,
                                           std::vector<std::size_t> positions) {
  std::sort(positions.begin(), positions.end());
  std::vector<std::uint64_t> out;
  out.reserve(positions.size());
  for (auto p : positions) out.push_back(space.concepts[p].id);
  return out;
}

// Moves whole synonym clusters (restricted to `side`) out of `side` into the
// returned list. Takes floor(fraction * #clusters) clusters, keeping at
// least one cluster on `side`.
std::vector<std::size_t> CarveClusters(const HypothesisSpace& space,
                                       std::vector<std::size_t>& side,
                                       double fraction, Rng rng, bool at_least_one) {
  std::vector<std::size_t> cluster_ids;
  std::unordered_map<std::size_t, std::vector<std::size_t>> members;
  for (auto p : side) {
    const std::size_t c = space.concepts[p].cluster;
    auto& m = members[c];
    if (m.empty()) cluster_ids.push_back(c);
    m.push_back(p);
  }
  std::sort(cluster_ids.begin(), cluster_ids.end());
  rng.Shuffle(cluster_ids);
  auto take = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(cluster_ids.size())));
  if (at_least_one && take == 0 && fraction > 0) take = 1;
  if (cluster_ids.size() <= 1) {
    take = 0;
  } else if (take >= cluster_ids.size()) {
    take = cluster_ids.size() - 1;
  }
  std::vector<std::size_t> carved;
  std::unordered_set<std::size_t> moved;
  for (std::size_t i = 0; i < take; ++i) {
    for (auto p : members[cluster_ids[i]]) {
      carved.push_back(p);
      moved.insert(p);
    }
  }
  std::erase_if(side, [&](std::size_t p) { return moved.count(p) > 0; });
  return carved;
}

void CheckToken(std::string_view t) {
  if (!IsVocabularyToken(t)) {
    throw Error(ErrorCode::kInvalidConfig,
                "holdout token outside the vocabulary: " + std::string(t));
  }
}

}  // namespace

std::string_view SplitKindName(SplitKind kind) {
  switch (kind) {
    case SplitKind::kInstanceIid: return "instance_iid";
    case SplitKind::kConceptIid: return "concept_iid";
    case SplitKind::kCounting: return "counting";
    case SplitKind::kExtrinsic: return "extrinsic";
    case SplitKind::kIntrinsic: return "intrinsic";
    case SplitKind::kBoolean: return "boolean";
    case SplitKind::kComplexity: return "complexity";
    case SplitKind::kBindingColor: return "binding_color";
    case SplitKind::kBindingShape: return "binding_shape";
  }
  return "";
}

SplitKind ParseSplitKind(std::string_view name) {
  for (SplitKind k : kAllSplitKinds) {
    if (SplitKindName(k) == name) return k;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown split kind: " + std::string(name));
}

bool IsCompositional(SplitKind kind) { return kind != SplitKind::kInstanceIid; }

HoldoutSpec HoldoutSpec::Default(SplitKind kind, std::uint64_t seed) {
  HoldoutSpec s;
  s.kind = kind;
  s.seed = seed;
  switch (kind) {
    case SplitKind::kBoolean:
      s.pairs = {{"green", "or"}, {"purple", "and"}, {"cyan", "and"},
                 {"red", "or"},   {"green", "and"}};
      break;
    case SplitKind::kIntrinsic:
      s.pairs = {{"green", "metal"}, {"purple", "rubber"}, {"cyan", "rubber"},
                 {"red", "metal"},   {"green", "rubber"}};
      break;
    case SplitKind::kExtrinsic:
      s.pairs = {{"7", "gray"},   {"1", "red"},    {"3", "purple"}, {"1", "blue"},
                 {"8", "cyan"},   {"5", "yellow"}, {"5", "green"},  {"3", "yellow"},
                 {"7", "purple"}, {"2", "blue"},   {"3", "cyan"}};
      break;
    case SplitKind::kCounting:
      s.pairs = DefaultCountingPairs();
      break;
    case SplitKind::kBindingColor:
      s.tokens = {"purple", "cyan", "yellow"};
      break;
    case SplitKind::kBindingShape:
      s.tokens = {"cylinder"};
      break;
    default:
      break;
  }
  return s;
}

void HoldoutSpec::Validate() const {
  for (const auto& [a, b] : pairs) {
    CheckToken(a);
    CheckToken(b);
  }
  for (const auto& t : tokens) CheckToken(t);
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "test_fraction must lie in (0, 1)");
  }
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "val_fraction must lie in [0, 1)");
  }
}

nlohmann::ordered_json HoldoutSpec::ToJson() const {
  nlohmann::ordered_json j;
  switch (kind) {
    case SplitKind::kBoolean:
    case SplitKind::kIntrinsic:
    case SplitKind::kExtrinsic:
    case SplitKind::kCounting: {
      nlohmann::ordered_json p = nlohmann::ordered_json::array();
      for (const auto& [a, b] : pairs) p.push_back({a, b});
      j["pairs"] = std::move(p);
      break;
    }
    case SplitKind::kBindingColor:
    case SplitKind::kBindingShape:
      j["tokens"] = tokens;
      break;
    case SplitKind::kComplexity:
      j["max_train_length"] = max_train_length;
      break;
    case SplitKind::kConceptIid:
      j["test_fraction"] = test_fraction;
      break;
    case SplitKind::kInstanceIid:
      break;
  }
  j["val_fraction"] = val_fraction;
  j["seed"] = seed;
  return j;
}

HoldoutSpec HoldoutSpec::FromJson(const nlohmann::json& j, SplitKind kind) {
  HoldoutSpec s;
  s.kind = kind;
  if (j.contains("pairs")) {
    for (const auto& p : j.at("pairs")) {
      s.pairs.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
    }
  }
  if (j.contains("tokens")) s.tokens = j.at("tokens").get<std::vector<std::string>>();
  s.max_train_length = j.value("max_train_length", s.max_train_length);
  s.test_fraction = j.value("test_fraction", s.test_fraction);
  s.val_fraction = j.value("val_fraction", s.val_fraction);
  s.seed = j.value("seed", s.seed);
  return s;
}

Pairs CountingPairs(const Concept& c) {
  Pairs out;
  VisitExprs(c.body, [&](const Expr& e) {
    if (e.op != Op::kEq && e.op != Op::kGt) return;
    for (int side = 0; side < 2; ++side) {
      const Expr& count = e.args[side];
      const Expr& other = e.args[1 - side];
      if (count.op == Op::kCountEq && count.args[1].op == Op::kConstant &&
          other.op == Op::kConstant && other.type == ValueType::kInteger) {
        out.emplace_back(std::to_string(other.value),
                         ValueToken(count.args[1].type, count.args[1].value));
      }
    }
  });
  return out;
}

bool MatchesHoldout(const HoldoutSpec& spec, const SpaceConcept& c) {
  const TokenString& t = c.tokens;
  auto has_pair = [&](const auto& extra) {
    for (const auto& [a, b] : spec.pairs) {
      if (Contains(t, a) && Contains(t, b) && extra()) return true;
    }
    return false;
  };
  switch (spec.kind) {
    case SplitKind::kBoolean:
      return has_pair([] { return true; });
    case SplitKind::kIntrinsic:
      return has_pair([&] { return Contains(t, "material?"); });
    case SplitKind::kExtrinsic:
      return has_pair([&] {
        return Contains(t, "locationX?") || Contains(t, "locationY?");
      });
    case SplitKind::kCounting: {
      const Pairs found = CountingPairs(c.hypothesis);
      for (const auto& p : found) {
        if (std::find(spec.pairs.begin(), spec.pairs.end(), p) != spec.pairs.end()) {
          return true;
        }
      }
      return false;
    }
    case SplitKind::kBindingColor:
    case SplitKind::kBindingShape:
      for (const auto& tok : spec.tokens) {
        if (Contains(t, tok)) return true;
      }
      return false;
    case SplitKind::kComplexity:
      return c.length > spec.max_train_length;
    case SplitKind::kInstanceIid:
    case SplitKind::kConceptIid:
      return false;
  }
  return false;
}

nlohmann::ordered_json SplitAssignment::ToJson() const {
  nlohmann::ordered_json j;
  j["kind"] = SplitKindName(kind);
  j["spec"] = spec.ToJson();
  j["train"] = train;
  j["val"] = val;
  j["test"] = test;
  return j;
}

SplitAssignment SplitAssignment::FromJson(const nlohmann::json& j) {
  SplitAssignment a;
  try {
    a.kind = ParseSplitKind(j.at("kind").get<std::string>());
    a.spec = HoldoutSpec::FromJson(j.at("spec"), a.kind);
    a.train = j.at("train").get<std::vector<std::uint64_t>>();
    a.val = j.at("val").get<std::vector<std::uint64_t>>();
    a.test = j.at("test").get<std::vector<std::uint64_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("malformed split: ") + e.what());
  }
  return a;
}

SplitAssignment Assign(const HypothesisSpace& space, const HoldoutSpec& spec) {
  spec.Validate();
  SplitAssignment a;
  a.kind = spec.kind;
  a.spec = spec;
  const Rng root(spec.seed);
  std::vector<std::size_t> all(space.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  if (spec.kind == SplitKind::kInstanceIid) {
    a.train = a.val = a.test = IdsInSpaceOrder(space, all);
  } else {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    if (spec.kind == SplitKind::kConceptIid) {
      train = all;
      test = CarveClusters(space, train, spec.test_fraction,
                           root.Substream("concept_iid", 0), true);
    } else {
      for (auto p : all) {
        (MatchesHoldout(spec, space.concepts[p]) ? test : train).push_back(p);
      }
    }
    std::vector<std::size_t> val =
        CarveClusters(space, train, spec.val_fraction, root.Substream("val", 0), false);
    a.train = IdsInSpaceOrder(space, std::move(train));
    a.val = IdsInSpaceOrder(space, std::move(val));
    a.test = IdsInSpaceOrder(space, std::move(test));
  }
  if (a.train.empty() || a.test.empty()) {
    throw Error(ErrorCode::kDegenerateSplit,
                std::string(SplitKindName(spec.kind)) + ": train has " +
                    std::to_string(a.train.size()) + " and test has " +
                    std::to_string(a.test.size()) + " concepts");
  }
  return a;
}

ValidationReport Validate(const SplitAssignment& a, const HypothesisSpace& space) {
  ValidationReport r;
  r.train = a.train.size();
  r.val = a.val.size();
  r.test = a.test.size();
  auto violation = [&](std::string what) { r.violations.push_back(std::move(what)); };

  auto check_ids = [&](const std::vector<std::uint64_t>& ids, const char* side) {
    std::set<std::uint64_t> seen;
    for (auto id : ids) {
      if (!space.Find(id)) violation(std::string(side) + " has unknown id " + std::to_string(id));
      if (!seen.insert(id).second) violation(std::string(side) + " repeats id " + std::to_string(id));
    }
  };
  check_ids(a.train, "train");
  check_ids(a.val, "val");
  check_ids(a.test, "test");
  if (a.train.empty()) violation("train is empty");
  if (a.test.empty()) violation("test is empty");

  std::vector<std::uint64_t> all;
  for (const auto& c : space.concepts) all.push_back(c.id);
  auto sorted = [](std::vector<std::uint64_t> v) {
    std::sort(v.begin(), v.end());
    return v;
  };

  if (a.kind == SplitKind::kInstanceIid) {
    if (sorted(a.train) != sorted(all)) violation("instance_iid: train differs from H");
    if (sorted(a.test) != sorted(a.train)) violation("instance_iid: test differs from train");
    return r;
  }

  std::unordered_map<std::uint64_t, int> side_of;
  int overlaps = 0;
  for (int s = 0; s < 3; ++s) {
    const auto& ids = s == 0 ? a.train : s == 1 ? a.val : a.test;
    for (auto id : ids) {
      if (!side_of.emplace(id, s).second) ++overlaps;
    }
  }
  if (overlaps > 0) violation(std::to_string(overlaps) + " concepts on more than one side");
  if (side_of.size() != all.size()) {
    violation("coverage: " + std::to_string(side_of.size()) + " of " +
              std::to_string(all.size()) + " concepts assigned");
  }

  if (a.kind == SplitKind::kConceptIid) {
    for (std::size_t c = 0; c < space.clusters.size(); ++c) {
      std::set<int> sides;
      for (auto p : space.clusters[c]) {
        auto it = side_of.find(space.concepts[p].id);
        if (it != side_of.end()) sides.insert(it->second);
      }
      if (sides.size() > 1) {
        violation("synonym cluster " + std::to_string(c) + " spans splits");
      }
    }
    return r;
  }

  for (auto p : Positions(space, a.test)) {
    if (!MatchesHoldout(a.spec, space.concepts[p])) {
      violation("test concept " + std::to_string(space.concepts[p].id) +
                " does not match the holdout predicate");
    }
  }
  for (const auto* side : {&a.train, &a.val}) {
    for (auto p : Positions(space, *side)) {
      if (MatchesHoldout(a.spec, space.concepts[p])) {
        violation("train/val concept " + std::to_string(space.concepts[p].id) +
                  " matches the holdout predicate");
      }
    }
  }
  return r;
}

}  // namespace curi
