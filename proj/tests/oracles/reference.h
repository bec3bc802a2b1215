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

#ifndef CURI_TESTS_ORACLES_REFERENCE_H_
#define CURI_TESTS_ORACLES_REFERENCE_H_

// Independent reference implementations used only by tests. None of these
// call the library code they check.

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "curi/scene.h"

namespace curi::reference {

// Evaluates a postfix token string directly on a scene: the body tokens are
// re-run on a value stack once per binding of x.
inline bool EvaluateTokens(const std::vector<std::string>& tokens, const Scene& scene) {
  struct Value {
    enum Kind { kObj, kSetAll, kSetOthers, kScalar, kList, kBool } kind;
    int scalar = 0;
    std::vector<int> list;
  };
  static const std::map<std::string, int> kConstants = [] {
    std::map<std::string, int> m;
    const char* colors[] = {"gray", "red", "blue", "green", "brown", "purple", "cyan", "yellow"};
    for (int i = 0; i < 8; ++i) m[colors[i]] = i;
    m["cube"] = 0;
    m["sphere"] = 1;
    m["cylinder"] = 2;
    m["rubber"] = 0;
    m["metal"] = 1;
    m["small"] = 0;
    m["large"] = 1;
    for (int i = 1; i <= 8; ++i) m[std::to_string(i)] = i;
    return m;
  }();
  auto prop = [](const SceneObject& o, const std::string& accessor) -> int {
    if (accessor == "color?") return o.color;
    if (accessor == "shape?") return o.shape;
    if (accessor == "material?") return o.material;
    if (accessor == "size?") return o.size;
    if (accessor == "locationX?") return o.locx;
    if (accessor == "locationY?") return o.locy;
    throw std::logic_error("not an accessor: " + accessor);
  };
  const std::string quantifier = tokens.back();
  auto body = [&](std::size_t b) {
    std::vector<Value> st;
    auto pop = [&] {
      Value v = st.back();
      st.pop_back();
      return v;
    };
    for (std::size_t t = 0; t + 1 < tokens.size(); ++t) {
      const std::string& tok = tokens[t];
      if (tok == "x") {
        st.push_back({Value::kObj});
      } else if (tok == "S") {
        st.push_back({Value::kSetAll});
      } else if (tok == "S_{-x}") {
        st.push_back({Value::kSetOthers});
      } else if (tok.back() == '?') {
        Value target = pop();
        if (target.kind == Value::kObj) {
          st.push_back({Value::kScalar, prop(scene.objects[b], tok)});
        } else {
          Value list{Value::kList};
          for (std::size_t i = 0; i < scene.objects.size(); ++i) {
            if (target.kind == Value::kSetOthers && i == b) continue;
            list.list.push_back(prop(scene.objects[i], tok));
          }
          st.push_back(list);
        }
      } else if (kConstants.count(tok)) {
        st.push_back({Value::kScalar, kConstants.at(tok)});
      } else if (tok == "=" || tok == ">") {
        Value rhs = pop();
        Value lhs = pop();
        const bool r = tok == "=" ? lhs.scalar == rhs.scalar : lhs.scalar > rhs.scalar;
        st.push_back({Value::kBool, r});
      } else if (tok == "all" || tok == "any" || tok == "count=") {
        Value v = pop();
        Value list = pop();
        int n = 0;
        for (int e : list.list) n += e == v.scalar;
        if (tok == "count=") {
          st.push_back({Value::kScalar, n});
        } else if (tok == "all") {
          st.push_back({Value::kBool, n == static_cast<int>(list.list.size())});
        } else {
          st.push_back({Value::kBool, n > 0});
        }
      } else if (tok == "and" || tok == "or") {
        Value rhs = pop();
        Value lhs = pop();
        const bool r = tok == "and" ? (lhs.scalar && rhs.scalar) : (lhs.scalar || rhs.scalar);
        st.push_back({Value::kBool, r});
      } else if (tok == "not") {
        Value v = pop();
        st.push_back({Value::kBool, !v.scalar});
      } else {
        throw std::logic_error("unexpected token: " + tok);
      }
    }
    return st.back().scalar != 0;
  };
  if (quantifier == "exists=") {
    for (std::size_t b = 0; b < scene.objects.size(); ++b) {
      if (body(b)) return true;
    }
    return false;
  }
  for (std::size_t b = 0; b < scene.objects.size(); ++b) {
    if (!body(b)) return false;
  }
  return true;
}

// Precision at every rank, recomputed from scratch for each positive. An
// item's rank counts the items ahead of it: higher score, or equal score
// and smaller id.
inline double AveragePrecision(const std::vector<double>& scores,
                               const std::vector<std::uint8_t>& labels,
                               const std::vector<std::uint64_t>& ids) {
  const std::size_t n = scores.size();
  auto ahead = [&](std::size_t j, std::size_t i) {
    return scores[j] > scores[i] || (scores[j] == scores[i] && ids[j] < ids[i]);
  };
  double total = 0.0;
  int positives = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!labels[i]) continue;
    ++positives;
    std::size_t rank = 1;
    std::size_t hits = 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && ahead(j, i)) {
        ++rank;
        hits += labels[j];
      }
    }
    total += static_cast<double>(hits) / static_cast<double>(rank);
  }
  return total / positives;
}

// Posterior by enumeration: prior exp(-0.2 l) times the product of 0/1
// likelihoods, normalized. truth[h][k] is hypothesis h's value on support
// example k. Returns an empty vector when no hypothesis is consistent.
inline std::vector<double> Posterior(const std::vector<int>& lengths,
                                     const std::vector<std::vector<bool>>& truth,
                                     const std::vector<bool>& labels) {
  std::vector<double> joint(lengths.size());
  double z = 0.0;
  for (std::size_t h = 0; h < lengths.size(); ++h) {
    double like = 1.0;
    for (std::size_t k = 0; k < labels.size(); ++k) like *= truth[h][k] == labels[k] ? 1.0 : 0.0;
    joint[h] = std::exp(-0.2 * lengths[h]) * like;
    z += joint[h];
  }
  if (z == 0.0) return {};
  for (double& p : joint) p /= z;
  return joint;
}

}  // namespace curi::reference

#endif  // CURI_TESTS_ORACLES_REFERENCE_H_
