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

#ifndef CURI_SCENE_H_
#define CURI_SCENE_H_

// Scene schemas: small sets of objects with categorical and ordinal
// properties placed on an 8x8 grid.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "curi/rng.h"
#include "curi/vocab.h"
#include "json.hpp"

namespace curi {

struct SceneObject {
  std::uint8_t color = 0;     // index into kColorNames
  std::uint8_t shape = 0;     // index into kShapeNames
  std::uint8_t material = 0;  // index into kMaterialNames
  std::uint8_t size = 0;      // 0 = small, 1 = large
  std::uint8_t locx = 1;      // 1..8
  std::uint8_t locy = 1;      // 1..8

  int Get(Property p) const;
  friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

struct Scene {
  std::uint64_t id = 0;
  std::vector<SceneObject> objects;

  friend bool operator==(const Scene&, const Scene&) = default;
};

struct ObjectCountRange {
  int min = 2;
  int max = 5;
};

// Throws kInfeasibleRange unless 1 <= min <= max <= 64.
void ValidateRange(const ObjectCountRange& range);

// Object count uniform over the range; every property uniform over its
// domain; grid cells drawn without replacement.
Scene SampleScene(Rng& rng, const ObjectCountRange& range, std::uint64_t id = 0);

// Throws kInvalidArgument describing the first violated invariant.
void ValidateScene(const Scene& scene, const ObjectCountRange& range = {});

class ScenePool {
 public:
  ScenePool() = default;
  ScenePool(std::uint64_t seed, std::vector<Scene> scenes);

  std::size_t size() const { return scenes_.size(); }
  bool empty() const { return scenes_.empty(); }
  const Scene& operator[](std::size_t i) const { return scenes_[i]; }
  const std::vector<Scene>& scenes() const { return scenes_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_ = 0;
  std::vector<Scene> scenes_;
};

// Scene i is drawn from Rng(seed).Substream("scene", i), so pools with the
// same seed share prefixes.
ScenePool BuildPool(std::size_t n, std::uint64_t seed,
                    const ObjectCountRange& range = {});

nlohmann::ordered_json SceneToJson(const Scene& scene);
Scene SceneFromJson(const nlohmann::json& j);

void WriteSceneJsonl(std::ostream& out, const ScenePool& pool);
// Scene ids must equal their line index.
ScenePool ReadSceneJsonl(std::istream& in, std::uint64_t seed);

}  // namespace curi

#endif  // CURI_SCENE_H_
