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

#include "curi/scene.h"

#include <array>
#include <istream>
#include <numeric>
#include <ostream>
#include <utility>

#include "curi/errors.h"

namespace curi {

int SceneObject::Get(Property p) const {
  switch (p) {
    case Property::kColor: return color;
    case Property::kShape: return shape;
    case Property::kMaterial: return material;
    case Property::kSize: return size;
    case Property::kLocationX: return locx;
    case Property::kLocationY: return locy;
  }
  return 0;
}

void ValidateRange(const ObjectCountRange& range) {
  if (range.min < 1 || range.min > range.max || range.max > kGridCells) {
    throw Error(ErrorCode::kInfeasibleRange,
                "object count range [" + std::to_string(range.min) + ", " +
                    std::to_string(range.max) + "] must lie within [1, 64]");
  }
}

Scene SampleScene(Rng& rng, const ObjectCountRange& range, std::uint64_t id) {
  ValidateRange(range);
  Scene s;
  s.id = id;
  const int n = static_cast<int>(rng.UniformInt(range.min, range.max));
  std::array<int, kGridCells> cells;
  std::iota(cells.begin(), cells.end(), 0);
  s.objects.reserve(n);
  for (int i = 0; i < n; ++i) {
    SceneObject o;
    o.color = static_cast<std::uint8_t>(rng.Uniform(kColorNames.size()));
    o.shape = static_cast<std::uint8_t>(rng.Uniform(kShapeNames.size()));
    o.material = static_cast<std::uint8_t>(rng.Uniform(kMaterialNames.size()));
    o.size = static_cast<std::uint8_t>(rng.Uniform(kSizeNames.size()));
    const auto j = i + static_cast<int>(rng.Uniform(kGridCells - i));
    std::swap(cells[i], cells[j]);
    o.locx = static_cast<std::uint8_t>(kMinLocation + cells[i] % 8);
    o.locy = static_cast<std::uint8_t>(kMinLocation + cells[i] / 8);
    s.objects.push_back(o);
  }
  return s;
}

void ValidateScene(const Scene& scene, const ObjectCountRange& range) {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument,
                "scene " + std::to_string(scene.id) + ": " + what);
  };
  const int n = static_cast<int>(scene.objects.size());
  if (n < range.min || n > range.max) fail("object count out of range");
  std::array<bool, kGridCells> used{};
  for (const auto& o : scene.objects) {
    for (Property p : kAllProperties) {
      const int v = o.Get(p);
      const int lo = PropertyMinValue(p);
      if (v < lo || v >= lo + PropertyDomainSize(p)) fail("property out of domain");
    }
    const int cell = (o.locy - 1) * 8 + (o.locx - 1);
    if (used[cell]) fail("two objects share a grid cell");
    used[cell] = true;
  }
}

ScenePool::ScenePool(std::uint64_t seed, std::vector<Scene> scenes)
    : seed_(seed), scenes_(std::move(scenes)) {
  for (std::size_t i = 0; i < scenes_.size(); ++i) {
    if (scenes_[i].id != i) {
      throw Error(ErrorCode::kInvalidArgument,
                  "scene ids must equal their pool position");
    }
  }
}

ScenePool BuildPool(std::size_t n, std::uint64_t seed,
                    const ObjectCountRange& range) {
  ValidateRange(range);
  const Rng root(seed);
  std::vector<Scene> scenes;
  scenes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = root.Substream("scene", i);
    scenes.push_back(SampleScene(rng, range, i));
  }
  return ScenePool(seed, std::move(scenes));
}

nlohmann::ordered_json SceneToJson(const Scene& scene) {
  nlohmann::ordered_json objects = nlohmann::ordered_json::array();
  for (const auto& o : scene.objects) {
    nlohmann::ordered_json j;
    j["color"] = kColorNames[o.color];
    j["shape"] = kShapeNames[o.shape];
    j["material"] = kMaterialNames[o.material];
    j["size"] = kSizeNames[o.size];
    j["locx"] = o.locx;
    j["locy"] = o.locy;
    objects.push_back(std::move(j));
  }
  nlohmann::ordered_json j;
  j["id"] = scene.id;
  j["objects"] = std::move(objects);
  return j;
}

Scene SceneFromJson(const nlohmann::json& j) {
  Scene s;
  try {
    s.id = j.at("id").get<std::uint64_t>();
    for (const auto& jo : j.at("objects")) {
      SceneObject o;
      auto categorical = [&](Property p, const char* key) {
        auto v = PropertyValueFromName(p, jo.at(key).get<std::string>());
        if (!v) {
          throw Error(ErrorCode::kInvalidArgument,
                      std::string("bad value for ") + key);
        }
        return static_cast<std::uint8_t>(*v);
      };
      o.color = categorical(Property::kColor, "color");
      o.shape = categorical(Property::kShape, "shape");
      o.material = categorical(Property::kMaterial, "material");
      o.size = categorical(Property::kSize, "size");
      o.locx = jo.at("locx").get<std::uint8_t>();
      o.locy = jo.at("locy").get<std::uint8_t>();
      s.objects.push_back(o);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("scene json: ") + e.what());
  }
  ValidateScene(s, ObjectCountRange{1, kGridCells});
  return s;
}

void WriteSceneJsonl(std::ostream& out, const ScenePool& pool) {
  for (const Scene& s : pool.scenes()) out << SceneToJson(s).dump() << '\n';
}

ScenePool ReadSceneJsonl(std::istream& in, std::uint64_t seed) {
  std::vector<Scene> scenes;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      scenes.push_back(SceneFromJson(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kIo, std::string("malformed scene line: ") + e.what());
    }
  }
  return ScenePool(seed, std::move(scenes));
}

}  // namespace curi
