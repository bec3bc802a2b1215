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

#include "curi/curi.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "curi/concept.h"
#include "curi/digest.h"
#include "curi/errors.h"
#include "curi/executor.h"
#include "curi/grammar.h"
#include "curi/metrics.h"
#include "curi/pipeline.h"
#include "curi/rng.h"
#include "curi/scene.h"

struct curi_config {
  curi::RunConfig config;
};

struct curi_pipeline {
  std::unique_ptr<curi::Pipeline> pipeline;
};

struct curi_concept {
  curi::Concept hypothesis;
};

struct curi_pool {
  curi::ScenePool pool;
};

namespace {

thread_local std::string last_error;

curi_status Fail(curi_status status, const char* message) {
  last_error = message;
  return status;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
curi_status Guard(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return CURI_OK;
  } catch (const curi::Error& e) {
    return Fail(static_cast<curi_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(CURI_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(CURI_ERR_INTERNAL, e.what());
  }
}

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void NotNull(const void* p, const char* what) {
  if (p == nullptr) {
    throw curi::Error(curi::ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
  }
}

curi::Pipeline& Get(curi_pipeline* p) {
  NotNull(p, "pipeline");
  return *p->pipeline;
}

// NULL selects the configured default.
curi::NegativesMode Mode(curi_pipeline* p, const char* mode) {
  return mode == nullptr ? Get(p).config().negatives : curi::ParseNegativesMode(mode);
}

}  // namespace

extern "C" {

const char* curi_version(void) {
  static const std::string version = curi::LibraryVersion();
  return version.c_str();
}

const char* curi_status_name(curi_status status) {
  if (status == CURI_OK) return "Ok";
  if (status == CURI_ERR_INTERNAL) return "Internal";
  const auto name = curi::ErrorCodeName(static_cast<curi::ErrorCode>(status));
  return name.empty() ? "Unknown" : name.data();
}

const char* curi_last_error(void) { return last_error.c_str(); }

void curi_string_free(char* s) { std::free(s); }

curi_status curi_config_create(curi_config** out) {
  return Guard([&] {
    NotNull(out, "out");
    *out = new curi_config{};
  });
}

curi_status curi_config_load(const char* path, curi_config** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    *out = new curi_config{curi::RunConfig::Load(path)};
  });
}

curi_status curi_config_set(curi_config* config, const char* key, const char* value) {
  return Guard([&] {
    NotNull(config, "config");
    NotNull(key, "key");
    NotNull(value, "value");
    config->config.Set(key, value);
  });
}

curi_status curi_config_to_json(const curi_config* config, char** out) {
  return Guard([&] {
    NotNull(config, "config");
    NotNull(out, "out");
    *out = Dup(config->config.ToJson().dump(2));
  });
}

void curi_config_destroy(curi_config* config) { delete config; }

curi_status curi_pipeline_open(const curi_config* config, curi_pipeline** out) {
  return Guard([&] {
    NotNull(config, "config");
    NotNull(out, "out");
    auto p = std::make_unique<curi::Pipeline>(config->config);
    *out = new curi_pipeline{std::move(p)};
  });
}

void curi_pipeline_close(curi_pipeline* pipeline) { delete pipeline; }

curi_status curi_cmd_sample_concepts(curi_pipeline* p) {
  return Guard([&] { Get(p).SampleConcepts(); });
}

curi_status curi_cmd_build_pool(curi_pipeline* p) {
  return Guard([&] { Get(p).BuildPool(); });
}

curi_status curi_cmd_filter(curi_pipeline* p) {
  return Guard([&] { Get(p).Filter(); });
}

curi_status curi_cmd_split(curi_pipeline* p, const char* kind) {
  return Guard([&] {
    NotNull(kind, "kind");
    Get(p).Split(curi::ParseSplitKind(kind));
  });
}

curi_status curi_cmd_episodes(curi_pipeline* p, const char* kind, const char* mode) {
  return Guard([&] {
    NotNull(kind, "kind");
    Get(p).Episodes(curi::ParseSplitKind(kind), Mode(p, mode));
  });
}

curi_status curi_cmd_compgap(curi_pipeline* p, const char* kind, const char* mode,
                             double* gap_map, double* gap_cba, char** report_json) {
  return Guard([&] {
    NotNull(kind, "kind");
    const curi::MetricsReport r = Get(p).CompGap(curi::ParseSplitKind(kind), Mode(p, mode));
    if (report_json != nullptr) *report_json = Dup(r.ToJson().dump(2));
    if (gap_map != nullptr) *gap_map = r.gap_map;
    if (gap_cba != nullptr) *gap_cba = r.gap_cba;
  });
}

curi_status curi_cmd_all(curi_pipeline* p, char** summary_json) {
  return Guard([&] {
    Get(p).All();
    if (summary_json != nullptr) {
      const auto path = Get(p).out() / "summary.json";
      std::FILE* f = std::fopen(path.c_str(), "rb");
      if (f == nullptr) {
        throw curi::Error(curi::ErrorCode::kMissingArtifact, "no summary written");
      }
      std::string text;
      char buf[4096];
      std::size_t n;
      while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, n);
      std::fclose(f);
      *summary_json = Dup(text);
    }
  });
}

curi_status curi_pipeline_stage_skipped(const curi_pipeline* p, const char* stage,
                                        int* out) {
  return Guard([&] {
    NotNull(p, "pipeline");
    NotNull(stage, "stage");
    NotNull(out, "out");
    *out = p->pipeline->WasSkipped(stage) ? 1 : 0;
  });
}

curi_status curi_pipeline_out_dir(const curi_pipeline* p, char** out) {
  return Guard([&] {
    NotNull(p, "pipeline");
    NotNull(out, "out");
    *out = Dup(p->pipeline->out().string());
  });
}

curi_status curi_concept_parse(const char* postfix, curi_concept** out) {
  return Guard([&] {
    NotNull(postfix, "postfix");
    NotNull(out, "out");
    *out = new curi_concept{curi::ParsePostfix(std::string_view(postfix))};
  });
}

curi_status curi_concept_sample(uint64_t seed, uint64_t index, int max_depth,
                                curi_concept** out) {
  return Guard([&] {
    NotNull(out, "out");
    curi::GrammarConfig g = curi::GrammarConfig::Default();
    if (max_depth > 0) g.max_depth = max_depth;
    g.Validate();
    curi::Rng rng = curi::Rng(seed).Substream("concept", index);
    *out = new curi_concept{curi::SampleConcept(g, rng)};
  });
}

void curi_concept_destroy(curi_concept* c) { delete c; }

curi_status curi_concept_serialize(const curi_concept* c, char** out) {
  return Guard([&] {
    NotNull(c, "concept");
    NotNull(out, "out");
    *out = Dup(curi::JoinTokens(curi::SerializePostfix(c->hypothesis)));
  });
}

curi_status curi_concept_pretty(const curi_concept* c, char** out) {
  return Guard([&] {
    NotNull(c, "concept");
    NotNull(out, "out");
    *out = Dup(curi::PrettyPrint(c->hypothesis));
  });
}

int curi_concept_length(const curi_concept* c) {
  return c == nullptr ? 0 : curi::ConceptLength(c->hypothesis);
}

curi_status curi_pool_build(uint64_t n, uint64_t seed, curi_pool** out) {
  return Guard([&] {
    NotNull(out, "out");
    *out = new curi_pool{curi::BuildPool(n, seed)};
  });
}

void curi_pool_destroy(curi_pool* pool) { delete pool; }

uint64_t curi_pool_size(const curi_pool* pool) {
  return pool == nullptr ? 0 : pool->pool.size();
}

curi_status curi_pool_scene_json(const curi_pool* pool, uint64_t scene, char** out) {
  return Guard([&] {
    NotNull(pool, "pool");
    NotNull(out, "out");
    if (scene >= pool->pool.size()) {
      throw curi::Error(curi::ErrorCode::kInvalidArgument, "scene out of range");
    }
    *out = Dup(curi::SceneToJson(pool->pool[scene]).dump());
  });
}

curi_status curi_concept_evaluate(const curi_concept* c, const curi_pool* pool,
                                  uint64_t scene, int* out) {
  return Guard([&] {
    NotNull(c, "concept");
    NotNull(pool, "pool");
    NotNull(out, "out");
    if (scene >= pool->pool.size()) {
      throw curi::Error(curi::ErrorCode::kInvalidArgument, "scene out of range");
    }
    *out = curi::Evaluate(c->hypothesis, pool->pool[scene]) ? 1 : 0;
  });
}

curi_status curi_concept_signature(const curi_concept* c, const curi_pool* pool,
                                   uint64_t* true_count, char** hash_hex) {
  return Guard([&] {
    NotNull(c, "concept");
    NotNull(pool, "pool");
    const auto sig = curi::ComputeSignature(0, c->hypothesis, pool->pool);
    if (true_count != nullptr) *true_count = sig.true_count;
    if (hash_hex != nullptr) *hash_hex = Dup(curi::ToHex(sig.hash));
  });
}

curi_status curi_average_precision(const double* scores, const uint8_t* labels,
                                   const uint64_t* ids, size_t n, double* out) {
  return Guard([&] {
    NotNull(out, "out");
    if (n > 0) {
      NotNull(scores, "scores");
      NotNull(labels, "labels");
    }
    std::span<const double> s(scores, n);
    std::span<const std::uint8_t> l(labels, n);
    *out = ids != nullptr ? curi::AveragePrecision(s, l, std::span<const std::uint64_t>(ids, n))
                          : curi::AveragePrecision(s, l);
  });
}

curi_status curi_class_balanced_accuracy(const double* scores, const uint8_t* labels,
                                         size_t n, double threshold, double* out) {
  return Guard([&] {
    NotNull(out, "out");
    if (n > 0) {
      NotNull(scores, "scores");
      NotNull(labels, "labels");
    }
    *out = curi::ClassBalancedAccuracy(std::span<const double>(scores, n),
                                       std::span<const std::uint8_t>(labels, n), threshold);
  });
}

}  // extern "C"
