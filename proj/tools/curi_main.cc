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

// Command-line driver. Talks to the library only through the C interface.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "curi/curi.h"
#include "json.hpp"

namespace {

const std::vector<std::string> kSplits = {
    "instance_iid", "concept_iid", "counting",      "extrinsic",    "intrinsic",
    "boolean",      "complexity",  "binding_color", "binding_shape"};

struct Options {
  std::string config_path;
  std::string out;
  long long seed = -1;
  std::vector<std::string> sets;
  std::string split = "all";
  std::string negatives;
  std::string metric = "map";
};

int Report(curi_status status) {
  if (status != CURI_OK) {
    std::fprintf(stderr, "curi: error: %s\n", curi_last_error());
  }
  return static_cast<int>(status);
}

// Takes ownership of s.
void PrintAndFree(char* s) {
  if (s == nullptr) return;
  std::printf("%s\n", s);
  curi_string_free(s);
}

class Session {
 public:
  ~Session() {
    curi_pipeline_close(pipeline_);
    curi_config_destroy(config_);
  }

  curi_status Open(const Options& o) {
    curi_status s = o.config_path.empty() ? curi_config_create(&config_)
                                          : curi_config_load(o.config_path.c_str(), &config_);
    if (s != CURI_OK) return s;
    for (const auto& kv : o.sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        std::fprintf(stderr, "curi: --set expects key=value, got '%s'\n", kv.c_str());
        return CURI_ERR_INVALID_ARGUMENT;
      }
      s = curi_config_set(config_, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
      if (s != CURI_OK) return s;
    }
    if (o.seed >= 0) {
      s = curi_config_set(config_, "seed", std::to_string(o.seed).c_str());
      if (s != CURI_OK) return s;
    }
    if (!o.out.empty()) {
      s = curi_config_set(config_, "out", o.out.c_str());
      if (s != CURI_OK) return s;
    }
    return curi_pipeline_open(config_, &pipeline_);
  }

  curi_pipeline* get() { return pipeline_; }

 private:
  curi_config* config_ = nullptr;
  curi_pipeline* pipeline_ = nullptr;
};

std::vector<std::string> Splits(const std::string& arg) {
  if (arg == "all") return kSplits;
  return {arg};
}

std::vector<std::string> Modes(const std::string& arg) {
  if (arg == "both") return {"hard", "easy"};
  if (arg.empty()) return {""};  // configured default
  return {arg};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CURI benchmark generator and oracle comp-gap driver"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(curi_version()));

  Options o;
  app.add_option("--config", o.config_path, "Flat key = value config file")
      ->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "Output directory (overrides config)");
  app.add_option("--seed", o.seed, "Master seed (overrides config)")->check(CLI::NonNegativeNumber);
  app.add_option("--set", o.sets, "Extra config setting key=value (repeatable)");

  auto* sample = app.add_subcommand("sample-concepts", "Sample raw concepts from the grammar");
  auto* pool = app.add_subcommand("build-pool", "Sample the scene pool");
  auto* filter = app.add_subcommand("filter", "Build the hypothesis space");
  auto* split = app.add_subcommand("split", "Build split assignments");
  auto* episodes = app.add_subcommand("episodes", "Build train/val/test episodes");
  auto* compgap = app.add_subcommand("compgap", "Score both oracles on test episodes");
  auto* all = app.add_subcommand("all", "Run every stage and write the summary table");

  auto split_choice = CLI::IsMember([] {
    auto v = kSplits;
    v.push_back("all");
    return v;
  }());
  for (auto* sub : {split, episodes, compgap}) {
    sub->add_option("--split", o.split, "Split kind or 'all'")->check(split_choice);
  }
  for (auto* sub : {episodes, compgap}) {
    sub->add_option("--negatives", o.negatives, "hard, easy or both")
        ->check(CLI::IsMember({"hard", "easy", "both"}));
  }
  compgap->add_option("--metric", o.metric, "Gap printed on the summary line: map or cba")
      ->check(CLI::IsMember({"map", "cba"}));

  CLI11_PARSE(app, argc, argv);

  Session session;
  if (int rc = Report(session.Open(o)); rc != 0) return rc;
  curi_pipeline* p = session.get();

  if (sample->parsed()) return Report(curi_cmd_sample_concepts(p));
  if (pool->parsed()) return Report(curi_cmd_build_pool(p));
  if (filter->parsed()) return Report(curi_cmd_filter(p));
  if (split->parsed()) {
    for (const auto& k : Splits(o.split)) {
      if (int rc = Report(curi_cmd_split(p, k.c_str())); rc != 0) return rc;
    }
    return 0;
  }
  if (episodes->parsed()) {
    for (const auto& k : Splits(o.split)) {
      for (const auto& m : Modes(o.negatives)) {
        const char* mode = m.empty() ? nullptr : m.c_str();
        if (int rc = Report(curi_cmd_episodes(p, k.c_str(), mode)); rc != 0) return rc;
      }
    }
    return 0;
  }
  if (compgap->parsed()) {
    for (const auto& k : Splits(o.split)) {
      for (const auto& m : Modes(o.negatives)) {
        double gap_map = 0.0, gap_cba = 0.0;
        char* json = nullptr;
        const curi_status s = curi_cmd_compgap(p, k.c_str(), m.empty() ? nullptr : m.c_str(),
                                               &gap_map, &gap_cba, &json);
        if (s != CURI_OK) return Report(s);
        const std::string mode = nlohmann::json::parse(json).at("negatives").get<std::string>();
        PrintAndFree(json);
        std::printf("%s %s comp_gap_%s=%.6f\n", k.c_str(), mode.c_str(), o.metric.c_str(),
                    o.metric == "map" ? gap_map : gap_cba);
      }
    }
    return 0;
  }
  if (all->parsed()) {
    char* summary = nullptr;
    const curi_status s = curi_cmd_all(p, &summary);
    if (s != CURI_OK) return Report(s);
    PrintAndFree(summary);
    return 0;
  }
  return 0;
}
