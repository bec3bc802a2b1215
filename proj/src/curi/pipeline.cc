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

#include "curi/pipeline.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "curi/digest.h"
#include "curi/errors.h"
#include "curi/oracle.h"
#include "curi/parallel.h"
#include "curi/rng.h"

#ifndef CURI_VERSION_STRING
#define CURI_VERSION_STRING "0.0.0"
#endif

namespace curi {
namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr char kSignatureMagic[8] = {'C', 'U', 'R', 'I', 'S', 'I', 'G', '1'};

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T ParseNumber(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(ErrorCode::kInvalidConfig,
                "bad value for " + std::string(key) + ": '" + std::string(value) + "'");
  }
  return out;
}

bool ParseBool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw Error(ErrorCode::kInvalidConfig,
              "bad boolean for " + std::string(key) + ": '" + std::string(value) + "'");
}

void WriteFileAtomic(const fs::path& path, std::string_view content) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw Error(ErrorCode::kIo, "write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string ReadFile(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kMissingArtifact, "cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Json ReadJson(const fs::path& path) {
  try {
    return Json::parse(ReadFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, "malformed JSON in " + path.string() + ": " + e.what());
  }
}

std::string KeyOf(const Json& j) { return ToHex(Sha256(j.dump())); }

std::string FileHex(const fs::path& path) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::kMissingArtifact, "missing artifact " + path.string());
  }
  return ToHex(Sha256File(path));
}

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string ConceptLine(std::uint64_t id, const TokenString& tokens) {
  Json j;
  j["id"] = id;
  j["postfix"] = tokens;
  j["length"] = tokens.size();
  return j.dump();
}

std::vector<RawConcept> ReadConcepts(const fs::path& path) {
  std::istringstream in(ReadFile(path));
  std::vector<RawConcept> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto tokens = j.at("postfix").get<std::vector<std::string>>();
      out.push_back({j.at("id").get<std::uint64_t>(), ParsePostfix(tokens)});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kIo, "malformed concept line: " + std::string(e.what()));
    }
  }
  return out;
}

std::string SplitFile(SplitKind kind) {
  return "splits/" + std::string(SplitKindName(kind)) + ".json";
}

std::string EpisodeFile(SplitKind kind, NegativesMode mode, EpisodePart part) {
  return "episodes/" + std::string(SplitKindName(kind)) + "_" +
         std::string(NegativesModeName(mode)) + "_" + std::string(EpisodePartName(part)) +
         ".jsonl";
}

std::string ReportStem(SplitKind kind, NegativesMode mode) {
  return "reports/" + std::string(SplitKindName(kind)) + "_" +
         std::string(NegativesModeName(mode));
}

}  // namespace

// ---------------------------------------------------------------------------
// RunConfig

void RunConfig::Set(std::string_view key, std::string_view raw_value) {
  const std::string value = Trim(raw_value);
  if (key == "seed") {
    seed = ParseNumber<std::uint64_t>(key, value);
  } else if (key == "raw_concepts") {
    raw_concepts = ParseNumber<std::uint64_t>(key, value);
  } else if (key == "pool_size") {
    pool_size = ParseNumber<std::uint64_t>(key, value);
  } else if (key == "max_rate") {
    thresholds.max_rate = ParseNumber<double>(key, value);
  } else if (key == "min_true") {
    thresholds.min_true = ParseNumber<std::uint64_t>(key, value);
  } else if (key == "splits") {
    splits.clear();
    if (value == "all") {
      splits.assign(kAllSplitKinds.begin(), kAllSplitKinds.end());
    } else {
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          splits.push_back(ParseSplitKind(Trim(item)));
        } catch (const Error& e) {
          throw Error(ErrorCode::kInvalidConfig, e.what());
        }
      }
    }
  } else if (key == "episodes_train") {
    episodes_train = ParseNumber<std::uint64_t>(key, value);
  } else if (key == "episodes_val") {
    episodes_val = ParseNumber<std::uint64_t>(key, value);
  } else if (key == "episodes_test") {
    episodes_test = ParseNumber<std::uint64_t>(key, value);
  } else if (key == "negatives") {
    try {
      negatives = ParseNegativesMode(value);
    } catch (const Error& e) {
      throw Error(ErrorCode::kInvalidConfig, e.what());
    }
  } else if (key == "map_k") {
    map_k = ParseNumber<int>(key, value);
  } else if (key == "out") {
    out = value;
  } else if (key == "max_depth") {
    grammar.max_depth = ParseNumber<int>(key, value);
  } else if (key == "min_objects") {
    objects.min = ParseNumber<int>(key, value);
  } else if (key == "max_objects") {
    objects.max = ParseNumber<int>(key, value);
  } else if (key == "complexity_max_train_length") {
    complexity_max_train_length = ParseNumber<int>(key, value);
  } else if (key == "concept_iid_test_fraction") {
    concept_iid_test_fraction = ParseNumber<double>(key, value);
  } else if (key == "val_fraction") {
    val_fraction = ParseNumber<double>(key, value);
  } else if (key == "disjoint_support_query") {
    disjoint_support_query = ParseBool(key, value);
  } else if (key == "threads") {
    threads = ParseNumber<int>(key, value);
  } else if (key.starts_with("weight.")) {
    const std::string_view rest = key.substr(7);
    const auto dot = rest.find('.');
    if (dot == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidConfig,
                  "weight keys look like weight.<NT>.<label>: " + std::string(key));
    }
    const double w = ParseNumber<double>(key, value);
    grammar.SetWeight(rest.substr(0, dot), rest.substr(dot + 1), w);
    weight_overrides.emplace_back(std::string(rest), w);
  } else {
    throw Error(ErrorCode::kInvalidConfig, "unknown config key: " + std::string(key));
  }
}

RunConfig RunConfig::Parse(std::string_view text) {
  RunConfig c;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find('\n', start), text.size());
    std::string line(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidConfig,
                  "line " + std::to_string(line_no) + ": expected key = value");
    }
    c.Set(Trim(std::string_view(line).substr(0, eq)),
          std::string_view(line).substr(eq + 1));
  }
  return c;
}

RunConfig RunConfig::Load(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::kInvalidConfig, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return Parse(ss.str());
}

void RunConfig::Validate() const {
  thresholds.Validate();
  grammar.Validate();
  ValidateRange(objects);
  if (pool_size == 0) throw Error(ErrorCode::kInvalidConfig, "pool_size must be positive");
  if (map_k < 1) throw Error(ErrorCode::kInvalidConfig, "map_k must be positive");
  if (splits.empty()) throw Error(ErrorCode::kInvalidConfig, "no splits configured");
  if (threads < 0) throw Error(ErrorCode::kInvalidConfig, "threads must be >= 0");
  for (SplitKind k : splits) SplitSpec(k).Validate();
}

std::uint64_t RunConfig::StageSeed(std::string_view stage) const {
  return Rng(seed).Substream(stage, 0).key();
}

HoldoutSpec RunConfig::SplitSpec(SplitKind kind) const {
  HoldoutSpec s = HoldoutSpec::Default(kind, StageSeed("split/" + std::string(SplitKindName(kind))));
  s.max_train_length = complexity_max_train_length;
  s.test_fraction = concept_iid_test_fraction;
  s.val_fraction = val_fraction;
  return s;
}

Json RunConfig::ToJson() const {
  Json j;
  j["seed"] = seed;
  j["raw_concepts"] = raw_concepts;
  j["pool_size"] = pool_size;
  j["max_rate"] = thresholds.max_rate;
  j["min_true"] = thresholds.min_true;
  std::vector<std::string> names;
  for (SplitKind k : splits) names.emplace_back(SplitKindName(k));
  j["splits"] = names;
  j["episodes_train"] = episodes_train;
  j["episodes_val"] = episodes_val;
  j["episodes_test"] = episodes_test;
  j["negatives"] = NegativesModeName(negatives);
  j["map_k"] = map_k;
  j["max_depth"] = grammar.max_depth;
  j["min_objects"] = objects.min;
  j["max_objects"] = objects.max;
  j["complexity_max_train_length"] = complexity_max_train_length;
  j["concept_iid_test_fraction"] = concept_iid_test_fraction;
  j["val_fraction"] = val_fraction;
  j["disjoint_support_query"] = disjoint_support_query;
  Json w = Json::object();
  for (const auto& [k, v] : weight_overrides) w[k] = v;
  j["weights"] = std::move(w);
  Json table = Json::object();
  for (const auto& [name, prob] : grammar.NormalizedTable()) table[name] = prob;
  j["grammar"] = std::move(table);
  return j;
}

// ---------------------------------------------------------------------------
// Manifest

Json Manifest::ToJson() const {
  Json j;
  j["version"] = version;
  j["config"] = config;
  Json st = Json::object();
  for (const auto& [name, rec] : stages) {
    Json r;
    r["key"] = rec.key;
    Json outs = Json::object();
    for (const auto& [path, hex] : rec.outputs) outs[path] = hex;
    r["outputs"] = std::move(outs);
    r["seconds"] = rec.seconds;
    st[name] = std::move(r);
  }
  j["stages"] = std::move(st);
  return j;
}

Manifest Manifest::FromJson(const nlohmann::json& j) {
  Manifest m;
  try {
    m.version = j.at("version").get<std::string>();
    m.config = j.at("config");
    for (const auto& [name, r] : j.at("stages").items()) {
      StageRecord rec;
      rec.key = r.at("key").get<std::string>();
      for (const auto& [path, hex] : r.at("outputs").items()) {
        rec.outputs[path] = hex.get<std::string>();
      }
      rec.seconds = r.value("seconds", 0.0);
      m.stages[name] = std::move(rec);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("malformed manifest: ") + e.what());
  }
  return m;
}

std::string LibraryVersion() { return CURI_VERSION_STRING; }

std::vector<SplitKind> SummaryOrder(const std::vector<MetricsReport>& reports) {
  std::vector<std::pair<SplitKind, double>> gaps;
  for (SplitKind k : kAllSplitKinds) {
    std::optional<double> gap;
    for (const auto& r : reports) {
      if (r.kind == k && r.mode == NegativesMode::kHard) gap = r.gap_map;
    }
    if (!gap) {
      for (const auto& r : reports) {
        if (r.kind == k) gap = r.gap_map;
      }
    }
    if (gap) gaps.emplace_back(k, *gap);
  }
  std::stable_sort(gaps.begin(), gaps.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<SplitKind> out;
  for (const auto& [k, g] : gaps) out.push_back(k);
  return out;
}

// ---------------------------------------------------------------------------
// Signature and space files

void WriteSignatureBits(const fs::path& path, const HypothesisSpace& space) {
  const std::uint64_t n = space.size();
  const std::uint64_t pool = space.pool_size;
  const std::size_t words = (pool + 63) / 64;
  std::string buf;
  buf.reserve(24 + n * words * 8);
  buf.append(kSignatureMagic, 8);
  auto put = [&](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) buf.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
  };
  put(n);
  put(pool);
  for (const auto& c : space.concepts) {
    const auto& w = c.signature.bits.words();
    for (std::size_t i = 0; i < words; ++i) put(i < w.size() ? w[i] : 0);
  }
  WriteFileAtomic(path, buf);
}

std::vector<BitVector> ReadSignatureBits(const fs::path& path) {
  const std::string buf = ReadFile(path);
  auto get = [&](std::size_t off) {
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[off + b])) << (8 * b);
    }
    return v;
  };
  if (buf.size() < 24 || std::memcmp(buf.data(), kSignatureMagic, 8) != 0) {
    throw Error(ErrorCode::kIo, "not a signature file: " + path.string());
  }
  const std::uint64_t n = get(8);
  const std::uint64_t pool = get(16);
  const std::size_t words = (pool + 63) / 64;
  if (buf.size() != 24 + n * words * 8) {
    throw Error(ErrorCode::kIo, "truncated signature file: " + path.string());
  }
  std::vector<BitVector> out;
  out.reserve(n);
  std::size_t off = 24;
  for (std::uint64_t c = 0; c < n; ++c) {
    std::vector<std::uint64_t> w(words);
    for (std::size_t i = 0; i < words; ++i, off += 8) w[i] = get(off);
    out.emplace_back(pool, std::move(w));
  }
  return out;
}

void WriteSpace(const fs::path& dir, const HypothesisSpace& space) {
  std::string concepts, sigs;
  for (const auto& c : space.concepts) {
    Json j;
    j["id"] = c.id;
    j["postfix"] = c.tokens;
    j["length"] = c.length;
    j["cluster"] = c.cluster;
    concepts += j.dump();
    concepts += '\n';
    Json s;
    s["concept_id"] = c.id;
    s["true_count"] = c.signature.true_count;
    s["true_rate"] = c.signature.true_rate;
    s["sig_hash"] = ToHex(c.signature.hash);
    sigs += s.dump();
    sigs += '\n';
  }
  const Provenance& p = space.provenance;
  const ClusterStats stats = SynonymClusters(space);
  Json m;
  m["raw"] = p.raw;
  m["duplicates"] = p.duplicates;
  m["rejected"] = {{"R1", p.rejected_r1}, {"R2", p.rejected_r2}, {"R3", p.rejected_r3}};
  m["too_frequent"] = p.too_frequent;
  m["too_rare"] = p.too_rare;
  m["accepted"] = p.accepted;
  m["thresholds"] = {{"max_rate", space.thresholds.max_rate},
                     {"min_true", space.thresholds.min_true}};
  m["pool_seed"] = space.pool_seed;
  m["pool_size"] = space.pool_size;
  m["clusters"] = stats.num_clusters;
  m["modal_cluster_size"] = stats.modal_size;
  m["largest_cluster"] = stats.largest;
  Json hist = Json::object();
  for (const auto& [size, count] : stats.histogram) hist[std::to_string(size)] = count;
  m["cluster_histogram"] = std::move(hist);

  WriteFileAtomic(dir / "space.jsonl", concepts);
  WriteFileAtomic(dir / "signatures.jsonl", sigs);
  WriteSignatureBits(dir / "signatures.bin", space);
  WriteFileAtomic(dir / "space.json", m.dump(2) + "\n");
}

HypothesisSpace ReadSpace(const fs::path& dir) {
  HypothesisSpace space;
  const Json m = ReadJson(dir / "space.json");
  std::vector<BitVector> bits = ReadSignatureBits(dir / "signatures.bin");
  try {
    Provenance& p = space.provenance;
    p.raw = m.at("raw");
    p.duplicates = m.at("duplicates");
    p.rejected_r1 = m.at("rejected").at("R1");
    p.rejected_r2 = m.at("rejected").at("R2");
    p.rejected_r3 = m.at("rejected").at("R3");
    p.too_frequent = m.at("too_frequent");
    p.too_rare = m.at("too_rare");
    p.accepted = m.at("accepted");
    space.thresholds.max_rate = m.at("thresholds").at("max_rate");
    space.thresholds.min_true = m.at("thresholds").at("min_true");
    space.pool_seed = m.at("pool_seed");
    space.pool_size = m.at("pool_size");

    std::istringstream concepts(ReadFile(dir / "space.jsonl"));
    std::istringstream sigs(ReadFile(dir / "signatures.jsonl"));
    std::string cl, sl;
    std::size_t i = 0;
    while (std::getline(concepts, cl)) {
      if (cl.empty()) continue;
      if (!std::getline(sigs, sl) || i >= bits.size()) {
        throw Error(ErrorCode::kIo, "space and signature files disagree in length");
      }
      const auto cj = nlohmann::json::parse(cl);
      const auto sj = nlohmann::json::parse(sl);
      SpaceConcept c;
      c.id = cj.at("id");
      c.tokens = cj.at("postfix").get<TokenString>();
      c.hypothesis = ParsePostfix(c.tokens);
      c.length = cj.at("length");
      c.signature = MakeSignature(c.id, std::move(bits[i]));
      if (sj.at("concept_id").get<std::uint64_t>() != c.id ||
          sj.at("true_count").get<std::uint64_t>() != c.signature.true_count ||
          sj.at("sig_hash").get<std::string>() != ToHex(c.signature.hash)) {
        throw Error(ErrorCode::kIo, "signature record " + std::to_string(i) +
                                        " does not match the packed bits");
      }
      c.cluster = cj.at("cluster");
      space.concepts.push_back(std::move(c));
      ++i;
    }
    if (i != bits.size()) throw Error(ErrorCode::kIo, "signature file has extra rows");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("malformed space files: ") + e.what());
  }
  std::vector<std::size_t> stored;
  for (const auto& c : space.concepts) stored.push_back(c.cluster);
  AssignClusters(space);
  for (std::size_t i = 0; i < stored.size(); ++i) {
    if (stored[i] != space.concepts[i].cluster) {
      throw Error(ErrorCode::kIo, "stored synonym clusters do not match the signatures");
    }
  }
  space.RebuildIndex();
  return space;
}

// ---------------------------------------------------------------------------
// Pipeline

struct Pipeline::Cache {
  std::optional<ScenePool> pool;
  std::optional<HypothesisSpace> space;
  std::map<SplitKind, SplitAssignment> splits;
  std::optional<MapPool> map_pool;
  std::set<std::string> verified;  // "stage|output" checked this session
};

Pipeline::Pipeline(RunConfig config)
    : config_(std::move(config)), out_(config_.out), cache_(std::make_unique<Cache>()) {
  config_.Validate();
  fs::create_directories(out_);
  if (fs::exists(out_ / "manifest.json")) {
    manifest_ = Manifest::FromJson(ReadJson(out_ / "manifest.json"));
  }
  manifest_.version = LibraryVersion();
  manifest_.config = config_.ToJson();
}

Pipeline::~Pipeline() = default;

int Pipeline::threads() const {
  return config_.threads > 0 ? config_.threads : DefaultThreadCount();
}

bool Pipeline::WasSkipped(const std::string& stage) const {
  auto it = skipped_.find(stage);
  return it != skipped_.end() && it->second;
}

bool Pipeline::Fresh(const std::string& stage, const std::string& key) {
  auto it = manifest_.stages.find(stage);
  if (it == manifest_.stages.end() || it->second.key != key) return false;
  for (const auto& [rel, hex] : it->second.outputs) {
    const fs::path path = out_ / rel;
    if (!fs::exists(path)) return false;  // interrupted or cleaned: rebuild
    if (cache_->verified.count(stage + "|" + rel)) continue;
    if (FileHex(path) != hex) {
      throw Error(ErrorCode::kDigestMismatch, rel + " does not match its manifest digest");
    }
    cache_->verified.insert(stage + "|" + rel);
  }
  skipped_[stage] = true;
  return true;
}

void Pipeline::Record(const std::string& stage, const std::string& key,
                      const std::vector<std::string>& outputs, double seconds) {
  StageRecord rec;
  rec.key = key;
  rec.seconds = seconds;
  for (const auto& rel : outputs) {
    rec.outputs[rel] = FileHex(out_ / rel);
    cache_->verified.insert(stage + "|" + rel);
  }
  manifest_.stages[stage] = std::move(rec);
  skipped_[stage] = false;
  SaveManifest();
}

void Pipeline::Require(const std::string& stage, const std::string& output) {
  auto it = manifest_.stages.find(stage);
  if (it == manifest_.stages.end() || !it->second.outputs.count(output)) {
    throw Error(ErrorCode::kMissingArtifact, output + " has no manifest entry");
  }
  if (cache_->verified.count(stage + "|" + output)) return;
  if (FileHex(out_ / output) != it->second.outputs.at(output)) {
    throw Error(ErrorCode::kDigestMismatch, output + " does not match its manifest digest");
  }
  cache_->verified.insert(stage + "|" + output);
}

std::string Pipeline::Digest(const std::string& stage, const std::string& output) const {
  auto it = manifest_.stages.find(stage);
  if (it == manifest_.stages.end() || !it->second.outputs.count(output)) {
    throw Error(ErrorCode::kMissingArtifact, output + " has no manifest entry");
  }
  return it->second.outputs.at(output);
}

void Pipeline::SaveManifest() {
  WriteFileAtomic(out_ / "manifest.json", manifest_.ToJson().dump(2) + "\n");
}

namespace {

class Timer {
 public:
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

void Pipeline::SampleConcepts() {
  const std::string stage = "sample-concepts";
  Json k;
  k["seed"] = config_.StageSeed(stage);
  k["raw_concepts"] = config_.raw_concepts;
  k["max_depth"] = config_.grammar.max_depth;
  Json table = Json::array();
  for (const auto& [name, p] : config_.grammar.NormalizedTable()) table.push_back({name, p});
  k["grammar"] = std::move(table);
  const std::string key = KeyOf(k);
  if (Fresh(stage, key)) return;

  Timer timer;
  const ConceptSampler sampler(config_.grammar);
  const Rng root(config_.StageSeed(stage));
  std::vector<std::string> lines(config_.raw_concepts);
  ParallelFor(lines.size(), threads(), [&](std::size_t i) {
    Rng rng = root.Substream("concept", i);
    lines[i] = ConceptLine(i, sampler.SampleDerivation(rng).tokens);
  });
  std::string text;
  for (const auto& l : lines) {
    text += l;
    text += '\n';
  }
  WriteFileAtomic(out_ / "concepts.jsonl", text);
  Record(stage, key, {"concepts.jsonl"}, timer.Seconds());
}

void Pipeline::BuildPool() {
  const std::string stage = "build-pool";
  Json k;
  k["seed"] = config_.StageSeed(stage);
  k["pool_size"] = config_.pool_size;
  k["min_objects"] = config_.objects.min;
  k["max_objects"] = config_.objects.max;
  const std::string key = KeyOf(k);
  if (Fresh(stage, key)) return;

  Timer timer;
  ScenePool pool = curi::BuildPool(config_.pool_size, config_.StageSeed(stage), config_.objects);
  std::ostringstream text;
  WriteSceneJsonl(text, pool);
  WriteFileAtomic(out_ / "pool.jsonl", text.str());
  cache_->pool = std::move(pool);
  cache_->space.reset();
  cache_->map_pool.reset();
  Record(stage, key, {"pool.jsonl"}, timer.Seconds());
}

const ScenePool& Pipeline::pool() {
  BuildPool();
  if (!cache_->pool) {
    Require("build-pool", "pool.jsonl");
    std::istringstream in(ReadFile(out_ / "pool.jsonl"));
    cache_->pool = ReadSceneJsonl(in, config_.StageSeed("build-pool"));
  }
  return *cache_->pool;
}

void Pipeline::Filter() {
  SampleConcepts();
  BuildPool();
  const std::string stage = "filter";
  Json k;
  k["max_rate"] = config_.thresholds.max_rate;
  k["min_true"] = config_.thresholds.min_true;
  k["concepts"] = Digest("sample-concepts", "concepts.jsonl");
  k["pool"] = Digest("build-pool", "pool.jsonl");
  const std::string key = KeyOf(k);
  if (Fresh(stage, key)) return;

  Timer timer;
  Require("sample-concepts", "concepts.jsonl");
  const std::vector<RawConcept> raw = ReadConcepts(out_ / "concepts.jsonl");
  HypothesisSpace space = BuildSpace(raw, pool(), config_.thresholds, threads());
  WriteSpace(out_, space);
  cache_->space = std::move(space);
  cache_->splits.clear();
  cache_->map_pool.reset();
  Record(stage, key, {"space.jsonl", "space.json", "signatures.jsonl", "signatures.bin"},
         timer.Seconds());
}

const HypothesisSpace& Pipeline::space() {
  Filter();
  if (!cache_->space) {
    for (const char* f : {"space.jsonl", "space.json", "signatures.jsonl", "signatures.bin"}) {
      Require("filter", f);
    }
    cache_->space = ReadSpace(out_);
  }
  return *cache_->space;
}

void Pipeline::Split(SplitKind kind) {
  Filter();
  const std::string stage = "split/" + std::string(SplitKindName(kind));
  const HoldoutSpec spec = config_.SplitSpec(kind);
  Json k;
  k["spec"] = spec.ToJson();
  k["space"] = Digest("filter", "signatures.bin") + Digest("filter", "space.jsonl");
  const std::string key = KeyOf(k);
  if (Fresh(stage, key)) return;

  Timer timer;
  SplitAssignment a = Assign(space(), spec);
  const ValidationReport report = Validate(a, space());
  if (!report.ok()) {
    throw Error(ErrorCode::kDegenerateSplit,
                std::string(SplitKindName(kind)) + ": " + report.violations.front());
  }
  WriteFileAtomic(out_ / SplitFile(kind), a.ToJson().dump() + "\n");
  cache_->splits[kind] = std::move(a);
  Record(stage, key, {SplitFile(kind)}, timer.Seconds());
}

const SplitAssignment& Pipeline::split(SplitKind kind) {
  Split(kind);
  auto it = cache_->splits.find(kind);
  if (it == cache_->splits.end()) {
    const std::string stage = "split/" + std::string(SplitKindName(kind));
    Require(stage, SplitFile(kind));
    it = cache_->splits.emplace(kind, SplitAssignment::FromJson(ReadJson(out_ / SplitFile(kind))))
             .first;
  }
  return it->second;
}

void Pipeline::Episodes(SplitKind kind, NegativesMode mode) {
  Split(kind);
  const std::string split_stage = "split/" + std::string(SplitKindName(kind));
  const std::string stage = "episodes/" + std::string(SplitKindName(kind)) + "/" +
                            std::string(NegativesModeName(mode));
  Json k;
  k["seed"] = config_.StageSeed("episodes");
  k["counts"] = {config_.episodes_train, config_.episodes_val, config_.episodes_test};
  k["disjoint_support_query"] = config_.disjoint_support_query;
  k["split"] = Digest(split_stage, SplitFile(kind));
  k["space"] = Digest("filter", "signatures.bin") + Digest("filter", "space.jsonl");
  const std::string key = KeyOf(k);
  if (Fresh(stage, key)) return;

  Timer timer;
  const SplitAssignment& a = split(kind);
  EpisodeOptions options;
  options.disjoint_support_query = config_.disjoint_support_query;
  std::vector<std::string> outputs;
  for (auto [part, count] : {std::pair{EpisodePart::kTrain, config_.episodes_train},
                             std::pair{EpisodePart::kVal, config_.episodes_val},
                             std::pair{EpisodePart::kTest, config_.episodes_test}}) {
    const std::vector<Episode> episodes = BuildEpisodeSet(
        a, part, space(), count, mode, config_.StageSeed("episodes"), options, threads());
    std::ostringstream text;
    WriteEpisodesJsonl(text, episodes);
    const std::string rel = EpisodeFile(kind, mode, part);
    WriteFileAtomic(out_ / rel, text.str());
    outputs.push_back(rel);
  }
  Record(stage, key, outputs, timer.Seconds());
}

std::vector<Episode> Pipeline::LoadEpisodes(SplitKind kind, NegativesMode mode,
                                            EpisodePart part) {
  Episodes(kind, mode);
  const std::string stage = "episodes/" + std::string(SplitKindName(kind)) + "/" +
                            std::string(NegativesModeName(mode));
  const std::string rel = EpisodeFile(kind, mode, part);
  Require(stage, rel);
  std::istringstream in(ReadFile(out_ / rel));
  return ReadEpisodesJsonl(in);
}

void Pipeline::BuildMapPool() {
  Filter();
  const std::string stage = "mappool";
  Json k;
  k["seed"] = config_.StageSeed(stage);
  k["k"] = config_.map_k;
  k["min_objects"] = config_.objects.min;
  k["max_objects"] = config_.objects.max;
  k["pool"] = Digest("build-pool", "pool.jsonl");
  k["space"] = Digest("filter", "signatures.bin") + Digest("filter", "space.jsonl");
  const std::string key = KeyOf(k);
  if (Fresh(stage, key)) return;

  Timer timer;
  MapPool t = curi::BuildMapPool(space(), pool(), config_.map_k, config_.StageSeed(stage),
                                 config_.objects, threads());
  WriteFileAtomic(out_ / "mappool.json", MapPoolToJson(t, pool().size()).dump() + "\n");
  cache_->map_pool = std::move(t);
  Record(stage, key, {"mappool.json"}, timer.Seconds());
}

const MapPool& Pipeline::map_pool() {
  BuildMapPool();
  if (!cache_->map_pool) {
    Require("mappool", "mappool.json");
    cache_->map_pool = MapPoolFromJson(ReadJson(out_ / "mappool.json"), pool(), space(), threads());
  }
  return *cache_->map_pool;
}

MetricsReport Pipeline::CompGap(SplitKind kind, NegativesMode mode) {
  Episodes(kind, mode);
  BuildMapPool();
  const std::string name = std::string(SplitKindName(kind)) + "/" +
                           std::string(NegativesModeName(mode));
  const std::string stage = "compgap/" + name;
  const std::string stem = ReportStem(kind, mode);
  Json k;
  k["episodes"] = Digest("episodes/" + name, EpisodeFile(kind, mode, EpisodePart::kTest));
  k["split"] = Digest("split/" + std::string(SplitKindName(kind)), SplitFile(kind));
  k["mappool"] = Digest("mappool", "mappool.json");
  k["space"] = Digest("filter", "signatures.bin") + Digest("filter", "space.jsonl");
  const std::string key = KeyOf(k);

  Timer timer;
  const std::vector<Episode> episodes = LoadEpisodes(kind, mode, EpisodePart::kTest);
  const SplitAssignment& a = split(kind);
  const OraclePrior strong = StrongPrior(space(), a);
  const OraclePrior weak = WeakPrior(space(), a);
  OracleRun strong_run = RunOracle(strong, space(), map_pool(), episodes, threads());
  OracleRun weak_run = RunOracle(weak, space(), map_pool(), episodes, threads());
  MetricsReport report =
      MakeReport(kind, mode, std::move(strong_run), std::move(weak_run), config_.seed);
  if (Fresh(stage, key)) return report;

  std::string strong_lines, weak_lines;
  for (const auto& s : report.strong.episodes) {
    strong_lines += EpisodeScoreToJson(s, OracleKind::kStrong).dump() + "\n";
  }
  for (const auto& s : report.weak.episodes) {
    weak_lines += EpisodeScoreToJson(s, OracleKind::kWeak).dump() + "\n";
  }
  WriteFileAtomic(out_ / (stem + "_strong.jsonl"), strong_lines);
  WriteFileAtomic(out_ / (stem + "_weak.jsonl"), weak_lines);
  WriteFileAtomic(out_ / (stem + ".json"), report.ToJson().dump(2) + "\n");
  Record(stage, key, {stem + ".json", stem + "_strong.jsonl", stem + "_weak.jsonl"},
         timer.Seconds());
  return report;
}

std::vector<MetricsReport> Pipeline::All() {
  std::vector<MetricsReport> reports;
  for (SplitKind kind : config_.splits) {
    for (NegativesMode mode : {NegativesMode::kHard, NegativesMode::kEasy}) {
      reports.push_back(CompGap(kind, mode));
    }
  }
  const std::vector<SplitKind> order = SummaryOrder(reports);
  std::string csv =
      "split,negatives,modality,strong_map,weak_map,comp_gap_map,strong_cba,weak_cba,"
      "comp_gap_cba,weak_fallback_fraction,episodes\n";
  Json rows = Json::array();
  for (SplitKind kind : order) {
    for (const auto& r : reports) {
      if (r.kind != kind) continue;
      csv += std::string(SplitKindName(kind)) + "," + std::string(NegativesModeName(r.mode)) +
             ",schema-oracle," + Fixed(r.strong.map) + "," + Fixed(r.weak.map) + "," +
             Fixed(r.gap_map) + "," + Fixed(r.strong.cba) + "," + Fixed(r.weak.cba) + "," +
             Fixed(r.gap_cba) + "," + Fixed(r.weak.fallback_fraction) + "," +
             std::to_string(r.strong.episodes.size()) + "\n";
      rows.push_back(r.ToJson());
    }
  }
  Json summary;
  std::vector<std::string> names;
  for (SplitKind k : order) names.emplace_back(SplitKindName(k));
  summary["order"] = names;
  summary["reports"] = std::move(rows);

  const std::string stage = "summary";
  const std::string key = KeyOf(summary);
  if (Fresh(stage, key)) return reports;
  Timer timer;
  WriteFileAtomic(out_ / "summary.csv", csv);
  WriteFileAtomic(out_ / "summary.json", summary.dump(2) + "\n");
  Record(stage, key, {"summary.csv", "summary.json"}, timer.Seconds());
  return reports;
}

}  // namespace curi
