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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "curi/digest.h"
#include "curi/episodes.h"
#include "curi/executor.h"
#include "curi/grammar.h"
#include "curi/metrics.h"
#include "curi/oracle.h"
#include "curi/pipeline.h"
#include "oracles/reference.h"

namespace curi {
namespace {

namespace fs = std::filesystem;

// Pinned tolerances and budgets.
constexpr double kExactTolerance = 1e-12;
constexpr double kInstanceIidBudgetSeconds = 5 * 60;
constexpr double kSuiteBudgetSeconds = 60 * 60;
constexpr double kMinEvalsPerSecond = 1e6;
constexpr std::uint64_t kSeeds[] = {0, 1, 2};
constexpr int kOracleEpisodes = 10;
constexpr std::size_t kOracleHypotheses = 50;
constexpr int kApVectors = 1000;
constexpr int kRoundTrips = 10'000;
constexpr std::size_t kAuditEpisodes = 1000;

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void Report(int n, bool pass, const std::string& what) {
  std::printf("criterion %2d: %s  %s\n", n, pass ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  failures += !pass;
}

std::string Fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

RunConfig Desk(std::uint64_t seed, const fs::path& out, int threads) {
  RunConfig c;  // defaults are the desk-scale configuration
  c.seed = seed;
  c.out = out.string();
  c.threads = threads;
  return c;
}

fs::path Fresh(const std::string& name) {
  const fs::path dir = fs::current_path() / "acceptance_out" / name;
  fs::remove_all(dir);
  return dir;
}

std::map<std::string, std::string> Tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().filename() == "manifest.json") continue;
    out[fs::relative(e.path(), dir).string()] = ToHex(Sha256File(e.path()));
  }
  return out;
}

// Outputs and keys recorded in a manifest, without timings.
std::map<std::string, std::string> ManifestDigests(const fs::path& dir) {
  const Manifest m = Manifest::FromJson(nlohmann::json::parse(std::ifstream(dir / "manifest.json")));
  std::map<std::string, std::string> out;
  for (const auto& [stage, rec] : m.stages) {
    out[stage + "#key"] = rec.key;
    for (const auto& [rel, hex] : rec.outputs) out[stage + "#" + rel] = hex;
  }
  return out;
}

bool Contains(const TokenString& t, const std::string& tok) {
  return std::find(t.begin(), t.end(), tok) != t.end();
}

// Token-level scan for the rejection patterns: a universal quantifier with
// S_{-x}; "x P x P =" or "x P x P >"; "S P x P all|any|count=".
bool HasRejectPattern(const TokenString& t) {
  if (Contains(t, "for-all=") && Contains(t, "S_{-x}")) return true;
  for (std::size_t i = 0; i + 4 < t.size(); ++i) {
    const bool same = t[i + 1] == t[i + 3] && t[i + 2] == "x";
    if (t[i] == "x" && same && (t[i + 4] == "=" || t[i + 4] == ">")) return true;
    if (t[i] == "S" && same &&
        (t[i + 4] == "all" || t[i + 4] == "any" || t[i + 4] == "count=")) {
      return true;
    }
  }
  return false;
}

void Run() {
  // Desk-scale runs for every seed. Seed 0 starts with the instance-iid gap
  // alone, so its time covers every upstream stage.
  std::map<std::uint64_t, std::vector<MetricsReport>> hard, easy;
  double suite_seconds = 0.0;
  const fs::path seed0_dir = Fresh("seed0");
  {
    const auto t0 = Clock::now();
    Pipeline p(Desk(0, seed0_dir, 1));
    const MetricsReport h = p.CompGap(SplitKind::kInstanceIid, NegativesMode::kHard);
    const MetricsReport e = p.CompGap(SplitKind::kInstanceIid, NegativesMode::kEasy);
    const double secs = Since(t0);
    suite_seconds = secs;
    const bool zero = h.gap_map == 0.0 && h.gap_cba == 0.0 && e.gap_map == 0.0 && e.gap_cba == 0.0;
    Report(1, zero && secs < kInstanceIidBudgetSeconds,
           Fmt("instance_iid gaps hard map=%g cba=%g, easy map=%g cba=%g; %.1fs (< %.0fs)",
               h.gap_map, h.gap_cba, e.gap_map, e.gap_cba, secs, kInstanceIidBudgetSeconds));
  }
  for (std::uint64_t seed : kSeeds) {
    const fs::path dir = seed == 0 ? seed0_dir : Fresh("seed" + std::to_string(seed));
    const auto t0 = Clock::now();
    Pipeline p(Desk(seed, dir, 1));
    for (const MetricsReport& r : p.All()) {
      (r.mode == NegativesMode::kHard ? hard : easy)[seed].push_back(r);
    }
    if (seed == 0) suite_seconds += Since(t0);
  }

  // 2: the two binding splits have the largest hard-negative mAP gaps.
  {
    int agree = 0;
    std::string detail;
    for (std::uint64_t seed : kSeeds) {
      std::vector<const MetricsReport*> rs;
      for (const auto& r : hard[seed]) rs.push_back(&r);
      std::stable_sort(rs.begin(), rs.end(),
                       [](auto* a, auto* b) { return a->gap_map > b->gap_map; });
      const std::set<SplitKind> top = {rs[0]->kind, rs[1]->kind};
      const bool ok = top == std::set<SplitKind>{SplitKind::kBindingColor, SplitKind::kBindingShape};
      agree += ok;
      detail += Fmt("seed %llu: %s %.3f, %s %.3f, %s %.3f%s; ", (unsigned long long)seed,
                    std::string(SplitKindName(rs[0]->kind)).c_str(), rs[0]->gap_map,
                    std::string(SplitKindName(rs[1]->kind)).c_str(), rs[1]->gap_map,
                    std::string(SplitKindName(rs[2]->kind)).c_str(), rs[2]->gap_map,
                    ok ? "" : " (disagrees)");
    }
    Report(2, agree * 2 > static_cast<int>(std::size(kSeeds)),
           Fmt("%d/%zu seeds agree; ", agree, std::size(kSeeds)) + detail);
  }

  // 3: mAP is the more stringent metric on binding_color.
  {
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed : kSeeds) {
      for (const auto& r : hard[seed]) {
        if (r.kind != SplitKind::kBindingColor) continue;
        ok = ok && r.gap_map > r.gap_cba;
        detail += Fmt("seed %llu map %.3f cba %.3f; ", (unsigned long long)seed, r.gap_map, r.gap_cba);
      }
    }
    Report(3, ok, "binding_color gap(mAP) > gap(CBA): " + detail);
  }

  // 4: easy negatives lower the mean compositional gap, on every seed.
  {
    int lower = 0;
    std::string detail;
    for (std::uint64_t seed : kSeeds) {
      double h = 0.0, e = 0.0;
      int n = 0;
      for (std::size_t i = 0; i < hard[seed].size(); ++i) {
        if (!IsCompositional(hard[seed][i].kind)) continue;
        h += hard[seed][i].gap_map;
        e += easy[seed][i].gap_map;
        ++n;
      }
      h /= n;
      e /= n;
      lower += e < h;
      detail += Fmt("seed %llu hard %.4f easy %.4f (n=%d); ", (unsigned long long)seed, h, e, n);
    }
    Report(4, lower == static_cast<int>(std::size(kSeeds)),
           Fmt("%d/%zu seeds lower; ", lower, std::size(kSeeds)) + detail);
  }

  Pipeline p0(Desk(0, seed0_dir, 1));
  const ScenePool& pool = p0.pool();
  const HypothesisSpace& space = p0.space();

  // 5: posterior and predictive against enumeration.
  {
    std::vector<std::uint64_t> ids;
    std::vector<int> lengths;
    for (std::size_t k = 0; k < kOracleHypotheses; ++k) {
      ids.push_back(space.concepts[k].id);
      lengths.push_back(space.concepts[k].length);
    }
    const OraclePrior prior = MakePrior(OracleKind::kStrong, space, ids);
    double worst = 0.0;
    std::size_t checked = 0;
    for (int i = 0; i < kOracleEpisodes; ++i) {
      const Episode e = SampleEpisode(ids[(i * 13) % kOracleHypotheses], space,
                                      i % 2 ? NegativesMode::kEasy : NegativesMode::kHard,
                                      Rng(1000 + i));
      std::vector<LabeledScene> support;
      std::vector<bool> labels;
      std::vector<std::vector<bool>> truth(kOracleHypotheses);
      for (const Example& ex : e.support) {
        support.push_back({ex.scene, ex.label});
        labels.push_back(ex.label);
        for (std::size_t k = 0; k < kOracleHypotheses; ++k) {
          truth[k].push_back(reference::EvaluateTokens(space.concepts[k].tokens, pool[ex.scene]));
        }
      }
      const std::vector<double> brute = reference::Posterior(lengths, truth, labels);
      const OraclePosterior post = Posterior(prior, space, support);
      std::vector<double> dense(kOracleHypotheses, 0.0);
      for (std::size_t k = 0; k < post.consistent.size(); ++k) dense[post.consistent[k]] = post.weights[k];
      if (brute.empty()) {
        worst = std::max(worst, post.fallback ? 0.0 : 1.0);
        continue;
      }
      for (std::size_t k = 0; k < kOracleHypotheses; ++k) {
        worst = std::max(worst, std::abs(dense[k] - brute[k]));
      }
      std::vector<std::uint64_t> probe;
      for (const Example& ex : e.query) probe.push_back(ex.scene);
      for (std::uint64_t s = 0; s < 1000; ++s) probe.push_back(s * 97 % pool.size());
      for (std::uint64_t s : probe) {
        double expected = 0.0;
        for (std::size_t k = 0; k < kOracleHypotheses; ++k) {
          if (reference::EvaluateTokens(space.concepts[k].tokens, pool[s])) expected += brute[k];
        }
        worst = std::max(worst, std::abs(Predictive(prior, post, space, s) - expected));
        ++checked;
      }
    }
    Report(5, worst <= kExactTolerance,
           Fmt("%d episodes, |H|=%zu, %zu predictive probes; max abs error %.3g (<= %.0e)",
               kOracleEpisodes, kOracleHypotheses, checked, worst, kExactTolerance));
  }

  // 6: average precision against the quadratic recomputation.
  {
    std::mt19937_64 gen(2024);
    double worst = 0.0;
    int with_ties = 0;
    for (int v = 0; v < kApVectors; ++v) {
      const std::size_t n = 2 + gen() % 200;
      const int levels = 1 + static_cast<int>(gen() % 12);
      std::vector<double> s(n);
      std::vector<std::uint8_t> y(n);
      std::vector<std::uint64_t> ids(n);
      for (std::size_t i = 0; i < n; ++i) {
        s[i] = static_cast<double>(gen() % levels) / levels;
        y[i] = gen() % 4 == 0;
        ids[i] = gen();
      }
      y[gen() % n] = 1;
      with_ties += std::set<double>(s.begin(), s.end()).size() < n;
      worst = std::max(worst, std::abs(AveragePrecision(s, y, ids) -
                                       reference::AveragePrecision(s, y, ids)));
    }
    Report(6, worst <= kExactTolerance,
           Fmt("%d vectors (%d with ties); max abs error %.3g (<= %.0e)", kApVectors, with_ties,
               worst, kExactTolerance));
  }

  // 7: parse(serialize(c)) == c.
  {
    const ConceptSampler sampler(GrammarConfig::Default());
    const Rng root(77);
    int ok = 0;
    for (int i = 0; i < kRoundTrips; ++i) {
      Rng rng = root.Substream("roundtrip", i);
      const Concept c = sampler.Sample(rng);
      ok += ParsePostfix(SerializePostfix(c)) == c;
    }
    Report(7, ok == kRoundTrips, Fmt("%d/%d round trips", ok, kRoundTrips));
  }

  // 8: full scan of the accepted space with the tree interpreter.
  {
    std::size_t patterns = 0, window = 0, count_mismatch = 0;
    const FilterThresholds& t = space.thresholds;
    for (const SpaceConcept& c : space.concepts) {
      patterns += HasRejectPattern(c.tokens);
      std::uint64_t n = 0;
      for (const Scene& s : pool.scenes()) n += Evaluate(c.hypothesis, s);
      count_mismatch += n != c.signature.true_count;
      const double rate = static_cast<double>(n) / static_cast<double>(pool.size());
      window += n < t.min_true || rate > t.max_rate;
    }
    Report(8, patterns == 0 && window == 0 && count_mismatch == 0,
           Fmt("%zu concepts x %zu scenes: %zu pattern hits, %zu window violations, "
               "%zu stored-count mismatches",
               space.size(), pool.size(), patterns, window, count_mismatch));
  }

  // 9: audit of stored hard-negative training episodes.
  {
    std::vector<Episode> eps = p0.LoadEpisodes(SplitKind::kBindingColor, NegativesMode::kHard,
                                               EpisodePart::kTrain);
    if (eps.size() > kAuditEpisodes) eps.resize(kAuditEpisodes);
    std::size_t label_bad = 0, count_bad = 0, cover_bad = 0, covered = 0, examples = 0;
    for (const Episode& e : eps) {
      const TokenString& h = space.concepts[*space.Find(e.concept_id)].tokens;
      auto audit = [&](const std::vector<Example>& set, const std::vector<std::uint64_t>& alts) {
        int pos = 0, neg = 0;
        for (const Example& ex : set) {
          ++examples;
          (ex.label ? pos : neg)++;
          label_bad += reference::EvaluateTokens(h, pool[ex.scene]) != ex.label;
          if (!ex.cover) continue;
          ++covered;
          const auto cpos = space.Find(*ex.cover);
          bool ok = !ex.label && cpos &&
                    std::find(alts.begin(), alts.end(), *ex.cover) != alts.end();
          if (ok) {
            const TokenString& alt = space.concepts[*cpos].tokens;
            ok = reference::EvaluateTokens(alt, pool[ex.scene]);
            for (const Example& q : set) {
              if (q.label) ok = ok && reference::EvaluateTokens(alt, pool[q.scene]);
            }
          }
          cover_bad += !ok;
        }
        count_bad += pos != kPositivesPerSet || neg != kNegativesPerSet;
      };
      audit(e.support, e.alt_support);
      audit(e.query, e.alt_query);
    }
    Report(9, eps.size() == kAuditEpisodes && label_bad == 0 && count_bad == 0 && cover_bad == 0,
           Fmt("%zu episodes, %zu examples: %zu label mismatches, %zu bad 5/20 sets, "
               "%zu of %zu covered hard negatives unsound",
               eps.size(), examples, label_bad, count_bad, cover_bad, covered));
  }

  // 10: a second full run with a different thread count.
  {
    const fs::path dir = Fresh("seed0_threads4");
    Pipeline(Desk(0, dir, 4)).All();
    const auto a = Tree(seed0_dir);
    const auto b = Tree(dir);
    const bool same = a == b && ManifestDigests(seed0_dir) == ManifestDigests(dir);
    Report(10, same, Fmt("%zu artifacts compared (threads 1 vs 4): %s", a.size(),
                         same ? "byte-identical" : "differ"));
  }

  // 11: single-thread signature throughput and suite time.
  {
    const PoolIndex index(pool);
    std::vector<CompiledConcept> compiled;
    for (const SpaceConcept& c : space.concepts) compiled.push_back(CompiledConcept::Compile(c.hypothesis));
    const auto t0 = Clock::now();
    std::uint64_t sink = 0;
    for (const auto& c : compiled) sink += c.Run(index)->Count();
    const double secs = Since(t0);
    const double rate = static_cast<double>(compiled.size()) * pool.size() / secs;
    Report(11, rate >= kMinEvalsPerSecond && suite_seconds < kSuiteBudgetSeconds && sink > 0,
           Fmt("%.3g evals/s (>= %.0e); 9-split suite %.1fs (< %.0fs)", rate,
               kMinEvalsPerSecond, suite_seconds, kSuiteBudgetSeconds));
  }
}

}  // namespace
}  // namespace curi

int main() {
  try {
    curi::Run();
  } catch (const std::exception& e) {
    std::printf("acceptance run aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%d criteria failed\n", curi::failures);
  return curi::failures == 0 ? 0 : 1;
}
