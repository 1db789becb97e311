/* Copyright 2026 The mrg-bench Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Acceptance gate. Each check prints one PASS/FAIL line with its runtime;
// the process fails when any check fails or overruns its time budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>

#include "mrg/errors.h"
#include "mrg/harness.h"
#include "oracles.h"

namespace mrg {
namespace {

namespace fs = std::filesystem;
using testing::Ann;
using testing::MakeRound;

struct Outcome {
  bool ok = true;
  std::string detail;

  void Require(bool condition, const std::string& what) {
    if (!condition && ok) {
      ok = false;
      detail = what;
    }
  }
};

// Hands out a fixed list of similarities.
class QueueProvider : public SimilarityProvider {
 public:
  explicit QueueProvider(std::vector<double> v) : values_(std::move(v)) {}
  double Score(std::string_view, std::string_view) override {
    return values_.at(next_++);
  }
  std::string Name() const override { return "queue"; }

 private:
  std::vector<double> values_;
  std::size_t next_ = 0;
};

Thread TextThread(std::size_t rounds) {
  Thread t;
  t.thread_id = "t";
  t.image_id = "i";
  for (std::size_t r = 1; r <= rounds; ++r) {
    t.rounds.push_back(MakeRound(static_cast<int>(r), "Q", {},
                                 "answer " + std::to_string(r), {}));
  }
  return t;
}

PredictionRecord PredictFor(const Thread& t) {
  PredictionRecord p;
  p.thread_id = t.thread_id;
  for (const Round& r : t.rounds) p.rounds.push_back({r.index, "guess", {}});
  return p;
}

std::string Sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

Outcome SingleRoundExactness() {
  Outcome o;
  o.Require(kDefaultLambda == 0.3 && kDefaultTau == 0.3, "default lambda/tau");
  const EvalConfig defaults;
  o.Require(defaults.lambda == 0.3 && defaults.tau == std::vector<double>{0.3},
            "EvalConfig defaults");
  std::mt19937_64 gen(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> m(0, 8);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double sim = u(gen), lambda = u(gen);
    std::vector<double> ious(m(gen));
    for (double& v : ious) v = u(gen);
    worst = std::max(worst, std::abs(CombineRoundScore(sim, ious, lambda) -
                                     testing::SingleRoundOracle(sim, ious, lambda)));
  }
  // The same formula through the full scoring path.
  for (int i = 0; i < 200; ++i) {
    const Box gt{0.1, 0.1, 0.5, 0.5};
    const Box pred = testing::JitterBox(gen, gt, 0.2);
    const double sim = u(gen);
    Round round = MakeRound(1, "Where?", {}, "here", {Ann("x", gt)});
    testing::ScriptedProvider provider({{"here", sim}});
    const RoundScore s = SingleRoundScore({1, "there", {pred}}, round, defaults, provider);
    worst = std::max(worst, std::abs(s.raw - testing::SingleRoundOracle(
                                                 sim, {Iou(pred, gt)}, 0.3)));
  }
  o.Require(worst <= 1e-12, "max deviation " + Sci(worst));
  if (o.ok) o.detail = "1200 cases, max deviation " + Sci(worst);
  return o;
}

Outcome TruncationSemantics() {
  Outcome o;
  {
    const Thread t = TextThread(3);
    QueueProvider p({0.2, 0.95, 0.95});
    const ThreadReport r = ThreadScore(PredictFor(t), t, EvalConfig{}, p);
    o.Require(r.thread_score == 0.2 / 3, "fixture T != 0.2/3");
    o.Require(r.truncated_at == 1, "fixture truncation round");
  }
  std::mt19937_64 gen(202);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> n(1, 10);
  for (int i = 0; i < 10000 && o.ok; ++i) {
    const Thread t = TextThread(n(gen));
    std::vector<double> sims(t.rounds.size());
    for (double& s : sims) s = u(gen);
    EvalConfig with, without;
    with.tau = {u(gen)};
    without.tau = {0.0};
    QueueProvider p1(sims), p2(sims);
    o.Require(ThreadScore(PredictFor(t), t, with, p1).thread_score <=
                  ThreadScore(PredictFor(t), t, without, p2).thread_score,
              "T(tau) > T(0) at thread " + std::to_string(i));
  }
  if (o.ok) o.detail = "T = 0.2/3 exactly; 10000 random threads monotone";
  return o;
}

Outcome IouOracle() {
  Outcome o;
  std::mt19937_64 gen(303);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Box a = testing::RandomBox(gen);
    const Box b = i % 2 ? testing::RandomBox(gen) : testing::JitterBox(gen, a, 0.15);
    worst = std::max(worst, std::abs(Iou(a, b) - testing::CoverageRasterIou(a, b)));
  }
  o.Require(worst <= 2e-3, "random pairs deviate by " + Sci(worst));
  // Integer-coordinate fixtures on a 1000 x 1000 pixel grid: exact.
  std::uniform_int_distribution<int> c(0, 1000);
  int exact = 0;
  for (int i = 0; i < 25; ++i) {
    int v[8];
    for (int& x : v) x = c(gen);
    if (v[0] > v[2]) std::swap(v[0], v[2]);
    if (v[1] > v[3]) std::swap(v[1], v[3]);
    if (v[4] > v[6]) std::swap(v[4], v[6]);
    if (v[5] > v[7]) std::swap(v[5], v[7]);
    const ImageDims dims{1000, 1000};
    const Box a = Convert({double(v[0]), double(v[1]), double(v[2]), double(v[3])},
                          BoxFormat::kCorners, dims);
    const Box b = Convert({double(v[4]), double(v[5]), double(v[6]), double(v[7])},
                          BoxFormat::kCorners, dims);
    // Exact pixel counts.
    const long ix = std::max(0, std::min(v[2], v[6]) - std::max(v[0], v[4]));
    const long iy = std::max(0, std::min(v[3], v[7]) - std::max(v[1], v[5]));
    const long area_a = long(v[2] - v[0]) * (v[3] - v[1]);
    const long area_b = long(v[6] - v[4]) * (v[7] - v[5]);
    if (area_a == 0 || area_b == 0) continue;
    const double counted = double(ix * iy) / double(area_a + area_b - ix * iy);
    o.Require(std::abs(Iou(a, b) - counted) <= 1e-12, "integer fixture mismatch");
    o.Require(std::abs(testing::RasterIou(a, b) - counted) <= 1e-12,
              "rasterizer disagrees with pixel counts");
    ++exact;
  }
  o.Require(Iou({0, 0, 0.4, 0.4}, {0.2, 0.2, 0.6, 0.6}) - 1.0 / 7 < 1e-15,
            "half-offset squares");
  o.Require(Iou({0.3, 0.3, 0.3, 0.3}, {0.3, 0.3, 0.3, 0.3}) == 0.0,
            "degenerate boxes");
  if (o.ok) {
    o.detail = "1000 pairs, max deviation " + Sci(worst) + "; " +
               std::to_string(exact) + " integer fixtures exact";
  }
  return o;
}

Outcome BoxMatchingCheck() {
  Outcome o;
  std::mt19937_64 gen(404);
  std::uniform_int_distribution<int> gt_count(0, 6), pred_count(0, 7);
  for (int i = 0; i < 500 && o.ok; ++i) {
    std::vector<Box> truth, predicted;
    const int m = gt_count(gen), n = pred_count(gen);
    for (int k = 0; k < m; ++k) truth.push_back(testing::RandomBox(gen, 0.05));
    for (int k = 0; k < n; ++k) {
      predicted.push_back(k < m ? testing::JitterBox(gen, truth[k], 0.2)
                                : testing::RandomBox(gen, 0.05));
    }
    std::shuffle(predicted.begin(), predicted.end(), gen);
    const auto match = MatchBoxes(predicted, truth);
    double total = 0.0;
    for (double v : match.ious) total += v;
    const double best = testing::BruteForceBestTotalIou(predicted, truth);
    o.Require(std::abs(total - best) <= 1e-9,
              "instance " + std::to_string(i) + ": " + std::to_string(total) +
                  " vs " + std::to_string(best));
  }
  if (o.ok) o.detail = "500 instances equal brute force";
  return o;
}

Outcome NmsReference() {
  Outcome o;
  std::mt19937_64 gen(505);
  std::uniform_int_distribution<std::size_t> size(0, 12);
  std::uniform_int_distribution<int> score(0, 6);
  std::uniform_real_distribution<double> thr(0.05, 1.0);
  for (int trial = 0; trial < 1000 && o.ok; ++trial) {
    std::vector<ScoredBox> boxes;
    const Box anchor = testing::RandomBox(gen, 0.2);
    const std::size_t n = size(gen);
    for (std::size_t i = 0; i < n; ++i) {
      boxes.push_back({i % 3 ? testing::JitterBox(gen, anchor, 0.15)
                             : testing::RandomBox(gen),
                       double(score(gen)), (i * 7) % 13});
    }
    const double t = trial % 10 == 0 ? 1.0 : thr(gen);
    const auto kept = Nms(boxes, t);
    std::vector<std::size_t> ids;
    for (const ScoredBox& b : kept) ids.push_back(b.object_id);
    o.Require(ids == testing::ReferenceNmsIds(boxes, t),
              "trial " + std::to_string(trial) + " differs from reference");
    std::vector<std::size_t> again;
    for (const ScoredBox& b : Nms(kept, t)) again.push_back(b.object_id);
    o.Require(again == ids, "not idempotent at trial " + std::to_string(trial));
  }
  if (o.ok) o.detail = "1000 trials equal exhaustive reference; idempotent";
  return o;
}

Outcome ParserRoundTrip() {
  Outcome o;
  const AnnotatedText sample = ParseAnnotatedText(
      "What is the color of the shirt of the man? <man: [0.1, 0.1, 0.3, 0.5], "
      "shirt: [0.1, 0.2, 0.3, 0.4]>");
  o.Require(sample.text == "What is the color of the shirt of the man?" &&
                sample.annotations ==
                    std::vector<Annotation>{Ann("man", {0.1, 0.1, 0.3, 0.5}),
                                            Ann("shirt", {0.1, 0.2, 0.3, 0.4})},
            "reference example");
  o.Require(ParseAnnotatedText(RenderAnnotatedText(sample.text,
                                                   sample.annotations)) ==
                sample,
            "reference example round trip");

  std::mt19937_64 gen(606);
  static const char kText[] = "abcdefghijklmnopqrstuvwxyzXYZ0123456789.,?!'-:;()[]";
  static const char kName[] = "abcdefghijklmnopqrstuvwxyz";
  std::uniform_int_distribution<int> words(0, 12), len(1, 8), count(0, 4), idx(0, 9);
  std::uniform_int_distribution<int> grid(0, 1000000);
  std::uniform_int_distribution<std::size_t> tc(0, sizeof(kText) - 2), nc(0, sizeof(kName) - 2);
  for (int i = 0; i < 10000 && o.ok; ++i) {
    AnnotatedText in;
    for (int w = words(gen); w > 0; --w) {
      if (!in.text.empty()) in.text += ' ';
      for (int k = len(gen); k > 0; --k) in.text += kText[tc(gen)];
    }
    for (int a = count(gen); a > 0; --a) {
      std::string name;
      for (int k = len(gen); k > 0; --k) name += kName[nc(gen)];
      if (const int j = idx(gen); j > 0) name += "_" + std::to_string(j);
      int c[4] = {grid(gen), grid(gen), grid(gen), grid(gen)};
      if (c[0] > c[2]) std::swap(c[0], c[2]);
      if (c[1] > c[3]) std::swap(c[1], c[3]);
      in.annotations.push_back({name, {c[0] / 1e6, c[1] / 1e6, c[2] / 1e6, c[3] / 1e6}});
    }
    const std::string rendered = RenderAnnotatedText(in.text, in.annotations);
    o.Require(ParseAnnotatedText(rendered) == in, "mismatch on: " + rendered);
  }
  if (o.ok) o.detail = "10000 fuzzed pairs and the reference example";
  return o;
}

Outcome LogicChainValidator() {
  Outcome o;
  const Thread positive = testing::PositiveChainThread();
  o.Require(ValidateLogicChain(positive, *positive.chain).empty(),
            "positive example has violations");
  const Thread excluded = testing::ExcludedChainThread();
  bool lc4 = false;
  for (const Violation& v : ValidateLogicChain(excluded, *excluded.chain)) {
    lc4 = lc4 || v.code == RuleCode::kLc4;
  }
  o.Require(lc4, "excluded example does not trigger LC4");
  for (const testing::Mutation& m : testing::ChainMutations()) {
    std::set<RuleCode> codes;
    for (const Violation& v : ValidateLogicChain(m.thread, *m.thread.chain)) {
      codes.insert(v.code);
    }
    o.Require(codes == std::set<RuleCode>{m.expected},
              m.thread.thread_id + " does not trigger exactly " +
                  std::string(ToString(m.expected)));
  }
  if (o.ok) o.detail = "positive clean, excluded LC4, 5 mutations exact";
  return o;
}

Outcome SplitContract() {
  Outcome o;
  const auto threads = testing::SplitFixture();
  Holdout h;
  h.counts = {{Subset::kMrg, 8}, {Subset::kLc, 2}};
  for (std::uint64_t seed = 0; seed < 100 && o.ok; ++seed) {
    const Split s = SplitDataset(threads, h, seed);
    std::set<std::string> images;
    std::size_t mrg = 0, lc = 0;
    for (const Thread& t : s.test) {
      images.insert(t.image_id);
      mrg += t.subset == Subset::kMrg;
      lc += t.subset == Subset::kLc;
    }
    o.Require(mrg == 8 && lc == 2, "holdout counts at seed " + std::to_string(seed));
    for (const Thread& t : s.train) {
      o.Require(!images.count(t.image_id),
                "image overlap at seed " + std::to_string(seed));
    }
  }
  o.Require(Holdout{}.counts.at(Subset::kMrg) == 800 &&
                Holdout{}.counts.at(Subset::kLc) == 200,
            "default holdout is not 800/200");
  if (o.ok) o.detail = "100 seeds, 8/2 holdout, disjoint images";
  return o;
}

Outcome MixerRatios() {
  Outcome o;
  std::map<std::string, std::vector<Thread>> sources;
  for (int i = 0; i < 40; ++i) {
    for (const char* s : {"MRG", "LC", "LLaVA-Instruct-150K"}) {
      sources[s].push_back(
          testing::AnnotatedThread(std::string(s) + std::to_string(i), Subset::kMrg));
    }
  }
  const auto ratios = DefaultRatios(Group::kA);
  o.Require(ratios.size() == 3 && ratios[0].weight == 3 && ratios[1].weight == 2 &&
                ratios[2].weight == 5,
            "group A preset is not 3:2:5");
  GroupMixer mixer(sources, Group::kA, ratios, 707);
  std::vector<int> counts(3, 0);
  const int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) {
    const MixedSample s = mixer.Next();
    ++counts[s.source];
    // Annotation-free, and nothing in the serialized thread looks like a box.
    o.Require(!testing::HasAnyAnnotation(s.thread), "annotation in group A output");
    if (i < 2000) {
      const std::string text = ThreadToJson(s.thread).dump();
      o.Require(text.find("\"box\"") == std::string::npos, "box in group A output");
    }
  }
  const double targets[] = {0.3, 0.2, 0.5};
  std::ostringstream d;
  for (int k = 0; k < 3; ++k) {
    const double f = counts[k] / double(kDraws);
    o.Require(std::abs(f - targets[k]) <= 0.01, "fraction off for " + ratios[k].source);
    d << (k ? " " : "") << f;
  }
  if (o.ok) o.detail = "100000 draws, fractions " + d.str() + ", annotation-free";
  return o;
}

Outcome GroundingMetricsCheck() {
  Outcome o;
  const std::vector<double> example = {0.6, 0.4};
  const GroundingMetrics m = ComputeGroundingMetrics(example, EvalConfig{});
  o.Require(m.mean_iou == 0.5 && m.success_rate == 0.5 &&
                m.mean_iou_at_success && *m.mean_iou_at_success == 0.6,
            "example metrics");
  std::mt19937_64 gen(808);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> n(1, 40);
  for (int i = 0; i < 5000; ++i) {
    std::vector<double> ious(n(gen));
    for (double& v : ious) v = u(gen);
    const GroundingMetrics r = ComputeGroundingMetrics(ious, EvalConfig{});
    if (r.success_rate > 0) {
      o.Require(r.mean_iou_at_success && *r.mean_iou_at_success >= 0.5,
                "mIoU@Succ below 0.5");
    }
  }
  // Column headers in rendered reports.
  EvaluationResult result;
  result.provenance.protocol = Protocol::kGrounding;
  ThreadRecord rec;
  rec.thread_id = "g";
  rec.subset = Subset::kGnd;
  rec.prompt = "where";
  rec.case_ious = {0.6, 0.4};
  result.records = {rec};
  const std::string md = RenderReport(result, ReportFormat::kMarkdown);
  o.Require(md.find("| mIoU | Succ. Rate | mIoU @ Succ |") != std::string::npos,
            "markdown headers");
  const std::string csv = RenderReport(result, ReportFormat::kCsv);
  o.Require(csv.find("mIoU,Succ. Rate,mIoU @ Succ") != std::string::npos,
            "csv headers");
  if (o.ok) o.detail = "(0.5, 0.5, 0.6) exact; invariant over 5000 inputs; headers";
  return o;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome Hermeticity() {
  Outcome o;
  o.Require(ProviderConfig{}.kind == ProviderKind::kLexical,
            "default provider is not lexical");
  // An endpoint in the environment must not be used unless asked for; the
  // port is closed, so any connection attempt would fail the run.
  ::setenv(kEndpointEnvVar, "http://127.0.0.1:9", 1);
  const fs::path dir = fs::temp_directory_path() /
                       ("mrg-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string fixtures = MRG_FIXTURES;
  const std::string cmd =
      std::string(MRG_BENCH_BIN) + " --seed 1 evaluate --corpus " + fixtures +
      "/eval_corpus.jsonl --predictions " + fixtures +
      "/eval_predictions.jsonl --format json --out " + dir.string() +
      " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  ::unsetenv(kEndpointEnvVar);
  o.Require(status == 0, "end-to-end evaluation failed");
  if (o.ok) {
    const Json report = Json::parse(Slurp(dir / "report.json"));
    o.Require(report["provenance"]["provider"] == "lexical", "provider recorded");
  }
  fs::remove_all(dir);
  if (o.ok) o.detail = "end-to-end CLI run on the lexical provider";
  return o;
}

struct Check {
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace mrg

int main() {
  using namespace mrg;
  const std::vector<Check> checks = {
      {"single-round score exactness", 1, SingleRoundExactness},
      {"truncation semantics", 5, TruncationSemantics},
      {"IoU oracle", 30, IouOracle},
      {"box matching", 10, BoxMatchingCheck},
      {"NMS", 10, NmsReference},
      {"parser round-trip", 10, ParserRoundTrip},
      {"logic-chain validator", 10, LogicChainValidator},
      {"split contract", 10, SplitContract},
      {"mixer ratios", 30, MixerRatios},
      {"grounding metrics", 10, GroundingMetricsCheck},
      {"hermeticity", 30, Hermeticity},
  };
  int failed = 0;
  for (const Check& c : checks) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.ok && seconds > c.budget_seconds) {
      o.ok = false;
      o.detail = "over time budget of " + Sci(c.budget_seconds) + " s";
    }
    failed += !o.ok;
    std::printf("%s  %-30s %8.3f s  %s\n", o.ok ? "PASS" : "FAIL", c.name, seconds,
                o.detail.c_str());
  }
  std::printf("%zu checks, %d failed\n", checks.size(), failed);
  return failed == 0 ? 0 : 1;
}
