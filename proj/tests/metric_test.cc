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
#include "mrg/metric.h"

#include <gtest/gtest.h>

#include <random>

#include "mrg/errors.h"
#include "oracles.h"

namespace mrg {
namespace {

using testing::Ann;
using testing::MakeRound;

// Hands out a fixed list of similarities, one batch at a time.
class QueueProvider : public SimilarityProvider {
 public:
  explicit QueueProvider(std::vector<double> values) : values_(std::move(values)) {}
  double Score(std::string_view, std::string_view) override {
    return values_.at(next_++);
  }
  std::string Name() const override { return "queue"; }

 private:
  std::vector<double> values_;
  std::size_t next_ = 0;
};

Thread TextThread(int rounds) {
  Thread t;
  t.thread_id = "t";
  t.image_id = "i";
  for (int r = 1; r <= rounds; ++r) {
    t.rounds.push_back(MakeRound(r, "Q" + std::to_string(r), {},
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

TEST(DefaultsTest, DocumentedValues) {
  EXPECT_EQ(kDefaultLambda, 0.3);
  EXPECT_EQ(kDefaultTau, 0.3);
  const EvalConfig c;
  EXPECT_EQ(c.lambda, 0.3);
  EXPECT_EQ(c.tau, std::vector<double>{0.3});
  EXPECT_EQ(c.iou_success_threshold, 0.5);
}

TEST(SingleRoundTest, MatchesFormula) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> m(0, 6);
  for (int i = 0; i < 1000; ++i) {
    const double sim = u(gen), lambda = u(gen);
    std::vector<double> ious(m(gen));
    for (double& v : ious) v = u(gen);
    EXPECT_NEAR(CombineRoundScore(sim, ious, lambda),
                testing::SingleRoundOracle(sim, ious, lambda), 1e-12);
  }
}

TEST(SingleRoundTest, TextOnlyRoundIsSimilarity) {
  testing::ScriptedProvider provider({{"a red cup.", 0.7}});
  const Round gt = MakeRound(1, "What is it?", {}, "It is a red cup.", {});
  const RoundScore s = SingleRoundScore({1, "a cup", {}}, gt, EvalConfig{}, provider);
  EXPECT_EQ(s.raw, 0.7);  // normalized reference drops "It is"
  EXPECT_FALSE(s.mean_iou);
  EXPECT_EQ(s.num_gt_boxes, 0u);
}

TEST(SingleRoundTest, GroundedRound) {
  testing::ScriptedProvider provider({{"Here.", 0.5}});
  const Box a{0, 0, 0.5, 0.5}, b{0.5, 0.5, 1, 1};
  const Round gt = MakeRound(1, "Where?", {}, "Here.", {Ann("a", a), Ann("b", b)});
  // One exact box, one missing.
  const RoundScore s = SingleRoundScore({1, "x", {a}}, gt, EvalConfig{}, provider);
  EXPECT_EQ(*s.mean_iou, 0.5);
  EXPECT_DOUBLE_EQ(s.raw, 0.3 * 0.5 + 0.7 * 0.5);
}

TEST(TruncationTest, FailingFirstRound) {
  const Thread t = TextThread(3);
  QueueProvider provider({0.2, 0.9, 0.9});
  const ThreadReport r = ThreadScore(PredictFor(t), t, EvalConfig{}, provider);
  EXPECT_EQ(r.thread_score, 0.2 / 3);
  EXPECT_EQ(r.truncated_at, 1);
  EXPECT_EQ(r.rounds[0].truncated, 0.2);
  EXPECT_EQ(r.rounds[1].truncated, 0.0);
  EXPECT_EQ(r.rounds[2].raw, 0.9);
}

TEST(TruncationTest, StrictThreshold) {
  const Thread t = TextThread(2);
  QueueProvider provider({0.3, 0.5});
  const ThreadReport r = ThreadScore(PredictFor(t), t, EvalConfig{}, provider);
  EXPECT_FALSE(r.truncated_at);  // 0.3 is not below 0.3
  EXPECT_DOUBLE_EQ(r.thread_score, 0.4);
}

TEST(TruncationTest, PerRoundThresholds) {
  const Thread t = TextThread(3);
  EvalConfig c;
  c.tau = {0.1, 0.6, 0.1};
  QueueProvider provider({0.5, 0.5, 0.9});
  const ThreadReport r = ThreadScore(PredictFor(t), t, c, provider);
  EXPECT_EQ(r.truncated_at, 2);
  EXPECT_DOUBLE_EQ(r.thread_score, 1.0 / 3);
  c.tau = {0.1, 0.6};
  QueueProvider again({0.5, 0.5, 0.9});
  EXPECT_THROW(ThreadScore(PredictFor(t), t, c, again), StructuralError);
}

TEST(TruncationTest, NeverRaisesTheScore) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> n(1, 8);
  for (int i = 0; i < 10000; ++i) {
    const Thread t = TextThread(n(gen));
    std::vector<double> sims(t.rounds.size());
    for (double& s : sims) s = u(gen);
    EvalConfig with, without;
    with.tau = {u(gen)};
    without.tau = {0.0};
    QueueProvider p1(sims), p2(sims);
    const double truncated = ThreadScore(PredictFor(t), t, with, p1).thread_score;
    const double plain = ThreadScore(PredictFor(t), t, without, p2).thread_score;
    ASSERT_LE(truncated, plain);
  }
}

TEST(ThreadScoreTest, Misalignment) {
  const Thread t = TextThread(2);
  QueueProvider p({0.5, 0.5, 0.5, 0.5});
  PredictionRecord wrong_id = PredictFor(t);
  wrong_id.thread_id = "other";
  EXPECT_THROW(ThreadScore(wrong_id, t, EvalConfig{}, p), StructuralError);
  PredictionRecord short_pred = PredictFor(t);
  short_pred.rounds.pop_back();
  EXPECT_THROW(ThreadScore(short_pred, t, EvalConfig{}, p), StructuralError);
  PredictionRecord bad_index = PredictFor(t);
  bad_index.rounds[1].index = 7;
  EXPECT_THROW(ThreadScore(bad_index, t, EvalConfig{}, p), StructuralError);
  EvalConfig bad;
  bad.lambda = 1.5;
  EXPECT_THROW(ThreadScore(PredictFor(t), t, bad, p), StructuralError);
}

TEST(ThreadScoreTest, SingleBatch) {
  // The scripted provider counts Score calls made through the default batch.
  const Thread t = TextThread(4);
  testing::ScriptedProvider p({});
  ThreadScore(PredictFor(t), t, EvalConfig{}, p);
  EXPECT_EQ(p.calls(), 4);
}

TEST(GroundingMetricsTest, Example) {
  const std::vector<double> ious = {0.6, 0.4};
  const GroundingMetrics m = ComputeGroundingMetrics(ious, EvalConfig{});
  EXPECT_EQ(m.mean_iou, 0.5);
  EXPECT_EQ(m.success_rate, 0.5);
  EXPECT_EQ(*m.mean_iou_at_success, 0.6);
  EXPECT_EQ(m.cases, 2u);
}

TEST(GroundingMetricsTest, Invariants) {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> n(1, 30);
  for (int i = 0; i < 2000; ++i) {
    std::vector<double> ious(n(gen));
    for (double& v : ious) v = i % 4 == 0 ? 0.5 : u(gen);
    const GroundingMetrics m = ComputeGroundingMetrics(ious, EvalConfig{});
    if (m.success_rate > 0) {
      ASSERT_TRUE(m.mean_iou_at_success);
      EXPECT_GE(*m.mean_iou_at_success, 0.5);
      EXPECT_GE(*m.mean_iou_at_success, m.mean_iou);
    } else {
      EXPECT_FALSE(m.mean_iou_at_success);
    }
  }
  EXPECT_THROW(ComputeGroundingMetrics({}, EvalConfig{}), StructuralError);
}

TEST(ReferringTest, Scores) {
  LexicalProvider p;
  EXPECT_EQ(ReferringScore("It is a red cup.", "a red cup.", p), 1.0);
  EXPECT_EQ(ReferringScore("region2", "a cup", p), 0.0);
  EXPECT_EQ(ReferringScore("", "", p), 1.0);
}

TEST(CurateTest, CutsToThreeRounds) {
  Thread t = testing::PositiveChainThread();
  std::vector<std::string> notices;
  EXPECT_FALSE(CurateTestThread(t, [&](const std::string& n) { notices.push_back(n); }));
  EXPECT_EQ(notices.size(), 1u);
  t.rounds.push_back(t.rounds[1]);
  t.rounds.push_back(t.rounds[1]);
  t.rounds[2].index = 3;
  t.rounds[3].index = 4;
  const auto curated = CurateTestThread(t);
  ASSERT_TRUE(curated);
  EXPECT_EQ(curated->rounds.size(), 3u);
}

TEST(PromptsTest, ThreeVariants) {
  EXPECT_EQ(GroundingPrompts("dog"),
            (std::vector<std::string>{"Where is the dog?", "Can you find the dog?",
                                      "Can you tell the position of the dog?"}));
  EXPECT_EQ(GroundingPromptLabels().size(), 3u);
}

TEST(EvalConfigTest, Validate) {
  EvalConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.tau = {};
  EXPECT_THROW(c.Validate(), StructuralError);
  c.tau = {1.2};
  EXPECT_THROW(c.Validate(), StructuralError);
  c.tau = {0.1, 0.2};
  EXPECT_EQ(c.tau_for_round(1), 0.2);
}

}  // namespace
}  // namespace mrg
