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
#ifndef MRG_TESTS_ORACLES_H_
#define MRG_TESTS_ORACLES_H_

// Reference implementations used by the unit and acceptance tests. They are
// written independently of the library code (brute force, rasterization,
// subset enumeration) and trade speed for obviousness.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "mrg/dataset.h"
#include "mrg/dialogue.h"
#include "mrg/geometry.h"
#include "mrg/similarity.h"

namespace mrg::testing {

// ---------------------------------------------------------------------------
// Geometry.

// IoU by sampling pixel centers of a size x size grid.
inline double RasterIou(const Box& a, const Box& b, int size = 1000) {
  auto inside = [](const Box& r, double x, double y) {
    return x >= r.x1 && x <= r.x2 && y >= r.y1 && y <= r.y2;
  };
  std::int64_t inter = 0, uni = 0;
  for (int j = 0; j < size; ++j) {
    const double y = (j + 0.5) / size;
    const bool row_a = y >= a.y1 && y <= a.y2;
    const bool row_b = y >= b.y1 && y <= b.y2;
    if (!row_a && !row_b) continue;
    for (int i = 0; i < size; ++i) {
      const double x = (i + 0.5) / size;
      const bool in_a = row_a && inside(a, x, y);
      const bool in_b = row_b && inside(b, x, y);
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

// IoU on a size x size grid where every pixel contributes the fraction of
// its cell covered by each box (anti-aliased coverage). Binary masks carry
// about one pixel of quantization per edge, which is too coarse for a 2e-3
// comparison at this resolution.
inline double CoverageRasterIou(const Box& a, const Box& b, int size = 1000) {
  auto overlap = [](double lo, double hi, double c0, double c1) {
    return std::max(0.0, std::min(hi, c1) - std::max(lo, c0));
  };
  const double cell = 1.0 / size;
  const int j0 = static_cast<int>(std::min(a.y1, b.y1) * size);
  const int j1 = std::min(size - 1, static_cast<int>(std::max(a.y2, b.y2) * size));
  const int i0 = static_cast<int>(std::min(a.x1, b.x1) * size);
  const int i1 = std::min(size - 1, static_cast<int>(std::max(a.x2, b.x2) * size));
  double inter = 0.0, uni = 0.0;
  for (int j = j0; j <= j1; ++j) {
    const double c0 = j * cell, c1 = (j + 1) * cell;
    const double ha = overlap(a.y1, a.y2, c0, c1);
    const double hb = overlap(b.y1, b.y2, c0, c1);
    const double hab = overlap(std::max(a.y1, b.y1), std::min(a.y2, b.y2), c0, c1);
    for (int i = i0; i <= i1; ++i) {
      const double r0 = i * cell, r1 = (i + 1) * cell;
      const double ca = ha * overlap(a.x1, a.x2, r0, r1);
      const double cb = hb * overlap(b.x1, b.x2, r0, r1);
      const double cab =
          hab * overlap(std::max(a.x1, b.x1), std::min(a.x2, b.x2), r0, r1);
      inter += cab;
      uni += ca + cb - cab;
    }
  }
  return uni <= 0.0 ? 0.0 : inter / uni;
}

inline Box RandomBox(std::mt19937_64& gen, double min_side = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  while (true) {
    double x1 = u(gen), x2 = u(gen), y1 = u(gen), y2 = u(gen);
    if (x1 > x2) std::swap(x1, x2);
    if (y1 > y2) std::swap(y1, y2);
    if (x2 - x1 >= min_side && y2 - y1 >= min_side) return {x1, y1, x2, y2};
  }
}

// A box near `base`, so random pairs overlap often.
inline Box JitterBox(std::mt19937_64& gen, const Box& base, double amount) {
  std::uniform_real_distribution<double> u(-amount, amount);
  double x1 = std::clamp(base.x1 + u(gen), 0.0, 1.0);
  double x2 = std::clamp(base.x2 + u(gen), 0.0, 1.0);
  double y1 = std::clamp(base.y1 + u(gen), 0.0, 1.0);
  double y2 = std::clamp(base.y2 + u(gen), 0.0, 1.0);
  if (x1 > x2) std::swap(x1, x2);
  if (y1 > y2) std::swap(y1, y2);
  return {x1, y1, x2, y2};
}

// The kept set of greedy suppression is the unique subset K such that a box
// is in K exactly when no higher-priority member of K overlaps it at the
// threshold. Found here by trying every subset.
inline std::vector<std::size_t> ReferenceNmsIds(
    const std::vector<ScoredBox>& boxes, double threshold) {
  const std::size_t n = boxes.size();
  auto higher = [&](std::size_t i, std::size_t j) {  // i outranks j
    if (boxes[i].score != boxes[j].score) return boxes[i].score > boxes[j].score;
    return boxes[i].object_id < boxes[j].object_id;
  };
  std::vector<std::uint32_t> blockers(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i != j && higher(i, j) && Iou(boxes[i].box, boxes[j].box) >= threshold) {
        blockers[j] |= 1u << i;
      }
    }
  }
  std::vector<std::uint32_t> solutions;
  for (std::uint32_t k = 0; k < (1u << n); ++k) {
    bool ok = true;
    for (std::size_t j = 0; j < n && ok; ++j) {
      const bool in = (k >> j) & 1u;
      ok = in == ((k & blockers[j]) == 0);
    }
    if (ok) solutions.push_back(k);
  }
  if (solutions.size() != 1) return {};  // caller asserts non-empty
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < n; ++j) {
    if ((solutions[0] >> j) & 1u) idx.push_back(j);
  }
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return higher(a, b); });
  std::vector<std::size_t> ids;
  for (std::size_t j : idx) ids.push_back(boxes[j].object_id);
  return ids;
}

// Best total IoU over every injective assignment of ground truth to
// predictions (ground truth may stay unmatched).
inline double BruteForceBestTotalIou(const std::vector<Box>& predicted,
                                     const std::vector<Box>& truth) {
  double best = 0.0;
  std::vector<bool> used(predicted.size(), false);
  auto rec = [&](auto&& self, std::size_t g, double acc) -> void {
    if (g == truth.size()) {
      best = std::max(best, acc);
      return;
    }
    self(self, g + 1, acc);
    for (std::size_t p = 0; p < predicted.size(); ++p) {
      if (used[p]) continue;
      used[p] = true;
      self(self, g + 1, acc + Iou(predicted[p], truth[g]));
      used[p] = false;
    }
  };
  rec(rec, 0, 0.0);
  return best;
}

// ---------------------------------------------------------------------------
// Metric.

// The single-round score written out in one expression.
inline double SingleRoundOracle(double sim, const std::vector<double>& ious,
                                double lambda) {
  return ious.empty() ? sim
                      : lambda * sim + (1 - lambda) *
                                           std::accumulate(ious.begin(),
                                                           ious.end(), 0.0) /
                                           ious.size();
}

// Returns fixed similarities keyed by the reference text.
class ScriptedProvider : public SimilarityProvider {
 public:
  explicit ScriptedProvider(std::map<std::string, double> by_reference)
      : by_reference_(std::move(by_reference)) {}

  double Score(std::string_view, std::string_view reference) override {
    ++calls_;
    const auto it = by_reference_.find(std::string(reference));
    return it == by_reference_.end() ? 0.0 : it->second;
  }
  std::string Name() const override { return "scripted"; }
  int calls() const { return calls_; }

 private:
  std::map<std::string, double> by_reference_;
  int calls_ = 0;
};

// ---------------------------------------------------------------------------
// Logic-chain fixtures from the published prompt examples.

inline Annotation Ann(const std::string& name, Box box) { return {name, box}; }

inline const Box kMan{0.1, 0.3, 0.4, 0.7};
inline const Box kCup{0.1, 0.4, 0.15, 0.45};
inline const Box kWater{0.1, 0.41, 0.15, 0.45};

inline Round MakeRound(int index, std::string q, std::vector<Annotation> qa,
                       std::string a, std::vector<Annotation> aa) {
  Round r;
  r.index = index;
  r.question = std::move(q);
  r.answer = std::move(a);
  r.question_annotations = std::move(qa);
  r.answer_annotations = std::move(aa);
  r.grounding_required = !r.answer_annotations.empty();
  return r;
}

// man holding cup, cup has water.
inline Thread PositiveChainThread() {
  Thread t;
  t.thread_id = "lc/positive";
  t.image_id = "img-lc";
  t.image_dims = {500, 375};
  t.subset = Subset::kLc;
  t.rounds = {MakeRound(1, "What is the man holding?", {Ann("man", kMan)},
                        "The man is holding a cup.", {Ann("cup", kCup)}),
              MakeRound(2, "What does the cup have?", {Ann("cup", kCup)},
                        "There is water in the cup.", {Ann("water", kWater)})};
  t.chain = RelationshipChain{{{"man", "holding", "cup"}, {"cup", "has", "water"}}};
  return t;
}

// Asks about the object and answers with the subject.
inline Thread ExcludedChainThread() {
  Thread t;
  t.thread_id = "lc/excluded";
  t.image_id = "img-lc";
  t.image_dims = {500, 375};
  t.subset = Subset::kLc;
  t.rounds = {MakeRound(1, "Where is the cup?", {Ann("cup", kCup)},
                        "The cup is held by the man.", {Ann("man", kMan)})};
  t.chain = RelationshipChain{{{"man", "holding", "cup"}}};
  return t;
}

struct Mutation {
  RuleCode expected;
  Thread thread;
};

// One mutation of the positive thread per rule.
inline std::vector<Mutation> ChainMutations() {
  std::vector<Mutation> out;
  {
    Thread t = PositiveChainThread();  // subject annotated in the answer
    t.thread_id = "lc/mut-lc1";
    t.rounds[1].answer_annotations.push_back(Ann("cup", kCup));
    out.push_back({RuleCode::kLc1, t});
  }
  {
    Thread t = PositiveChainThread();  // question object not in prior answer
    t.thread_id = "lc/mut-lc2";
    t.rounds[1].question_annotations.push_back(
        Ann("table", {0.0, 0.5, 0.9, 1.0}));
    out.push_back({RuleCode::kLc2, t});
  }
  {
    Thread t = PositiveChainThread();  // answer names water, no box
    t.thread_id = "lc/mut-lc3";
    t.rounds[1].answer_annotations.clear();
    t.rounds[1].grounding_required = false;
    out.push_back({RuleCode::kLc3, t});
  }
  {
    Thread t = PositiveChainThread();  // first question skips ahead
    t.thread_id = "lc/mut-lc4";
    t.rounds[0].question_annotations = {Ann("water", kWater)};
    out.push_back({RuleCode::kLc4, t});
  }
  {
    Thread t = PositiveChainThread();  // question drops the subject
    t.thread_id = "lc/mut-lc5";
    t.rounds[1].question_annotations.clear();
    out.push_back({RuleCode::kLc5, t});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Split fixtures: MRG and LC threads spread over shared images.

inline std::vector<Thread> SplitFixture() {
  std::vector<Thread> out;
  auto add = [&](Subset subset, int i, int image) {
    Thread t;
    t.thread_id = std::string(ToString(subset)) + "/" + std::to_string(i);
    t.image_id = "img" + std::to_string(image);
    t.image_dims = {640, 480};
    t.subset = subset;
    t.rounds = {MakeRound(1, "What is it?", {}, "A thing.", {})};
    out.push_back(t);
  };
  for (int i = 0; i < 40; ++i) add(Subset::kMrg, i, i % 25);
  for (int i = 0; i < 15; ++i) add(Subset::kLc, i, (i * 7) % 30);
  for (int i = 0; i < 20; ++i) add(Subset::kRef, i, i % 35);
  for (int i = 0; i < 10; ++i) add(Subset::kGnd, i, 30 + i);
  return out;
}

// A single-round thread with one annotated object in question and answer.
inline Thread AnnotatedThread(const std::string& id, Subset subset) {
  Thread t;
  t.thread_id = id;
  t.image_id = "img-" + id;
  t.image_dims = {640, 480};
  t.subset = subset;
  t.rounds = {MakeRound(1, "What is the dog doing?",
                        {Ann("dog", {0.1, 0.1, 0.5, 0.5})},
                        "The dog is chasing a ball.",
                        {Ann("ball", {0.6, 0.6, 0.7, 0.7})})};
  return t;
}

inline bool HasAnyAnnotation(const Thread& t) {
  for (const Round& r : t.rounds) {
    if (!r.question_annotations.empty() || !r.answer_annotations.empty()) {
      return true;
    }
  }
  return false;
}

}  // namespace mrg::testing

#endif  // MRG_TESTS_ORACLES_H_
