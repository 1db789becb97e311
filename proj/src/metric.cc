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

#include <algorithm>
#include <limits>
#include <numeric>

#include "mrg/errors.h"

namespace mrg {
namespace {

// Minimum-cost assignment on a square matrix (rows to columns), potentials
// formulation of the Hungarian method. Returns the column for every row.
std::vector<int> SolveAssignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (std::size_t j = 1; j <= n; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = static_cast<int>(j - 1);
  }
  return row_to_col;
}

bool BoxLess(const Box& a, const Box& b) {
  if (a.x1 != b.x1) return a.x1 < b.x1;
  if (a.y1 != b.y1) return a.y1 < b.y1;
  if (a.x2 != b.x2) return a.x2 < b.x2;
  return a.y2 < b.y2;
}

double Mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

double EvalConfig::tau_for_round(std::size_t round_index0) const {
  if (tau.size() == 1) return tau[0];
  if (round_index0 >= tau.size()) {
    throw StructuralError("no truncation threshold for round " +
                          std::to_string(round_index0 + 1));
  }
  return tau[round_index0];
}

void EvalConfig::Validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(lambda)) throw StructuralError("lambda must lie in [0, 1]");
  if (tau.empty()) throw StructuralError("at least one tau is required");
  if (!std::all_of(tau.begin(), tau.end(), in_unit)) {
    throw StructuralError("tau values must lie in [0, 1]");
  }
  if (!in_unit(iou_success_threshold)) {
    throw StructuralError("IoU success threshold must lie in [0, 1]");
  }
}

BoxMatching MatchBoxes(std::span<const Box> predicted,
                       std::span<const Box> ground_truth) {
  BoxMatching out;
  out.assignment.assign(ground_truth.size(), -1);
  out.ious.assign(ground_truth.size(), 0.0);
  if (ground_truth.empty() || predicted.empty()) return out;

  // Fixed prediction order so ties resolve identically for any input order.
  std::vector<std::size_t> order(predicted.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return BoxLess(predicted[a], predicted[b]);
  });

  const std::size_t n = std::max(predicted.size(), ground_truth.size());
  std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> iou(ground_truth.size(),
                                       std::vector<double>(predicted.size()));
  for (std::size_t g = 0; g < ground_truth.size(); ++g) {
    for (std::size_t k = 0; k < predicted.size(); ++k) {
      iou[g][k] = Iou(predicted[order[k]], ground_truth[g]);
      cost[g][k] = -iou[g][k];
    }
  }
  const std::vector<int> row_to_col = SolveAssignment(cost);
  for (std::size_t g = 0; g < ground_truth.size(); ++g) {
    const int k = row_to_col[g];
    if (k < 0 || static_cast<std::size_t>(k) >= predicted.size()) continue;
    if (iou[g][k] <= 0.0) continue;
    out.assignment[g] = static_cast<int>(order[k]);
    out.ious[g] = iou[g][k];
  }
  return out;
}

double CombineRoundScore(double similarity, std::span<const double> ious,
                         double lambda) {
  if (ious.empty()) return similarity;
  return lambda * similarity + (1.0 - lambda) * Mean(ious);
}

namespace {

RoundScore ScoreWithSimilarity(const PredictedRound& prediction,
                               const Round& ground_truth,
                               const EvalConfig& config, double similarity) {
  RoundScore score;
  score.index = ground_truth.index;
  score.similarity = similarity;
  score.num_gt_boxes = ground_truth.answer_annotations.size();
  std::vector<double> ious;
  if (score.num_gt_boxes > 0) {
    std::vector<Box> gt;
    gt.reserve(score.num_gt_boxes);
    for (const Annotation& a : ground_truth.answer_annotations) {
      gt.push_back(a.box);
    }
    ious = MatchBoxes(prediction.boxes, gt).ious;
    score.mean_iou = Mean(ious);
  }
  score.raw = CombineRoundScore(similarity, ious, config.lambda);
  score.truncated = score.raw;
  return score;
}

}  // namespace

RoundScore SingleRoundScore(const PredictedRound& prediction,
                            const Round& ground_truth, const EvalConfig& config,
                            SimilarityProvider& provider) {
  const double similarity =
      provider.Score(NormalizeAnswerText(prediction.answer, config.cleaning),
                     NormalizeAnswerText(ground_truth.answer, config.cleaning));
  return ScoreWithSimilarity(prediction, ground_truth, config, similarity);
}

std::optional<int> ApplyTruncation(std::vector<RoundScore>& rounds,
                                   const EvalConfig& config) {
  std::optional<int> truncated_at;
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    if (truncated_at) {
      rounds[i].truncated = 0.0;
      continue;
    }
    rounds[i].truncated = rounds[i].raw;
    if (rounds[i].raw < config.tau_for_round(i)) {
      truncated_at = static_cast<int>(i + 1);
    }
  }
  return truncated_at;
}

ThreadReport ThreadScore(const PredictionRecord& prediction,
                         const Thread& ground_truth, const EvalConfig& config,
                         SimilarityProvider& provider) {
  config.Validate();
  if (prediction.thread_id != ground_truth.thread_id) {
    throw StructuralError("prediction for '" + prediction.thread_id +
                          "' scored against thread '" +
                          ground_truth.thread_id + "'");
  }
  const std::size_t n = ground_truth.rounds.size();
  if (prediction.rounds.size() != n) {
    throw StructuralError("thread '" + ground_truth.thread_id + "': " +
                          std::to_string(prediction.rounds.size()) +
                          " predicted rounds for " + std::to_string(n) +
                          " ground-truth rounds");
  }
  if (config.tau.size() > 1 && config.tau.size() < n) {
    throw StructuralError("thread '" + ground_truth.thread_id + "' has " +
                          std::to_string(n) + " rounds but only " +
                          std::to_string(config.tau.size()) +
                          " truncation thresholds");
  }
  std::vector<TextPair> pairs;
  pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (prediction.rounds[i].index != ground_truth.rounds[i].index) {
      throw StructuralError("thread '" + ground_truth.thread_id +
                            "': predicted round index " +
                            std::to_string(prediction.rounds[i].index) +
                            " does not match " +
                            std::to_string(ground_truth.rounds[i].index));
    }
    pairs.push_back(
        {NormalizeAnswerText(prediction.rounds[i].answer, config.cleaning),
         NormalizeAnswerText(ground_truth.rounds[i].answer, config.cleaning)});
  }
  const std::vector<double> similarities = provider.ScoreBatch(pairs);
  if (similarities.size() != n) {
    throw ProtocolError("provider returned " +
                        std::to_string(similarities.size()) + " scores for " +
                        std::to_string(n) + " rounds");
  }

  ThreadReport report;
  report.thread_id = ground_truth.thread_id;
  for (std::size_t i = 0; i < n; ++i) {
    report.rounds.push_back(ScoreWithSimilarity(
        prediction.rounds[i], ground_truth.rounds[i], config, similarities[i]));
  }
  report.truncated_at = ApplyTruncation(report.rounds, config);
  double sum = 0.0;
  for (const RoundScore& r : report.rounds) sum += r.truncated;
  report.thread_score = n == 0 ? 0.0 : sum / static_cast<double>(n);
  return report;
}

GroundingMetrics ComputeGroundingMetrics(std::span<const double> case_ious,
                                         const EvalConfig& config) {
  if (case_ious.empty()) {
    throw StructuralError("grounding metrics need at least one case");
  }
  GroundingMetrics m;
  m.cases = case_ious.size();
  double sum = 0.0;
  double success_sum = 0.0;
  std::size_t successes = 0;
  for (double v : case_ious) {
    sum += v;
    if (v >= config.iou_success_threshold) {
      success_sum += v;
      ++successes;
    }
  }
  m.mean_iou = sum / static_cast<double>(m.cases);
  m.success_rate = static_cast<double>(successes) / static_cast<double>(m.cases);
  if (successes > 0) {
    m.mean_iou_at_success = success_sum / static_cast<double>(successes);
  }
  return m;
}

double ReferringScore(std::string_view predicted, std::string_view reference,
                      SimilarityProvider& provider,
                      const AnswerCleaningConfig& cleaning) {
  const std::string cand = NormalizeAnswerText(predicted, cleaning);
  const std::string ref = NormalizeAnswerText(reference, cleaning);
  if (cand.empty() && !ref.empty()) return 0.0;
  return provider.Score(cand, ref);
}

std::optional<Thread> CurateTestThread(
    const Thread& thread,
    const std::function<void(const std::string&)>& notice) {
  if (thread.rounds.size() < 3) {
    if (notice) {
      notice("thread '" + thread.thread_id + "' has " +
             std::to_string(thread.rounds.size()) +
             " rounds; excluded from the three-round protocol");
    }
    return std::nullopt;
  }
  Thread out = thread;
  out.rounds.resize(3);
  if (out.chain && out.chain->links.size() > 3) out.chain->links.resize(3);
  return out;
}

std::vector<std::string> GroundingPrompts(std::string_view name) {
  const std::string n(name);
  return {"Where is the " + n + "?", "Can you find the " + n + "?",
          "Can you tell the position of the " + n + "?"};
}

const std::vector<std::string>& GroundingPromptLabels() {
  static const std::vector<std::string> kLabels = {"where", "find", "position"};
  return kLabels;
}

}  // namespace mrg
