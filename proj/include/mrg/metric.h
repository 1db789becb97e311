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
#ifndef MRG_METRIC_H_
#define MRG_METRIC_H_

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mrg/dialogue.h"
#include "mrg/geometry.h"
#include "mrg/similarity.h"

namespace mrg {

inline constexpr double kDefaultLambda = 0.3;
inline constexpr double kDefaultTau = 0.3;
inline constexpr double kDefaultSuccessIou = 0.5;

struct EvalConfig {
  // Weight of the text term in the single-round score.
  double lambda = kDefaultLambda;
  // Per-round truncation thresholds. A single value applies to every round;
  // otherwise there must be at least as many values as rounds.
  std::vector<double> tau = {kDefaultTau};
  double iou_success_threshold = kDefaultSuccessIou;
  AnswerCleaningConfig cleaning;

  double tau_for_round(std::size_t round_index0) const;
  // Throws mrg::StructuralError on values outside [0, 1] or an empty tau.
  void Validate() const;
};

struct PredictedRound {
  int index = 1;
  std::string answer;
  std::vector<Box> boxes;
};

struct PredictionRecord {
  std::string thread_id;
  // Prompt variant label for single-round grounding runs; may be empty.
  std::string prompt;
  std::vector<PredictedRound> rounds;
};

struct BoxMatching {
  // For each ground-truth box, the matched prediction index or -1.
  std::vector<int> assignment;
  // IoU per ground-truth box, 0 for unmatched ones, in ground-truth order.
  std::vector<double> ious;
};

// Maximum-total-IoU one-to-one assignment (Hungarian method). Extra
// predictions are ignored; unmatched ground truth scores 0. The result does
// not depend on the order of the predicted boxes.
BoxMatching MatchBoxes(std::span<const Box> predicted,
                       std::span<const Box> ground_truth);

struct RoundScore {
  int index = 1;
  double similarity = 0.0;
  // Number of ground-truth boxes; 0 means the text term alone is the score.
  std::size_t num_gt_boxes = 0;
  // Mean matched IoU; absent when num_gt_boxes == 0.
  std::optional<double> mean_iou;
  // Score before truncation.
  double raw = 0.0;
  // Score after truncation (0 for rounds following a failed round).
  double truncated = 0.0;
};

// Combines the two terms: similarity alone when there are no ground-truth
// boxes, otherwise lambda * similarity + (1 - lambda) * mean IoU.
double CombineRoundScore(double similarity, std::span<const double> ious,
                         double lambda);

// Scores one round. Answer texts are cleaned with
// NormalizeAnswerText before the provider sees them. Predicted boxes are
// ignored when the ground truth has none.
RoundScore SingleRoundScore(const PredictedRound& prediction,
                            const Round& ground_truth, const EvalConfig& config,
                            SimilarityProvider& provider);

struct ThreadReport {
  std::string thread_id;
  std::vector<RoundScore> rounds;
  // 1-based index of the first round scoring below its threshold.
  std::optional<int> truncated_at;
  // Mean of the truncated round scores over all rounds.
  double thread_score = 0.0;
};

// Applies truncation to already computed raw round scores: the first round
// with raw < tau_n keeps its score, every later round becomes 0. Returns the
// truncation round (1-based) if any.
std::optional<int> ApplyTruncation(std::vector<RoundScore>& rounds,
                                   const EvalConfig& config);

// Scores a full thread. All similarity requests go to the provider in one
// batch. Throws mrg::StructuralError when the prediction does not align
// with the ground truth (thread id, round count, round indices); provider
// errors propagate.
ThreadReport ThreadScore(const PredictionRecord& prediction,
                         const Thread& ground_truth, const EvalConfig& config,
                         SimilarityProvider& provider);

struct GroundingMetrics {
  double mean_iou = 0.0;
  double success_rate = 0.0;
  // Absent when no case succeeded.
  std::optional<double> mean_iou_at_success;
  std::size_t cases = 0;
};

// Throws mrg::StructuralError for an empty case list.
GroundingMetrics ComputeGroundingMetrics(std::span<const double> case_ious,
                                         const EvalConfig& config);

// Similarity of a region caption to its reference after answer cleaning.
// An empty prediction against a non-empty reference scores 0.
double ReferringScore(std::string_view predicted, std::string_view reference,
                      SimilarityProvider& provider,
                      const AnswerCleaningConfig& cleaning = {});

// Keeps the first three rounds of a logic-chain test thread. Returns
// std::nullopt (and reports through notice) for threads with fewer rounds.
std::optional<Thread> CurateTestThread(
    const Thread& thread,
    const std::function<void(const std::string&)>& notice = {});

// The three single-round grounding prompt variants, with the object name
// filled in.
std::vector<std::string> GroundingPrompts(std::string_view name);
// Labels used for the prompt variants in reports: "where", "find", "position".
const std::vector<std::string>& GroundingPromptLabels();

}  // namespace mrg

#endif  // MRG_METRIC_H_
