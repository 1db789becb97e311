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
#ifndef MRG_HARNESS_H_
#define MRG_HARNESS_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mrg/corpus_io.h"
#include "mrg/dataset.h"
#include "mrg/json.h"
#include "mrg/metric.h"
#include "mrg/similarity.h"

namespace mrg {

// Exit status contract of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolations = 1;
inline constexpr int kExitError = 2;

// ---------------------------------------------------------------------------
// Predictions.
//
// JSON-lines, one record per thread (per thread and prompt variant for
// grounding runs). An optional first header record declares box format and
// scale exactly like a corpus header; otherwise the corpus header applies.
//
//   {"thread_id": str, "prompt": str (optional),
//    "rounds": [{"index": 1, "answer": str,
//                "boxes": [[a, b, c, d], ...]}]}        // boxes optional
//
// Without "boxes", boxes are taken from an angle-bracket suffix of the
// answer. Predicted boxes are clamped to the image.
std::vector<PredictionRecord> ReadPredictions(std::istream& in,
                                              const Corpus& corpus);
std::vector<PredictionRecord> ReadPredictionsFile(const std::string& path,
                                                  const Corpus& corpus);
Json PredictionToJson(const PredictionRecord& record);

// ---------------------------------------------------------------------------
// Evaluation.

enum class Protocol { kMultiRound, kReferring, kGrounding };
std::string_view ToString(Protocol protocol);
Protocol ParseProtocol(std::string_view name);

enum class ReportFormat { kMarkdown, kCsv, kJson };
std::string_view ToString(ReportFormat format);
ReportFormat ParseReportFormat(std::string_view name);
std::string FileExtension(ReportFormat format);

// Settings recorded in every report.
struct Provenance {
  Protocol protocol = Protocol::kMultiRound;
  double lambda = kDefaultLambda;
  std::vector<double> tau = {kDefaultTau};
  double iou_success_threshold = kDefaultSuccessIou;
  std::string provider = "lexical";
  std::uint64_t seed = 0;
  bool curated_three_rounds = false;
};

Json ProvenanceToJson(const Provenance& provenance);
Provenance ProvenanceFromJson(const Json& record);

// Per-thread evaluation record; aggregate tables are computed from these
// records alone.
struct ThreadRecord {
  std::string thread_id;
  Subset subset = Subset::kMrg;
  std::string prompt;
  std::vector<RoundScore> rounds;
  std::optional<int> truncated_at;
  double thread_score = 0.0;
  // Grounding protocol: mean matched IoU per round with ground-truth boxes.
  std::vector<double> case_ious;
};

Json ThreadRecordToJson(const ThreadRecord& record);
ThreadRecord ThreadRecordFromJson(const Json& record);

struct EvaluationResult {
  Provenance provenance;
  std::vector<ThreadRecord> records;
  std::vector<std::string> notices;
};

struct EvaluateOptions {
  Protocol protocol = Protocol::kMultiRound;
  EvalConfig config;
  // Cut logic-chain threads to their first three rounds; shorter threads are
  // skipped with a notice.
  bool curate_three_rounds = false;
  std::uint64_t seed = 0;
};

// Scores every prediction against the corpus, in corpus order. Throws
// mrg::StructuralError naming the record when a prediction refers to an
// unknown thread, a corpus thread has no prediction, or rounds do not align.
EvaluationResult Evaluate(const Corpus& corpus,
                          const std::vector<PredictionRecord>& predictions,
                          const EvaluateOptions& options,
                          SimilarityProvider& provider);

void WriteRecords(std::ostream& out, const EvaluationResult& result);
EvaluationResult ReadRecords(std::istream& in);

// ---------------------------------------------------------------------------
// Aggregate tables.

struct MultiRoundRow {
  int round = 1;
  std::size_t threads = 0;
  double similarity = 0.0;
  // Mean IoU over rounds that ask for grounding; absent when none do.
  std::optional<double> mean_iou;
  double raw_score = 0.0;
  double truncated_score = 0.0;
};

// "raw" columns ignore truncation; the open reading of per-round columns is
// resolved by reporting both.
struct MultiRoundTable {
  std::vector<MultiRoundRow> rows;
  double thread_score = 0.0;
  double raw_thread_score = 0.0;
  std::size_t threads = 0;
};

struct ReferringTable {
  double similarity = 0.0;
  std::size_t cases = 0;
};

struct GroundingRow {
  std::string prompt;
  GroundingMetrics metrics;
  bool best = false;
};

struct GroundingTable {
  std::vector<GroundingRow> rows;
};

MultiRoundTable ComputeMultiRoundTable(const std::vector<ThreadRecord>& records);
ReferringTable ComputeReferringTable(const std::vector<ThreadRecord>& records);
// One row per prompt label (in first-seen order); the best row has the
// highest success rate, then the highest mean IoU.
GroundingTable ComputeGroundingTable(const std::vector<ThreadRecord>& records,
                                     const EvalConfig& config);

// Column headers of the grounding table.
inline constexpr const char* kGroundingHeaders[] = {"mIoU", "Succ. Rate",
                                                    "mIoU @ Succ"};

// Renders the aggregate table for result.provenance.protocol, preceded by the
// provenance block.
std::string RenderReport(const EvaluationResult& result, ReportFormat format);

// ---------------------------------------------------------------------------
// Dataset building.

struct BuildOptions {
  std::string scene_graphs_path;
  std::string templates_path;  // empty: built-in templates
  std::vector<std::string> import_paths;
  std::string out_dir;
  std::uint64_t seed = 0;
  double nms_threshold = 0.5;
  Holdout holdout;
  bool substitute_pronouns = true;
  ReportFormat format = ReportFormat::kMarkdown;
};

struct BuildResult {
  Statistics statistics;
  Split split;
  std::vector<Violation> violations;
  std::vector<std::string> notices;
};

// Cleans scene graphs, generates REF/GND threads, validates imported
// MRG/LC threads (dropping any with violations), splits, and writes:
//   scene_graphs.cleaned.jsonl, train.jsonl, test.jsonl, quarantine.jsonl,
//   violations.jsonl, statistics.<ext>
// Output is byte-identical for identical inputs and seed.
BuildResult Build(const BuildOptions& options);

std::string RenderStatistics(const Statistics& statistics, ReportFormat format,
                             std::uint64_t seed);

// ---------------------------------------------------------------------------
// Command line: mrg-bench build|validate|evaluate|report|mix.
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace mrg

#endif  // MRG_HARNESS_H_
