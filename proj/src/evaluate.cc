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
#include <fstream>
#include <map>
#include <set>

#include "mrg/errors.h"
#include "mrg/harness.h"

namespace mrg {
namespace {

std::string AtLine(std::size_t line) {
  return "predictions line " + std::to_string(line) + ": ";
}

Json OptionalNumber(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::optional<double> NumberOrNull(const Json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

}  // namespace

std::vector<PredictionRecord> ReadPredictions(std::istream& in,
                                              const Corpus& corpus) {
  std::map<std::string, const Thread*> threads;
  for (const Thread& t : corpus.threads) threads[t.thread_id] = &t;

  CorpusHeader header = corpus.header;
  std::vector<PredictionRecord> out;
  bool first = true;
  ForEachJsonLine(in, [&](const Json& record, std::size_t line) {
    const bool is_header = record.contains("type") &&
                           record.at("type") == "header";
    if (is_header) {
      if (!first) throw ParseError("header record must come first", 0);
      header = HeaderFromJson(record);
      first = false;
      return;
    }
    first = false;

    PredictionRecord prediction;
    prediction.thread_id = RequireString(record, "thread_id");
    if (record.contains("prompt")) {
      prediction.prompt = RequireString(record, "prompt");
    }
    const auto it = threads.find(prediction.thread_id);
    if (it == threads.end()) {
      throw StructuralError(AtLine(line) + "thread_id '" +
                            prediction.thread_id + "' is not in the corpus");
    }
    const ImageDims dims = it->second->image_dims;
    BoxEncoding encoding;
    encoding.format = header.box_format;
    if (header.scale == CoordinateScale::kPixel) encoding.pixel_dims = dims;
    encoding.convert.clamp = true;

    for (const Json& r : RequireField(record, "rounds")) {
      PredictedRound round;
      round.index = RequireField(r, "index").get<int>();
      const std::string answer = RequireString(r, "answer");
      const AnnotatedText parsed = ParseAnnotatedText(answer, encoding);
      round.answer = parsed.text;
      if (r.contains("boxes")) {
        for (const Json& quad : r.at("boxes")) {
          round.boxes.push_back(BoxFromJson(quad, header, dims, {.clamp = true}));
        }
      } else {
        for (const Annotation& a : parsed.annotations) {
          round.boxes.push_back(a.box);
        }
      }
      prediction.rounds.push_back(std::move(round));
    }
    out.push_back(std::move(prediction));
  });
  return out;
}

std::vector<PredictionRecord> ReadPredictionsFile(const std::string& path,
                                                  const Corpus& corpus) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open predictions file '" + path + "'");
  return ReadPredictions(in, corpus);
}

Json PredictionToJson(const PredictionRecord& record) {
  Json rounds = Json::array();
  for (const PredictedRound& r : record.rounds) {
    Json boxes = Json::array();
    for (const Box& b : r.boxes) boxes.push_back(BoxToJson(b));
    rounds.push_back(
        Json{{"index", r.index}, {"answer", r.answer}, {"boxes", boxes}});
  }
  Json out{{"thread_id", record.thread_id}};
  if (!record.prompt.empty()) out["prompt"] = record.prompt;
  out["rounds"] = std::move(rounds);
  return out;
}

std::string_view ToString(Protocol protocol) {
  switch (protocol) {
    case Protocol::kMultiRound:
      return "multi-round";
    case Protocol::kReferring:
      return "referring";
    case Protocol::kGrounding:
      return "grounding";
  }
  return "multi-round";
}

Protocol ParseProtocol(std::string_view name) {
  if (name == "multi-round") return Protocol::kMultiRound;
  if (name == "referring") return Protocol::kReferring;
  if (name == "grounding") return Protocol::kGrounding;
  throw ParseError("unknown protocol '" + std::string(name) + "'", 0);
}

Json ProvenanceToJson(const Provenance& p) {
  return Json{{"protocol", std::string(ToString(p.protocol))},
              {"lambda", p.lambda},
              {"tau", p.tau},
              {"iou_success_threshold", p.iou_success_threshold},
              {"provider", p.provider},
              {"seed", p.seed},
              {"curated_three_rounds", p.curated_three_rounds}};
}

Provenance ProvenanceFromJson(const Json& record) {
  Provenance p;
  p.protocol = ParseProtocol(RequireString(record, "protocol"));
  p.lambda = RequireField(record, "lambda").get<double>();
  p.tau = RequireField(record, "tau").get<std::vector<double>>();
  p.iou_success_threshold =
      RequireField(record, "iou_success_threshold").get<double>();
  p.provider = RequireString(record, "provider");
  p.seed = RequireField(record, "seed").get<std::uint64_t>();
  p.curated_three_rounds =
      RequireField(record, "curated_three_rounds").get<bool>();
  return p;
}

Json ThreadRecordToJson(const ThreadRecord& record) {
  Json rounds = Json::array();
  for (const RoundScore& r : record.rounds) {
    rounds.push_back(Json{{"index", r.index},
                          {"similarity", r.similarity},
                          {"num_gt_boxes", r.num_gt_boxes},
                          {"mean_iou", OptionalNumber(r.mean_iou)},
                          {"raw", r.raw},
                          {"truncated", r.truncated}});
  }
  Json out{{"type", "thread"},
           {"thread_id", record.thread_id},
           {"subset", std::string(ToString(record.subset))}};
  if (!record.prompt.empty()) out["prompt"] = record.prompt;
  out["rounds"] = std::move(rounds);
  out["truncated_at"] =
      record.truncated_at ? Json(*record.truncated_at) : Json(nullptr);
  out["thread_score"] = record.thread_score;
  out["case_ious"] = record.case_ious;
  return out;
}

ThreadRecord ThreadRecordFromJson(const Json& record) {
  ThreadRecord out;
  out.thread_id = RequireString(record, "thread_id");
  out.subset = ParseSubset(RequireString(record, "subset"));
  if (record.contains("prompt")) out.prompt = RequireString(record, "prompt");
  for (const Json& r : RequireField(record, "rounds")) {
    RoundScore s;
    s.index = RequireField(r, "index").get<int>();
    s.similarity = RequireField(r, "similarity").get<double>();
    s.num_gt_boxes = RequireField(r, "num_gt_boxes").get<std::size_t>();
    s.mean_iou = NumberOrNull(RequireField(r, "mean_iou"));
    s.raw = RequireField(r, "raw").get<double>();
    s.truncated = RequireField(r, "truncated").get<double>();
    out.rounds.push_back(s);
  }
  const Json& at = RequireField(record, "truncated_at");
  if (!at.is_null()) out.truncated_at = at.get<int>();
  out.thread_score = RequireField(record, "thread_score").get<double>();
  out.case_ious = RequireField(record, "case_ious").get<std::vector<double>>();
  return out;
}

EvaluationResult Evaluate(const Corpus& corpus,
                          const std::vector<PredictionRecord>& predictions,
                          const EvaluateOptions& options,
                          SimilarityProvider& provider) {
  options.config.Validate();
  EvaluationResult result;
  Provenance& p = result.provenance;
  p.protocol = options.protocol;
  p.lambda = options.config.lambda;
  p.tau = options.config.tau;
  p.iou_success_threshold = options.config.iou_success_threshold;
  p.provider = provider.Name();
  p.seed = options.seed;
  p.curated_three_rounds = options.curate_three_rounds;

  // Ground truth in corpus order, curated if requested.
  std::vector<Thread> threads;
  std::set<std::string> skipped;
  for (const Thread& t : corpus.threads) {
    if (!options.curate_three_rounds) {
      threads.push_back(t);
      continue;
    }
    auto curated = CurateTestThread(t, [&](const std::string& msg) {
      result.notices.push_back(msg);
    });
    if (curated) {
      threads.push_back(std::move(*curated));
    } else {
      skipped.insert(t.thread_id);
    }
  }

  std::map<std::string, std::vector<const PredictionRecord*>> by_thread;
  std::set<std::string> known;
  for (const Thread& t : corpus.threads) known.insert(t.thread_id);
  for (const PredictionRecord& pr : predictions) {
    if (!known.count(pr.thread_id)) {
      throw StructuralError("prediction for unknown thread_id '" +
                            pr.thread_id + "'");
    }
    if (skipped.count(pr.thread_id)) continue;
    auto& list = by_thread[pr.thread_id];
    if (options.protocol != Protocol::kGrounding && !list.empty()) {
      throw StructuralError("duplicate prediction for thread_id '" +
                            pr.thread_id + "'");
    }
    for (const PredictionRecord* other : list) {
      if (other->prompt == pr.prompt) {
        throw StructuralError("duplicate prediction for thread_id '" +
                              pr.thread_id + "' and prompt '" + pr.prompt +
                              "'");
      }
    }
    list.push_back(&pr);
  }

  for (const Thread& gt : threads) {
    const auto it = by_thread.find(gt.thread_id);
    if (it == by_thread.end()) {
      throw StructuralError("no prediction for thread_id '" + gt.thread_id +
                            "'");
    }
    for (const PredictionRecord* raw : it->second) {
      PredictionRecord pred = *raw;
      if (options.curate_three_rounds && pred.rounds.size() > gt.rounds.size()) {
        pred.rounds.resize(gt.rounds.size());
      }
      if (pred.rounds.size() != gt.rounds.size()) {
        throw StructuralError("thread_id '" + gt.thread_id + "': " +
                              std::to_string(pred.rounds.size()) +
                              " predicted rounds, corpus has " +
                              std::to_string(gt.rounds.size()));
      }

      ThreadRecord record;
      record.thread_id = gt.thread_id;
      record.subset = gt.subset;
      record.prompt = pred.prompt;
      switch (options.protocol) {
        case Protocol::kMultiRound: {
          ThreadReport report =
              ThreadScore(pred, gt, options.config, provider);
          record.rounds = std::move(report.rounds);
          record.truncated_at = report.truncated_at;
          record.thread_score = report.thread_score;
          break;
        }
        case Protocol::kReferring: {
          double sum = 0.0;
          for (std::size_t i = 0; i < gt.rounds.size(); ++i) {
            RoundScore s;
            s.index = gt.rounds[i].index;
            s.similarity = ReferringScore(pred.rounds[i].answer,
                                          gt.rounds[i].answer, provider,
                                          options.config.cleaning);
            s.raw = s.truncated = s.similarity;
            sum += s.similarity;
            record.rounds.push_back(s);
          }
          record.thread_score = sum / static_cast<double>(gt.rounds.size());
          break;
        }
        case Protocol::kGrounding: {
          double sum = 0.0;
          for (std::size_t i = 0; i < gt.rounds.size(); ++i) {
            const Round& round = gt.rounds[i];
            RoundScore s;
            s.index = round.index;
            s.num_gt_boxes = round.answer_annotations.size();
            if (s.num_gt_boxes > 0) {
              std::vector<Box> boxes;
              for (const Annotation& a : round.answer_annotations) {
                boxes.push_back(a.box);
              }
              const auto ious = MatchBoxes(pred.rounds[i].boxes, boxes).ious;
              double total = 0.0;
              for (double v : ious) total += v;
              const double mean = total / static_cast<double>(ious.size());
              s.mean_iou = mean;
              s.raw = s.truncated = mean;
              record.case_ious.push_back(mean);
              sum += mean;
            }
            record.rounds.push_back(s);
          }
          if (record.case_ious.empty()) {
            throw StructuralError("thread_id '" + gt.thread_id +
                                  "' has no grounding round");
          }
          record.thread_score =
              sum / static_cast<double>(record.case_ious.size());
          break;
        }
      }
      result.records.push_back(std::move(record));
    }
  }
  return result;
}

void WriteRecords(std::ostream& out, const EvaluationResult& result) {
  Json header = ProvenanceToJson(result.provenance);
  header["type"] = "provenance";
  out << header.dump() << '\n';
  for (const ThreadRecord& r : result.records) {
    out << ThreadRecordToJson(r).dump() << '\n';
  }
}

EvaluationResult ReadRecords(std::istream& in) {
  EvaluationResult result;
  bool have_provenance = false;
  ForEachJsonLine(in, [&](const Json& record, std::size_t) {
    const std::string type = RequireString(record, "type");
    if (type == "provenance") {
      result.provenance = ProvenanceFromJson(record);
      have_provenance = true;
    } else if (type == "thread") {
      result.records.push_back(ThreadRecordFromJson(record));
    } else {
      throw ParseError("unknown record type '" + type + "'", 0);
    }
  });
  if (!have_provenance) {
    throw ParseError("records file lacks a provenance record", 0, 1);
  }
  return result;
}

}  // namespace mrg
