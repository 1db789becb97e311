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
#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "mrg/errors.h"
#include "mrg/harness.h"

namespace mrg {
namespace {

std::string Fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string Cell(const std::optional<double>& v, int digits = 4) {
  return v ? Fixed(*v, digits) : "-";
}

std::string JoinTau(const std::vector<double>& tau) {
  std::string out;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (i > 0) out += ',';
    out += Fixed(tau[i], 3);
  }
  return out;
}

// A rendered table: header row plus body rows, all as text cells.
struct TextTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string RenderMarkdownTable(const TextTable& t) {
  std::ostringstream out;
  out << '|';
  for (const auto& h : t.header) out << ' ' << h << " |";
  out << "\n|";
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    out << (i == 0 ? ":---|" : "---:|");
  }
  out << '\n';
  for (const auto& row : t.rows) {
    out << '|';
    for (const auto& c : row) out << ' ' << c << " |";
    out << '\n';
  }
  return out.str();
}

std::string CsvEscape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string RenderCsvTable(const TextTable& t) {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out << ',';
      out << CsvEscape(cells[i]);
    }
    out << '\n';
  };
  line(t.header);
  for (const auto& row : t.rows) line(row);
  return out.str();
}

TextTable MultiRoundText(const MultiRoundTable& table, int digits) {
  TextTable t;
  t.header.push_back("Scores");
  for (const MultiRoundRow& row : table.rows) {
    const std::string n = std::to_string(row.round);
    t.header.push_back("Sim " + n);
    t.header.push_back("mIoU " + n);
    t.header.push_back("t_" + n);
  }
  t.header.push_back("T");
  for (const bool truncated : {true, false}) {
    std::vector<std::string> cells = {truncated ? "truncated" : "raw"};
    for (const MultiRoundRow& row : table.rows) {
      cells.push_back(Fixed(row.similarity, digits));
      cells.push_back(Cell(row.mean_iou, digits));
      cells.push_back(
          Fixed(truncated ? row.truncated_score : row.raw_score, digits));
    }
    cells.push_back(Fixed(truncated ? table.thread_score : table.raw_thread_score,
                          digits));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

TextTable ReferringText(const ReferringTable& table, int digits) {
  return {{"Cases", "Similarity"},
          {{std::to_string(table.cases), Fixed(table.similarity, digits)}}};
}

TextTable GroundingText(const GroundingTable& table, int digits) {
  TextTable t;
  t.header = {"Prompt", kGroundingHeaders[0], kGroundingHeaders[1],
              kGroundingHeaders[2], "Cases", "Best"};
  for (const GroundingRow& row : table.rows) {
    t.rows.push_back({row.prompt.empty() ? "(default)" : row.prompt,
                      Fixed(row.metrics.mean_iou, digits),
                      Fixed(row.metrics.success_rate, digits),
                      Cell(row.metrics.mean_iou_at_success, digits),
                      std::to_string(row.metrics.cases),
                      row.best ? "*" : ""});
  }
  return t;
}

Json MultiRoundJson(const MultiRoundTable& table) {
  Json rows = Json::array();
  for (const MultiRoundRow& r : table.rows) {
    rows.push_back(Json{{"round", r.round},
                        {"threads", r.threads},
                        {"similarity", r.similarity},
                        {"mean_iou", r.mean_iou ? Json(*r.mean_iou) : Json()},
                        {"t_raw", r.raw_score},
                        {"t_truncated", r.truncated_score}});
  }
  return Json{{"threads", table.threads},
              {"rounds", std::move(rows)},
              {"T", table.thread_score},
              {"T_raw", table.raw_thread_score}};
}

Json GroundingJson(const GroundingTable& table) {
  Json rows = Json::array();
  for (const GroundingRow& r : table.rows) {
    const auto& m = r.metrics;
    rows.push_back(Json{{"prompt", r.prompt},
                        {kGroundingHeaders[0], m.mean_iou},
                        {kGroundingHeaders[1], m.success_rate},
                        {kGroundingHeaders[2], m.mean_iou_at_success
                                                   ? Json(*m.mean_iou_at_success)
                                                   : Json()},
                        {"cases", m.cases},
                        {"best", r.best}});
  }
  return Json{{"prompts", std::move(rows)}};
}

EvalConfig ConfigFrom(const Provenance& p) {
  EvalConfig config;
  config.lambda = p.lambda;
  config.tau = p.tau;
  config.iou_success_threshold = p.iou_success_threshold;
  return config;
}

}  // namespace

std::string_view ToString(ReportFormat format) {
  switch (format) {
    case ReportFormat::kMarkdown:
      return "markdown";
    case ReportFormat::kCsv:
      return "csv";
    case ReportFormat::kJson:
      return "json";
  }
  return "markdown";
}

ReportFormat ParseReportFormat(std::string_view name) {
  if (name == "markdown" || name == "md") return ReportFormat::kMarkdown;
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  throw ParseError("unknown report format '" + std::string(name) + "'", 0);
}

std::string FileExtension(ReportFormat format) {
  switch (format) {
    case ReportFormat::kMarkdown:
      return "md";
    case ReportFormat::kCsv:
      return "csv";
    case ReportFormat::kJson:
      return "json";
  }
  return "md";
}

MultiRoundTable ComputeMultiRoundTable(const std::vector<ThreadRecord>& records) {
  MultiRoundTable table;
  std::size_t max_rounds = 0;
  for (const ThreadRecord& r : records) {
    max_rounds = std::max(max_rounds, r.rounds.size());
  }
  for (std::size_t n = 0; n < max_rounds; ++n) {
    MultiRoundRow row;
    row.round = static_cast<int>(n + 1);
    double sim = 0.0, raw = 0.0, truncated = 0.0, iou = 0.0;
    std::size_t grounded = 0;
    for (const ThreadRecord& r : records) {
      if (n >= r.rounds.size()) continue;
      const RoundScore& s = r.rounds[n];
      ++row.threads;
      sim += s.similarity;
      raw += s.raw;
      truncated += s.truncated;
      if (s.mean_iou) {
        iou += *s.mean_iou;
        ++grounded;
      }
    }
    const double count = static_cast<double>(row.threads);
    row.similarity = sim / count;
    row.raw_score = raw / count;
    row.truncated_score = truncated / count;
    if (grounded > 0) row.mean_iou = iou / static_cast<double>(grounded);
    table.rows.push_back(row);
  }
  double total = 0.0, raw_total = 0.0;
  for (const ThreadRecord& r : records) {
    total += r.thread_score;
    double raw_sum = 0.0;
    for (const RoundScore& s : r.rounds) raw_sum += s.raw;
    if (!r.rounds.empty()) {
      raw_total += raw_sum / static_cast<double>(r.rounds.size());
    }
  }
  table.threads = records.size();
  if (!records.empty()) {
    table.thread_score = total / static_cast<double>(records.size());
    table.raw_thread_score = raw_total / static_cast<double>(records.size());
  }
  return table;
}

ReferringTable ComputeReferringTable(const std::vector<ThreadRecord>& records) {
  ReferringTable table;
  double sum = 0.0;
  for (const ThreadRecord& r : records) {
    for (const RoundScore& s : r.rounds) {
      sum += s.similarity;
      ++table.cases;
    }
  }
  if (table.cases > 0) table.similarity = sum / static_cast<double>(table.cases);
  return table;
}

GroundingTable ComputeGroundingTable(const std::vector<ThreadRecord>& records,
                                     const EvalConfig& config) {
  std::vector<std::string> prompts;
  std::map<std::string, std::vector<double>> cases;
  for (const ThreadRecord& r : records) {
    if (!cases.count(r.prompt)) prompts.push_back(r.prompt);
    auto& list = cases[r.prompt];
    list.insert(list.end(), r.case_ious.begin(), r.case_ious.end());
  }
  GroundingTable table;
  for (const std::string& prompt : prompts) {
    if (cases[prompt].empty()) continue;
    table.rows.push_back(
        {prompt, ComputeGroundingMetrics(cases[prompt], config), false});
  }
  if (!table.rows.empty()) {
    auto best = std::max_element(
        table.rows.begin(), table.rows.end(),
        [](const GroundingRow& a, const GroundingRow& b) {
          if (a.metrics.success_rate != b.metrics.success_rate) {
            return a.metrics.success_rate < b.metrics.success_rate;
          }
          return a.metrics.mean_iou < b.metrics.mean_iou;
        });
    best->best = true;
  }
  return table;
}

std::string RenderReport(const EvaluationResult& result, ReportFormat format) {
  const Provenance& p = result.provenance;
  const EvalConfig config = ConfigFrom(p);

  if (format == ReportFormat::kJson) {
    Json out{{"provenance", ProvenanceToJson(p)}};
    switch (p.protocol) {
      case Protocol::kMultiRound:
        out["multi_round"] = MultiRoundJson(ComputeMultiRoundTable(result.records));
        break;
      case Protocol::kReferring: {
        const ReferringTable t = ComputeReferringTable(result.records);
        out["referring"] = Json{{"cases", t.cases}, {"similarity", t.similarity}};
        break;
      }
      case Protocol::kGrounding:
        out["grounding"] =
            GroundingJson(ComputeGroundingTable(result.records, config));
        break;
    }
    return out.dump(2) + "\n";
  }

  TextTable table;
  const int digits = format == ReportFormat::kCsv ? 6 : 4;
  switch (p.protocol) {
    case Protocol::kMultiRound:
      table = MultiRoundText(ComputeMultiRoundTable(result.records), digits);
      break;
    case Protocol::kReferring:
      table = ReferringText(ComputeReferringTable(result.records), digits);
      break;
    case Protocol::kGrounding:
      table = GroundingText(ComputeGroundingTable(result.records, config), digits);
      break;
  }

  std::ostringstream out;
  if (format == ReportFormat::kCsv) {
    out << "# protocol=" << ToString(p.protocol) << " provider=" << p.provider
        << " lambda=" << Fixed(p.lambda, 3) << " tau=" << JoinTau(p.tau)
        << " iou_success=" << Fixed(p.iou_success_threshold, 3)
        << " seed=" << p.seed
        << " curated_three_rounds=" << (p.curated_three_rounds ? 1 : 0) << '\n';
    out << RenderCsvTable(table);
    return out.str();
  }
  out << "# Evaluation report: " << ToString(p.protocol) << "\n\n";
  out << "- provider: " << p.provider << '\n'
      << "- lambda: " << Fixed(p.lambda, 3) << '\n'
      << "- tau: " << JoinTau(p.tau) << '\n'
      << "- IoU success threshold: " << Fixed(p.iou_success_threshold, 3) << '\n'
      << "- seed: " << p.seed << '\n'
      << "- three-round curation: " << (p.curated_three_rounds ? "yes" : "no")
      << '\n'
      << "- threads: " << result.records.size() << "\n\n";
  out << RenderMarkdownTable(table);
  return out.str();
}

std::string RenderStatistics(const Statistics& statistics, ReportFormat format,
                             std::uint64_t seed) {
  static const std::pair<Subset, const char*> kRows[] = {
      {Subset::kMrg, "CB-MRG"},
      {Subset::kLc, "CB-LC"},
      {Subset::kRef, "CB-REF"},
      {Subset::kGnd, "CB-GND"}};
  if (format == ReportFormat::kJson) {
    Json subsets = Json::object();
    for (const auto& [subset, label] : kRows) {
      const auto it = statistics.per_subset.find(subset);
      const SubsetStats s = it == statistics.per_subset.end() ? SubsetStats{}
                                                              : it->second;
      subsets[std::string(ToString(subset))] =
          Json{{"threads", s.threads}, {"qa_pairs", s.qa_pairs}};
    }
    return Json{{"seed", seed},
                {"subsets", std::move(subsets)},
                {"total",
                 Json{{"threads", statistics.total.threads},
                      {"qa_pairs", statistics.total.qa_pairs}}}}
               .dump(2) +
           "\n";
  }
  TextTable t;
  t.header = {"Set", "# threads", "# Q&A pairs"};
  for (const auto& [subset, label] : kRows) {
    const auto it = statistics.per_subset.find(subset);
    const SubsetStats s =
        it == statistics.per_subset.end() ? SubsetStats{} : it->second;
    t.rows.push_back(
        {label, std::to_string(s.threads), std::to_string(s.qa_pairs)});
  }
  t.rows.push_back({"Total", std::to_string(statistics.total.threads),
                    std::to_string(statistics.total.qa_pairs)});
  if (format == ReportFormat::kCsv) {
    return "# seed=" + std::to_string(seed) + "\n" + RenderCsvTable(t);
  }
  return "# Corpus statistics\n\n- seed: " + std::to_string(seed) + "\n\n" +
         RenderMarkdownTable(t);
}

}  // namespace mrg
