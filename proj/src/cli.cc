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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "mrg/errors.h"
#include "mrg/harness.h"

namespace mrg {
namespace {

std::vector<double> ParseTau(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw StructuralError("invalid --tau value '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw StructuralError("--tau needs at least one value");
  return out;
}

std::vector<SourceRatio> ParseRatios(const std::string& text,
                                     const std::vector<std::string>& names) {
  std::vector<SourceRatio> out;
  std::stringstream in(text);
  std::string item;
  std::size_t i = 0;
  while (std::getline(in, item, ':')) {
    if (i >= names.size()) {
      throw StructuralError("more ratios than sources");
    }
    unsigned long w = 0;
    try {
      w = std::stoul(item);
    } catch (const std::exception&) {
      throw StructuralError("invalid ratio '" + item + "'");
    }
    out.push_back({names[i++], static_cast<std::uint32_t>(w)});
  }
  if (out.size() != names.size()) {
    throw StructuralError("ratio count does not match source count");
  }
  return out;
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

struct CommonEval {
  double lambda = kDefaultLambda;
  std::string tau = "0.3";
  std::string provider = "lexical";
  std::string endpoint;
  int timeout_ms = 10000;
  int retries = 2;
  std::string format = "markdown";
};

ProviderConfig MakeProviderConfig(const CommonEval& c) {
  ProviderConfig config;
  if (c.provider == "remote") {
    config.kind = ProviderKind::kRemote;
  } else if (c.provider != "lexical") {
    throw StructuralError("unknown provider '" + c.provider + "'");
  }
  config.endpoint = c.endpoint;
  if (config.endpoint.empty()) {
    if (const char* env = std::getenv(kEndpointEnvVar)) config.endpoint = env;
  }
  config.timeout = std::chrono::milliseconds(c.timeout_ms);
  config.retries = c.retries;
  return config;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Build, validate and score multi-round referring and grounding "
               "dialogue benchmarks",
               "mrg-bench"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "Random seed (recorded in every report)");

  // build
  BuildOptions build;
  std::size_t holdout_mrg = 800, holdout_lc = 200;
  bool no_pronouns = false;
  std::string build_format = "markdown";
  auto* build_cmd = app.add_subcommand("build", "Build a corpus from scene graphs");
  build_cmd->add_option("--scene-graphs", build.scene_graphs_path)->required();
  build_cmd->add_option("--templates", build.templates_path);
  build_cmd->add_option("--import", build.import_paths,
                        "Externally generated MRG/LC corpus files");
  build_cmd->add_option("--out", build.out_dir)->required();
  build_cmd->add_option("--nms-threshold", build.nms_threshold)
      ->check(CLI::Range(0.0, 1.0));
  build_cmd->add_option("--holdout-mrg", holdout_mrg);
  build_cmd->add_option("--holdout-lc", holdout_lc);
  build_cmd->add_flag("--no-pronouns", no_pronouns);
  build_cmd->add_option("--format", build_format);

  // validate
  std::string validate_corpus, validate_out;
  auto* validate_cmd = app.add_subcommand("validate", "Check a corpus");
  validate_cmd->add_option("--corpus", validate_corpus)->required();
  validate_cmd->add_option("--out", validate_out,
                           "Write the violation list here instead of stdout");

  // evaluate
  CommonEval common;
  std::string corpus_path, predictions_path, eval_out, protocol = "multi-round";
  bool curate = false;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a predictions file");
  eval_cmd->add_option("--corpus", corpus_path)->required();
  eval_cmd->add_option("--predictions", predictions_path)->required();
  eval_cmd->add_option("--protocol", protocol)
      ->check(CLI::IsMember({"multi-round", "referring", "grounding"}));
  eval_cmd->add_option("--lambda", common.lambda)->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_option("--tau", common.tau, "Scalar or comma-separated list");
  eval_cmd->add_option("--provider", common.provider)
      ->check(CLI::IsMember({"lexical", "remote"}));
  eval_cmd->add_option("--endpoint", common.endpoint,
                       std::string("Similarity service URL (fallback: $") +
                           kEndpointEnvVar + ")");
  eval_cmd->add_option("--timeout-ms", common.timeout_ms);
  eval_cmd->add_option("--retries", common.retries);
  eval_cmd->add_option("--format", common.format);
  eval_cmd->add_option("--out", eval_out,
                       "Directory for records.jsonl and the report");
  eval_cmd->add_flag("--curate-three-rounds", curate);

  // report
  std::string records_path, report_format = "markdown";
  auto* report_cmd =
      app.add_subcommand("report", "Re-render tables from evaluation records");
  report_cmd->add_option("--records", records_path)->required();
  report_cmd->add_option("--format", report_format);

  // mix
  std::string group_name = "A", ratios_text, mix_out;
  std::vector<std::string> source_specs;
  std::size_t count = 1000;
  auto* mix_cmd = app.add_subcommand("mix", "Sample a training mixture");
  mix_cmd->add_option("--group", group_name)
      ->check(CLI::IsMember({"A", "B", "C"}));
  mix_cmd->add_option("--source", source_specs, "NAME=corpus.jsonl")->required();
  mix_cmd->add_option("--ratios", ratios_text,
                      "Colon-separated weights in --source order");
  mix_cmd->add_option("--count", count);
  mix_cmd->add_option("--out", mix_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitError;
  }

  try {
    if (*build_cmd) {
      build.seed = seed;
      build.holdout.counts = {{Subset::kMrg, holdout_mrg},
                              {Subset::kLc, holdout_lc}};
      build.substitute_pronouns = !no_pronouns;
      build.format = ParseReportFormat(build_format);
      const BuildResult result = Build(build);
      for (const std::string& n : result.notices) err << n << '\n';
      out << RenderStatistics(result.statistics, build.format, seed);
      out << "train: " << result.split.train.size()
          << " test: " << result.split.test.size()
          << " quarantined: " << result.split.quarantine.size()
          << " dropped violations: " << result.violations.size() << '\n';
      return kExitOk;
    }

    if (*validate_cmd) {
      const Corpus corpus = ReadCorpusFile(validate_corpus);
      const std::vector<Violation> violations = ValidateCorpus(corpus.threads);
      std::ostringstream listing;
      for (const Violation& v : violations) {
        listing << ViolationToJson(v).dump() << '\n';
      }
      if (validate_out.empty()) {
        out << listing.str();
      } else {
        WriteText(validate_out, listing.str());
      }
      err << corpus.threads.size() << " threads, " << violations.size()
          << " violations\n";
      return violations.empty() ? kExitOk : kExitViolations;
    }

    if (*eval_cmd) {
      const Corpus corpus = ReadCorpusFile(corpus_path);
      const auto predictions = ReadPredictionsFile(predictions_path, corpus);
      EvaluateOptions options;
      options.protocol = ParseProtocol(protocol);
      options.config.lambda = common.lambda;
      options.config.tau = ParseTau(common.tau);
      options.curate_three_rounds = curate;
      options.seed = seed;
      const auto provider = MakeProvider(MakeProviderConfig(common));
      const EvaluationResult result =
          Evaluate(corpus, predictions, options, *provider);
      for (const std::string& n : result.notices) err << n << '\n';
      const ReportFormat format = ParseReportFormat(common.format);
      const std::string report = RenderReport(result, format);
      if (eval_out.empty()) {
        out << report;
      } else {
        std::filesystem::create_directories(eval_out);
        std::ostringstream records;
        WriteRecords(records, result);
        WriteText((std::filesystem::path(eval_out) / "records.jsonl").string(),
                  records.str());
        WriteText((std::filesystem::path(eval_out) /
                   ("report." + FileExtension(format)))
                      .string(),
                  report);
        out << report;
      }
      return kExitOk;
    }

    if (*report_cmd) {
      std::ifstream in(records_path);
      if (!in) throw Error("cannot open records '" + records_path + "'");
      const EvaluationResult result = ReadRecords(in);
      out << RenderReport(result, ParseReportFormat(report_format));
      return kExitOk;
    }

    if (*mix_cmd) {
      const Group group = ParseGroup(group_name);
      std::map<std::string, std::vector<Thread>> sources;
      std::vector<std::string> names;
      for (const std::string& spec : source_specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0) {
          throw StructuralError("--source expects NAME=path, got '" + spec + "'");
        }
        const std::string name = spec.substr(0, eq);
        sources[name] = ReadCorpusFile(spec.substr(eq + 1)).threads;
        names.push_back(name);
      }
      std::vector<SourceRatio> ratios;
      if (ratios_text.empty()) {
        for (const SourceRatio& r : DefaultRatios(group)) {
          if (sources.count(r.source)) ratios.push_back(r);
        }
        if (ratios.size() != names.size()) {
          throw StructuralError(
              "sources do not match the group's preset ratio names; pass "
              "--ratios");
        }
      } else {
        ratios = ParseRatios(ratios_text, names);
      }
      GroupMixer mixer(sources, group, ratios, seed);
      std::ofstream stream(mix_out, std::ios::binary);
      if (!stream) throw Error("cannot write '" + mix_out + "'");
      stream << HeaderToJson(CorpusHeader{}).dump() << '\n';
      std::map<std::string, std::size_t> drawn;
      for (std::size_t i = 0; i < count; ++i) {
        MixedSample sample = mixer.Next();
        const std::string& name = mixer.ratios()[sample.source].source;
        ++drawn[name];
        Json record = ThreadToJson(sample.thread);
        record["source"] = name;
        stream << record.dump() << '\n';
      }
      for (const SourceRatio& r : mixer.ratios()) {
        out << r.source << ": " << drawn[r.source] << '\n';
      }
      return kExitOk;
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace mrg
