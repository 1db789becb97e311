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
#include <filesystem>
#include <fstream>
#include <set>

#include "mrg/errors.h"
#include "mrg/harness.h"

namespace mrg {
namespace {

std::ofstream OpenOutput(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

// Checks one imported thread; an empty result means it may be kept.
std::vector<Violation> CheckImport(const Thread& thread) {
  std::vector<Violation> out = CheckStructure(thread);
  if (thread.subset == Subset::kLc) {
    if (!thread.chain) {
      out.push_back({thread.thread_id, 0, RuleCode::kStructure,
                     "logic-chain thread without a relationship chain"});
    } else if (thread.chain->is_linked()) {
      auto logic = ValidateLogicChain(thread, *thread.chain);
      out.insert(out.end(), logic.begin(), logic.end());
    }
  }
  return out;
}

}  // namespace

BuildResult Build(const BuildOptions& options) {
  namespace fs = std::filesystem;
  BuildResult result;
  auto notice = [&](const std::string& msg) { result.notices.push_back(msg); };

  std::ifstream graphs_in(options.scene_graphs_path);
  if (!graphs_in) {
    throw Error("cannot open scene graphs '" + options.scene_graphs_path + "'");
  }
  const std::vector<SceneGraph> graphs = ReadSceneGraphs(graphs_in);
  const TemplateSet templates = options.templates_path.empty()
                                    ? DefaultTemplates()
                                    : LoadTemplateFile(options.templates_path);

  fs::create_directories(options.out_dir);
  const fs::path out_dir(options.out_dir);

  std::vector<Thread> threads;
  {
    std::ofstream cleaned_out = OpenOutput(out_dir / "scene_graphs.cleaned.jsonl");
    std::vector<Thread> gnd;
    for (const SceneGraph& graph : graphs) {
      const SceneGraph cleaned = CleanSceneGraph(graph, options.nms_threshold);
      cleaned_out << SceneGraphToJson(cleaned).dump() << '\n';
      auto ref = GenerateRefThreads(cleaned, templates, options.seed, notice);
      threads.insert(threads.end(), ref.begin(), ref.end());
      auto g = GenerateGndThreads(cleaned, templates, options.seed, notice);
      gnd.insert(gnd.end(), g.begin(), g.end());
    }
    threads.insert(threads.end(), gnd.begin(), gnd.end());
  }

  std::set<std::string> ids;
  for (const Thread& t : threads) ids.insert(t.thread_id);
  for (const std::string& path : options.import_paths) {
    const Corpus imported = ReadCorpusFile(path);
    for (const Thread& thread : imported.threads) {
      std::vector<Violation> violations = CheckImport(thread);
      if (ids.count(thread.thread_id)) {
        violations.push_back({thread.thread_id, 0, RuleCode::kStructure,
                              "duplicate thread_id"});
      }
      if (!violations.empty()) {
        for (const Violation& v : violations) {
          notice("dropping thread '" + v.thread_id + "' (" +
                 std::string(ToString(v.code)) + ", round " +
                 std::to_string(v.round) + "): " + v.message);
        }
        result.violations.insert(result.violations.end(), violations.begin(),
                                 violations.end());
        continue;
      }
      ids.insert(thread.thread_id);
      threads.push_back(options.substitute_pronouns && thread.rounds.size() > 1
                            ? SubstitutePronouns(thread)
                            : thread);
    }
  }

  result.split = SplitDataset(threads, options.holdout, options.seed);
  result.statistics = ComputeStatistics(threads);

  {
    std::ofstream out = OpenOutput(out_dir / "train.jsonl");
    WriteCorpus(out, result.split.train);
  }
  {
    std::ofstream out = OpenOutput(out_dir / "test.jsonl");
    WriteCorpus(out, result.split.test);
  }
  {
    std::ofstream out = OpenOutput(out_dir / "quarantine.jsonl");
    WriteCorpus(out, result.split.quarantine);
  }
  {
    std::ofstream out = OpenOutput(out_dir / "violations.jsonl");
    for (const Violation& v : result.violations) {
      out << ViolationToJson(v).dump() << '\n';
    }
  }
  {
    std::ofstream out =
        OpenOutput(out_dir / ("statistics." + FileExtension(options.format)));
    out << RenderStatistics(result.statistics, options.format, options.seed);
  }
  return result;
}

}  // namespace mrg
