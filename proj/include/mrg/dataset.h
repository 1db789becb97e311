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
#ifndef MRG_DATASET_H_
#define MRG_DATASET_H_

#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mrg/dialogue.h"
#include "mrg/geometry.h"
#include "mrg/json.h"
#include "mrg/rng.h"

namespace mrg {

// ---------------------------------------------------------------------------
// Scene graphs.

struct SceneObject {
  std::size_t object_id = 0;
  // The first name is the primary one used for grouping and generation.
  std::vector<std::string> names;
  Box box;
  std::vector<std::string> attributes;

  std::string primary_name() const { return names.empty() ? "" : names[0]; }

  friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

struct Relationship {
  std::size_t subject_id = 0;
  std::string predicate;
  std::size_t object_id = 0;

  friend bool operator==(const Relationship&, const Relationship&) = default;
};

struct SceneGraph {
  std::string image_id;
  ImageDims image_dims;
  std::vector<SceneObject> objects;
  std::vector<Relationship> relationships;

  const SceneObject* find(std::size_t object_id) const;
  // Every relationship endpoint names an existing object.
  bool has_referential_integrity() const;

  friend bool operator==(const SceneGraph&, const SceneGraph&) = default;
};

// One image per JSON line:
//   {"image_id": str, "image_width": int, "image_height": int,
//    "box_format": "corners"|"xywh",              // optional, default corners
//    "coordinate_scale": "pixel"|"normalized",    // optional, default pixel
//    "objects": [{"object_id": int, "names": [str], "box": [4 numbers],
//                 "attributes": [str]}],
//    "relationships": [{"subject_id": int, "predicate": str,
//                       "object_id": int}]}
// Throws mrg::ParseError with line numbers; dangling relationship endpoints
// and duplicate object ids are parse errors.
std::vector<SceneGraph> ReadSceneGraphs(std::istream& in);
SceneGraph SceneGraphFromJson(const Json& record);
Json SceneGraphToJson(const SceneGraph& graph);

// Deduplicates annotations.
//  1. Objects sharing a primary base name go through NMS with box area as
//     the priority. When several survive they are renamed "name_1",
//     "name_2", ... in descending area order.
//  2. Across names, an object overlapping a larger one with
//     IoU >= iou_threshold is discarded.
// Relationships touching a removed object are dropped. Idempotent.
SceneGraph CleanSceneGraph(const SceneGraph& graph, double iou_threshold = 0.5);

// ---------------------------------------------------------------------------
// Rule-template thread generation.

// Question/answer templates. Slots:
//   {name}        object name without its numeric index
//   {attributes}  space-joined attributes (may be empty)
//   {article}     "a" or "an" for the attributed name
//   {box}         "[x1, y1, x2, y2]" in normalized corners
// Templates use the annotated-text grammar, so "What is it? <it: {box}>"
// attaches the object's box to the question.
struct TemplatePair {
  std::string question;
  std::string answer;

  friend bool operator==(const TemplatePair&, const TemplatePair&) = default;
};

struct TemplateSet {
  std::vector<TemplatePair> ref;
  std::vector<TemplatePair> gnd;

  friend bool operator==(const TemplateSet&, const TemplateSet&) = default;
};

// Plain-text template file:
//   # comment
//   [ref]
//   question template || answer template
//   [gnd]
//   question template || answer template
TemplateSet ParseTemplates(std::istream& in);
TemplateSet LoadTemplateFile(const std::string& path);
// The templates shipped in data/templates/default.txt.
const TemplateSet& DefaultTemplates();

// Receives notices about skipped inputs; may be empty.
using NoticeSink = std::function<void(const std::string&)>;

// One single-round REF thread per named object: the question carries the
// object's box, the answer describes it in text only.
std::vector<Thread> GenerateRefThreads(const SceneGraph& graph,
                                       const TemplateSet& templates,
                                       std::uint64_t seed,
                                       const NoticeSink& notice = {});

// One single-round GND thread per object whose base name is unique in the
// graph: the question names the object, the answer carries its box.
std::vector<Thread> GenerateGndThreads(const SceneGraph& graph,
                                       const TemplateSet& templates,
                                       std::uint64_t seed,
                                       const NoticeSink& notice = {});

// Expands one template for an object (exposed for tests).
std::string ExpandTemplate(std::string_view pattern, const SceneObject& object);

// ---------------------------------------------------------------------------
// Validation.

enum class RuleCode {
  // Objects appear in questions, or subjects appear in answers.
  kLc1,
  // A question names objects absent from the previous answer.
  kLc2,
  // An answer mentions its target object without coordinates.
  kLc3,
  // Rounds do not follow the order of the relationship chain.
  kLc4,
  // A question does not include the subject from the previous answer.
  kLc5,
  // Structural problems: round numbering, grounding flags, empty threads,
  // duplicate ids, broken chains.
  kStructure,
};

std::string_view ToString(RuleCode code);

struct Violation {
  std::string thread_id;
  int round = 0;  // 0 when the violation concerns the whole thread
  RuleCode code = RuleCode::kStructure;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

Json ViolationToJson(const Violation& violation);

// Checks a logic-chain thread against its relationship chain. Round n is
// expected to ask about link n: its question is annotated with the link's
// subject and its answer with the link's object. Names are compared through
// annotations (see SameObjectName).
std::vector<Violation> ValidateLogicChain(const Thread& thread,
                                          const RelationshipChain& chain);

// Structural checks for a single thread (rounds present, indices consecutive
// from 1, grounding flags consistent with answer annotations, linked chain).
std::vector<Violation> CheckStructure(const Thread& thread);

// Structural checks, duplicate thread ids, and logic-chain checks for every
// thread that carries a chain.
std::vector<Violation> ValidateCorpus(const std::vector<Thread>& threads);

// Builds a chain from scene-graph relationships; the link endpoints must
// exist. Throws mrg::StructuralError when the relationships do not link.
RelationshipChain ChainFromRelationships(const SceneGraph& graph,
                                         const std::vector<Relationship>& rels);

// ---------------------------------------------------------------------------
// Splitting.

struct Holdout {
  std::map<Subset, std::size_t> counts = {{Subset::kMrg, 800},
                                          {Subset::kLc, 200}};
};

struct Split {
  std::vector<Thread> train;
  std::vector<Thread> test;
  // Threads that share an image with a test thread; in neither split.
  std::vector<Thread> quarantine;
};

// Draws the held-out counts per subset, then moves every other thread that
// shares an image with a test thread into quarantine, so train and test
// never share an image. Deterministic per seed; output keeps input order.
// Throws mrg::StructuralError when a subset has fewer threads than requested
// or when every non-test thread ends up quarantined.
Split SplitDataset(const std::vector<Thread>& threads, const Holdout& holdout,
                   std::uint64_t seed);

// ---------------------------------------------------------------------------
// Training mixtures.

enum class Group { kA, kB, kC };

std::string_view ToString(Group group);
Group ParseGroup(std::string_view name);

struct SourceRatio {
  std::string source;
  std::uint32_t weight = 1;
};

// Preset mixture ratios. Group B lists eight weights for nine named
// datasets; the preset uses the eight sources the weights can align with.
std::vector<SourceRatio> DefaultRatios(Group group);

// Applies a group's view to one thread. Returns std::nullopt when the thread
// does not qualify for the group (B needs question boxes, C answer boxes).
//  A: strip every annotation.
//  B: strip answer annotations; the described object in each annotated
//     question is replaced by "it", "the region" or "this region".
//  C: unchanged.
std::optional<Thread> ApplyGroupView(const Thread& thread, Group group,
                                     Rng& rng);

struct MixedSample {
  std::size_t source = 0;  // index into the ratio list
  Thread thread;
};

// Deterministic weighted stream over named sources. Each draw picks source i
// with probability weight_i / sum(weights), then takes that source's next
// thread from a per-epoch shuffle. Throws mrg::StructuralError for unknown
// source names, zero weights, and sources left empty by the group filter.
class GroupMixer {
 public:
  GroupMixer(const std::map<std::string, std::vector<Thread>>& sources,
             Group group, std::vector<SourceRatio> ratios, std::uint64_t seed);

  MixedSample Next();
  std::vector<MixedSample> Take(std::size_t count);

  const std::vector<SourceRatio>& ratios() const { return ratios_; }

 private:
  struct Pool {
    std::vector<Thread> threads;
    std::vector<std::size_t> order;
    std::size_t cursor = 0;
  };

  std::vector<SourceRatio> ratios_;
  std::vector<Pool> pools_;
  std::uint64_t total_weight_ = 0;
  Rng rng_;
};

// ---------------------------------------------------------------------------
// Statistics.

struct SubsetStats {
  std::size_t threads = 0;
  std::size_t qa_pairs = 0;

  friend bool operator==(const SubsetStats&, const SubsetStats&) = default;
};

struct Statistics {
  std::map<Subset, SubsetStats> per_subset;
  SubsetStats total;
};

Statistics ComputeStatistics(const std::vector<Thread>& threads);

}  // namespace mrg

#endif  // MRG_DATASET_H_
