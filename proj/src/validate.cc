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
#include <set>

#include "mrg/dataset.h"
#include "mrg/errors.h"

namespace mrg {
namespace {

bool Contains(const std::vector<Annotation>& annotations,
              std::string_view name) {
  return std::any_of(
      annotations.begin(), annotations.end(),
      [&](const Annotation& a) { return SameObjectName(a.name, name); });
}

bool IsChainNode(const RelationshipChain& chain, std::string_view name) {
  return std::any_of(chain.links.begin(), chain.links.end(),
                     [&](const ChainLink& l) {
                       return SameObjectName(l.subject, name) ||
                              SameObjectName(l.object, name);
                     });
}

std::string Quoted(std::string_view s) { return "'" + std::string(s) + "'"; }

}  // namespace

std::string_view ToString(RuleCode code) {
  switch (code) {
    case RuleCode::kLc1:
      return "LC1";
    case RuleCode::kLc2:
      return "LC2";
    case RuleCode::kLc3:
      return "LC3";
    case RuleCode::kLc4:
      return "LC4";
    case RuleCode::kLc5:
      return "LC5";
    case RuleCode::kStructure:
      return "STRUCTURE";
  }
  return "STRUCTURE";
}

Json ViolationToJson(const Violation& v) {
  return Json{{"thread_id", v.thread_id},
              {"round", v.round},
              {"rule", std::string(ToString(v.code))},
              {"message", v.message}};
}

std::vector<Violation> ValidateLogicChain(const Thread& thread,
                                          const RelationshipChain& chain) {
  std::vector<Violation> out;
  auto report = [&](int round, RuleCode code, std::string message) {
    out.push_back({thread.thread_id, round, code, std::move(message)});
  };

  for (std::size_t i = 0; i < thread.rounds.size(); ++i) {
    const Round& round = thread.rounds[i];
    const int n = static_cast<int>(i + 1);
    const auto& asked = round.question_annotations;
    const auto& answered = round.answer_annotations;

    if (i < chain.links.size()) {
      const ChainLink& link = chain.links[i];
      if (Contains(asked, link.object)) {
        report(n, RuleCode::kLc1,
               "object " + Quoted(link.object) +
                   " appears in the question before an answer introduces it");
      }
      if (Contains(answered, link.subject)) {
        report(n, RuleCode::kLc1,
               "subject " + Quoted(link.subject) + " appears in its own answer");
      }
      if (MentionsPhrase(round.answer, BaseName(link.object)) &&
          !Contains(answered, link.object)) {
        report(n, RuleCode::kLc3,
               "answer mentions " + Quoted(link.object) +
                   " without coordinates");
      }
      if (!Contains(asked, link.subject)) {
        for (const Annotation& a : asked) {
          if (IsChainNode(chain, a.name)) {
            report(n, RuleCode::kLc4,
                   "question asks about " + Quoted(a.name) +
                       " but chain link " + std::to_string(n) +
                       " starts at " + Quoted(link.subject));
            break;
          }
        }
      }
    } else {
      report(n, RuleCode::kLc4,
             "round has no matching link in a chain of " +
                 std::to_string(chain.links.size()));
    }

    if (i > 0) {
      const auto& previous = thread.rounds[i - 1].answer_annotations;
      for (const Annotation& a : asked) {
        if (!Contains(previous, a.name)) {
          report(n, RuleCode::kLc2,
                 "question object " + Quoted(a.name) +
                     " does not appear in the previous answer");
        }
      }
      const bool has_subject =
          std::any_of(asked.begin(), asked.end(), [&](const Annotation& a) {
            return Contains(previous, a.name);
          });
      if (!has_subject) {
        report(n, RuleCode::kLc5,
               "question does not include the subject from the previous "
               "answer");
      }
    }
  }
  return out;
}

std::vector<Violation> CheckStructure(const Thread& thread) {
  std::vector<Violation> out;
  auto report = [&](int round, std::string message) {
    out.push_back(
        {thread.thread_id, round, RuleCode::kStructure, std::move(message)});
  };
  if (thread.thread_id.empty()) report(0, "empty thread_id");
  if (thread.rounds.empty()) report(0, "thread has no rounds");
  for (std::size_t i = 0; i < thread.rounds.size(); ++i) {
    const Round& r = thread.rounds[i];
    const int n = static_cast<int>(i + 1);
    if (r.index != n) {
      report(n, "round index " + std::to_string(r.index) + ", expected " +
                    std::to_string(n));
    }
    if (r.grounding_required != !r.answer_annotations.empty()) {
      report(n, "grounding_required disagrees with answer annotations");
    }
    for (const auto* list : {&r.question_annotations, &r.answer_annotations}) {
      for (const Annotation& a : *list) {
        if (a.name.empty()) report(n, "annotation with empty name");
        if (!a.box.is_canonical()) report(n, "annotation box not canonical");
      }
    }
  }
  if (thread.chain && !thread.chain->is_linked()) {
    report(0, "relationship chain is empty or not linked");
  }
  return out;
}

std::vector<Violation> ValidateCorpus(const std::vector<Thread>& threads) {
  std::vector<Violation> out;
  std::set<std::string> seen;
  for (const Thread& thread : threads) {
    if (!seen.insert(thread.thread_id).second) {
      out.push_back({thread.thread_id, 0, RuleCode::kStructure,
                     "duplicate thread_id"});
    }
    auto structural = CheckStructure(thread);
    out.insert(out.end(), structural.begin(), structural.end());
    if (thread.chain && thread.chain->is_linked()) {
      auto logic = ValidateLogicChain(thread, *thread.chain);
      out.insert(out.end(), logic.begin(), logic.end());
    }
  }
  return out;
}

RelationshipChain ChainFromRelationships(
    const SceneGraph& graph, const std::vector<Relationship>& rels) {
  RelationshipChain chain;
  for (std::size_t i = 0; i < rels.size(); ++i) {
    const SceneObject* subject = graph.find(rels[i].subject_id);
    const SceneObject* object = graph.find(rels[i].object_id);
    if (!subject || !object) {
      throw StructuralError("chain link references an unknown object");
    }
    if (i > 0 && rels[i - 1].object_id != rels[i].subject_id) {
      throw StructuralError("relationships do not form a chain at link " +
                            std::to_string(i + 1));
    }
    chain.links.push_back(
        {subject->primary_name(), rels[i].predicate, object->primary_name()});
  }
  if (chain.links.empty()) throw StructuralError("empty relationship chain");
  return chain;
}

}  // namespace mrg
