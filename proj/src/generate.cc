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
#include <cctype>
#include <fstream>
#include <sstream>

#include "mrg/dataset.h"
#include "mrg/errors.h"

namespace mrg {
namespace {

constexpr char kDefaultTemplates[] = R"(
[ref]
What is it? <it: {box}> || {article} {attributes} {name}
Describe this region. <region: {box}> || {article} {attributes} {name}
What is in this region? <region: {box}> || {article} {attributes} {name}
What can you see here? <it: {box}> || {article} {attributes} {name}

[gnd]
Where is the {attributes} {name}? || It is here. <{name}: {box}>
Can you find the {attributes} {name}? || It is here. <{name}: {box}>
Can you tell the position of the {attributes} {name}? || It is here. <{name}: {box}>
)";

std::string Trimmed(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string Join(const std::vector<std::string>& words) {
  std::string out;
  for (const std::string& w : words) {
    if (w.empty()) continue;
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

std::string CollapseSpaces(const std::string& s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      continue;
    }
    if (space && !out.empty() && c != '?' && c != '.' && c != '!' &&
        c != ',') {
      out += ' ';
    }
    space = false;
    out += c;
  }
  return out;
}

void ReplaceAll(std::string& s, std::string_view from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

// Expands one template and attaches the object's exact box to every
// annotation it produced.
AnnotatedText Instantiate(std::string_view pattern, const SceneObject& object) {
  AnnotatedText out = ParseAnnotatedText(ExpandTemplate(pattern, object));
  for (Annotation& a : out.annotations) a.box = object.box;
  return out;
}

Thread MakeThread(const SceneGraph& graph, const SceneObject& object,
                  Subset subset, const TemplatePair& pair) {
  const AnnotatedText question = Instantiate(pair.question, object);
  const AnnotatedText answer = Instantiate(pair.answer, object);
  Round round;
  round.index = 1;
  round.question = question.text;
  round.question_annotations = question.annotations;
  round.answer = answer.text;
  round.answer_annotations = answer.annotations;
  round.grounding_required = !round.answer_annotations.empty();

  Thread thread;
  thread.thread_id = std::string(subset == Subset::kRef ? "ref/" : "gnd/") +
                     graph.image_id + "/" + std::to_string(object.object_id);
  thread.image_id = graph.image_id;
  thread.image_dims = graph.image_dims;
  thread.subset = subset;
  thread.rounds.push_back(std::move(round));
  return thread;
}

const TemplatePair& Draw(const std::vector<TemplatePair>& pool,
                         std::uint64_t seed, const SceneGraph& graph,
                         const SceneObject& object, std::string_view kind) {
  Rng rng(DeriveSeed(seed, std::string(kind) + "/" + graph.image_id + "/" +
                               std::to_string(object.object_id)));
  return pool[UniformIndex(rng, pool.size())];
}

}  // namespace

TemplateSet ParseTemplates(std::istream& in) {
  TemplateSet set;
  std::vector<TemplatePair>* section = nullptr;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string text = Trimmed(line);
    if (text.empty() || text[0] == '#') continue;
    if (text == "[ref]") {
      section = &set.ref;
      continue;
    }
    if (text == "[gnd]") {
      section = &set.gnd;
      continue;
    }
    if (text.front() == '[' && text.back() == ']') {
      throw ParseError("unknown template section " + text, 0, line_number);
    }
    if (!section) {
      throw ParseError("template outside of a section", 0, line_number);
    }
    const auto sep = text.find("||");
    if (sep == std::string::npos) {
      throw ParseError("template needs 'question || answer'", 0, line_number);
    }
    TemplatePair pair{Trimmed(text.substr(0, sep)),
                      Trimmed(text.substr(sep + 2))};
    if (pair.question.empty() || pair.answer.empty()) {
      throw ParseError("empty template half", sep, line_number);
    }
    section->push_back(std::move(pair));
  }
  if (set.ref.empty() || set.gnd.empty()) {
    throw ParseError("template file needs [ref] and [gnd] entries", 0,
                     line_number);
  }
  return set;
}

TemplateSet LoadTemplateFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open template file '" + path + "'");
  return ParseTemplates(in);
}

const TemplateSet& DefaultTemplates() {
  static const TemplateSet kSet = [] {
    std::istringstream in(kDefaultTemplates);
    return ParseTemplates(in);
  }();
  return kSet;
}

std::string ExpandTemplate(std::string_view pattern, const SceneObject& object) {
  const std::string name = BaseName(object.primary_name());
  const std::string attributes = Join(object.attributes);
  const std::string described = Join({attributes, name});
  const char first =
      described.empty()
          ? 'x'
          : static_cast<char>(std::tolower(static_cast<unsigned char>(described[0])));
  const std::string article =
      std::string("aeiou").find(first) != std::string::npos ? "an" : "a";
  const std::string box = "[" + FormatCoordinate(object.box.x1) + ", " +
                          FormatCoordinate(object.box.y1) + ", " +
                          FormatCoordinate(object.box.x2) + ", " +
                          FormatCoordinate(object.box.y2) + "]";

  std::string out(pattern);
  ReplaceAll(out, "{name}", name);
  ReplaceAll(out, "{attributes}", attributes);
  ReplaceAll(out, "{article}", article);
  ReplaceAll(out, "{box}", box);
  return CollapseSpaces(out);
}

std::vector<Thread> GenerateRefThreads(const SceneGraph& graph,
                                       const TemplateSet& templates,
                                       std::uint64_t seed,
                                       const NoticeSink& notice) {
  std::vector<Thread> out;
  if (templates.ref.empty()) return out;
  for (const SceneObject& object : graph.objects) {
    if (object.primary_name().empty()) {
      if (notice) {
        notice("skipping unnamed object " + std::to_string(object.object_id) +
               " in image " + graph.image_id);
      }
      continue;
    }
    out.push_back(MakeThread(graph, object, Subset::kRef,
                             Draw(templates.ref, seed, graph, object, "ref")));
  }
  return out;
}

std::vector<Thread> GenerateGndThreads(const SceneGraph& graph,
                                       const TemplateSet& templates,
                                       std::uint64_t seed,
                                       const NoticeSink& notice) {
  std::map<std::string, std::size_t> name_counts;
  for (const SceneObject& object : graph.objects) {
    if (!object.primary_name().empty()) {
      ++name_counts[BaseName(object.primary_name())];
    }
  }
  std::vector<Thread> out;
  if (templates.gnd.empty()) return out;
  for (const SceneObject& object : graph.objects) {
    const std::string name = object.primary_name();
    if (name.empty()) {
      if (notice) {
        notice("skipping unnamed object " + std::to_string(object.object_id) +
               " in image " + graph.image_id);
      }
      continue;
    }
    if (name_counts[BaseName(name)] > 1) {
      if (notice) {
        notice("skipping ambiguous grounding target '" + name + "' in image " +
               graph.image_id);
      }
      continue;
    }
    out.push_back(MakeThread(graph, object, Subset::kGnd,
                             Draw(templates.gnd, seed, graph, object, "gnd")));
  }
  return out;
}

}  // namespace mrg
