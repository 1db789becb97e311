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
#include "mrg/corpus_io.h"

#include <fstream>

#include "mrg/errors.h"

namespace mrg {
namespace {

std::vector<Annotation> AnnotationsFromJson(const Json& list,
                                            const CorpusHeader& header,
                                            const ImageDims& dims) {
  if (!list.is_array()) throw ParseError("annotation list must be an array", 0);
  std::vector<Annotation> out;
  for (const Json& entry : list) {
    Annotation a;
    a.name = RequireString(entry, "name");
    if (a.name.empty()) throw ParseError("empty annotation name", 0);
    a.box = BoxFromJson(RequireField(entry, "box"), header, dims);
    out.push_back(std::move(a));
  }
  return out;
}

Json AnnotationsToJson(const std::vector<Annotation>& annotations) {
  Json list = Json::array();
  for (const Annotation& a : annotations) {
    list.push_back(Json{{"name", a.name}, {"box", BoxToJson(a.box)}});
  }
  return list;
}

}  // namespace

Json BoxToJson(const Box& box) {
  return Json::array({box.x1, box.y1, box.x2, box.y2});
}

Box BoxFromJson(const Json& quad, const CorpusHeader& header,
                const ImageDims& dims, ConvertOptions options) {
  if (!quad.is_array() || quad.size() != 4) {
    throw ParseError("box must be an array of 4 numbers", 0);
  }
  Quad q{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (!quad[i].is_number()) throw ParseError("box entry is not a number", 0);
    q[i] = quad[i].get<double>();
  }
  std::optional<ImageDims> pixel_dims;
  if (header.scale == CoordinateScale::kPixel) pixel_dims = dims;
  return Convert(q, header.box_format, pixel_dims, options);
}

CorpusHeader HeaderFromJson(const Json& record) {
  CorpusHeader header;
  if (record.contains("box_format")) {
    header.box_format = ParseBoxFormat(RequireString(record, "box_format"));
  }
  if (record.contains("coordinate_scale")) {
    const std::string scale = RequireString(record, "coordinate_scale");
    if (scale == "normalized") {
      header.scale = CoordinateScale::kNormalized;
    } else if (scale == "pixel") {
      header.scale = CoordinateScale::kPixel;
    } else {
      throw ParseError("unknown coordinate_scale '" + scale + "'", 0);
    }
  }
  return header;
}

Json HeaderToJson(const CorpusHeader& header) {
  return Json{{"type", "header"},
              {"format", "mrg-corpus"},
              {"version", 1},
              {"box_format", std::string(ToString(header.box_format))},
              {"coordinate_scale", header.scale == CoordinateScale::kPixel
                                       ? "pixel"
                                       : "normalized"}};
}

Json ThreadToJson(const Thread& thread) {
  Json rounds = Json::array();
  for (const Round& r : thread.rounds) {
    rounds.push_back(Json{
        {"index", r.index},
        {"question", r.question},
        {"answer", r.answer},
        {"question_annotations", AnnotationsToJson(r.question_annotations)},
        {"answer_annotations", AnnotationsToJson(r.answer_annotations)},
        {"grounding_required", r.grounding_required}});
  }
  Json record{{"type", "thread"},
              {"thread_id", thread.thread_id},
              {"image_id", thread.image_id},
              {"image_width", thread.image_dims.width},
              {"image_height", thread.image_dims.height},
              {"subset", std::string(ToString(thread.subset))},
              {"rounds", std::move(rounds)}};
  if (thread.chain) {
    Json chain = Json::array();
    for (const ChainLink& link : thread.chain->links) {
      chain.push_back(Json{{"subject", link.subject},
                           {"predicate", link.predicate},
                           {"object", link.object}});
    }
    record["chain"] = std::move(chain);
  }
  return record;
}

Thread ThreadFromJson(const Json& record, const CorpusHeader& header) {
  Thread thread;
  thread.thread_id = RequireString(record, "thread_id");
  thread.image_id = RequireString(record, "image_id");
  thread.image_dims.width = RequireField(record, "image_width").get<int>();
  thread.image_dims.height = RequireField(record, "image_height").get<int>();
  thread.subset = ParseSubset(RequireString(record, "subset"));
  const Json& rounds = RequireField(record, "rounds");
  if (!rounds.is_array()) throw ParseError("'rounds' must be an array", 0);
  for (const Json& r : rounds) {
    Round round;
    round.index = RequireField(r, "index").get<int>();
    round.question = RequireString(r, "question");
    round.answer = RequireString(r, "answer");
    if (r.contains("question_annotations")) {
      round.question_annotations = AnnotationsFromJson(
          r.at("question_annotations"), header, thread.image_dims);
    }
    if (r.contains("answer_annotations")) {
      round.answer_annotations = AnnotationsFromJson(
          r.at("answer_annotations"), header, thread.image_dims);
    }
    round.grounding_required = r.contains("grounding_required")
                                   ? r.at("grounding_required").get<bool>()
                                   : !round.answer_annotations.empty();
    thread.rounds.push_back(std::move(round));
  }
  if (record.contains("chain")) {
    RelationshipChain chain;
    for (const Json& link : record.at("chain")) {
      chain.links.push_back({RequireString(link, "subject"),
                             RequireString(link, "predicate"),
                             RequireString(link, "object")});
    }
    thread.chain = std::move(chain);
  }
  return thread;
}

Corpus ReadCorpus(std::istream& in) {
  Corpus corpus;
  bool first = true;
  ForEachJsonLine(in, [&](const Json& record, std::size_t) {
    const std::string type =
        record.contains("type") ? RequireString(record, "type") : "thread";
    if (type == "header") {
      if (!first) throw ParseError("header record must come first", 0);
      corpus.header = HeaderFromJson(record);
    } else if (type == "thread") {
      corpus.threads.push_back(ThreadFromJson(record, corpus.header));
    } else {
      throw ParseError("unknown record type '" + type + "'", 0);
    }
    first = false;
  });
  return corpus;
}

Corpus ReadCorpusFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file '" + path + "'");
  return ReadCorpus(in);
}

void WriteCorpus(std::ostream& out, const std::vector<Thread>& threads) {
  out << HeaderToJson(CorpusHeader{}).dump() << '\n';
  for (const Thread& t : threads) out << ThreadToJson(t).dump() << '\n';
}

void WriteCorpusFile(const std::string& path,
                     const std::vector<Thread>& threads) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write corpus file '" + path + "'");
  WriteCorpus(out, threads);
}

}  // namespace mrg
