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
#ifndef MRG_CORPUS_IO_H_
#define MRG_CORPUS_IO_H_

// Corpus files are JSON-lines. The first line may be a header record
//
//   {"type": "header", "format": "mrg-corpus", "version": 1,
//    "box_format": "corners" | "xywh",
//    "coordinate_scale": "normalized" | "pixel"}
//
// followed by one thread record per line:
//
//   {"type": "thread", "thread_id": ..., "image_id": ...,
//    "image_width": int, "image_height": int, "subset": "MRG"|"LC"|"REF"|"GND",
//    "rounds": [{"index": 1, "question": str, "answer": str,
//                "question_annotations": [{"name": str, "box": [a,b,c,d]}],
//                "answer_annotations": [...],
//                "grounding_required": bool}],
//    "chain": [{"subject": str, "predicate": str, "object": str}]}   // optional
//
// Question and answer text is stored clean; the angle-bracket grammar is only
// used for model input/output. Without a header, boxes are normalized corners.
// Writers always emit normalized corners.

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "mrg/dialogue.h"
#include "mrg/json.h"

namespace mrg {

enum class CoordinateScale { kNormalized, kPixel };

struct CorpusHeader {
  BoxFormat box_format = BoxFormat::kCorners;
  CoordinateScale scale = CoordinateScale::kNormalized;
};

struct Corpus {
  CorpusHeader header;
  std::vector<Thread> threads;
};

// Reads a whole corpus. Blank lines are skipped. Throws mrg::ParseError
// carrying the 1-based line number for malformed records, including boxes
// that fail conversion. Round indices and grounding flags are stored as
// read; CheckStructure() reports inconsistencies.
Corpus ReadCorpus(std::istream& in);
Corpus ReadCorpusFile(const std::string& path);

void WriteCorpus(std::ostream& out, const std::vector<Thread>& threads);
void WriteCorpusFile(const std::string& path,
                     const std::vector<Thread>& threads);

Json ThreadToJson(const Thread& thread);
Thread ThreadFromJson(const Json& record, const CorpusHeader& header);

Json BoxToJson(const Box& box);
// Converts a JSON quadruple using the header's declared format and scale.
Box BoxFromJson(const Json& quad, const CorpusHeader& header,
                const ImageDims& dims, ConvertOptions options = {});

CorpusHeader HeaderFromJson(const Json& record);
Json HeaderToJson(const CorpusHeader& header);

}  // namespace mrg

#endif  // MRG_CORPUS_IO_H_
