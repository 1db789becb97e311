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
#ifndef MRG_DIALOGUE_H_
#define MRG_DIALOGUE_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mrg/geometry.h"

namespace mrg {

// A named object reference attached to a question or an answer. The name may
// carry a "name_number" index (e.g. "man_2").
struct Annotation {
  std::string name;
  Box box;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct Round {
  int index = 1;
  std::string question;
  std::string answer;
  std::vector<Annotation> question_annotations;
  std::vector<Annotation> answer_annotations;
  // True iff the ground truth asks for boxes in the answer.
  bool grounding_required = false;

  friend bool operator==(const Round&, const Round&) = default;
};

enum class Subset { kMrg, kLc, kRef, kGnd };

std::string_view ToString(Subset subset);
// Accepts "MRG", "LC", "REF", "GND".
Subset ParseSubset(std::string_view name);

// One (subject, predicate, object) link of a relationship chain, by name.
struct ChainLink {
  std::string subject;
  std::string predicate;
  std::string object;

  friend bool operator==(const ChainLink&, const ChainLink&) = default;
};

// Each link's object is the next link's subject.
struct RelationshipChain {
  std::vector<ChainLink> links;

  // Non-empty and linked; names compared with SameObjectName.
  bool is_linked() const;

  friend bool operator==(const RelationshipChain&,
                         const RelationshipChain&) = default;
};

struct Thread {
  std::string thread_id;
  std::string image_id;
  ImageDims image_dims;
  Subset subset = Subset::kMrg;
  std::vector<Round> rounds;
  // Present on imported logic-chain threads.
  std::optional<RelationshipChain> chain;

  friend bool operator==(const Thread&, const Thread&) = default;
};

// Sets grounding_required from the answer annotations and renumbers rounds
// from 1.
void Canonicalize(Thread& thread);

// Describes how coordinates in annotated text are written.
struct BoxEncoding {
  BoxFormat format = BoxFormat::kCorners;
  // Set when coordinates are pixels.
  std::optional<ImageDims> pixel_dims;
  ConvertOptions convert;
};

struct AnnotatedText {
  std::string text;
  std::vector<Annotation> annotations;

  friend bool operator==(const AnnotatedText&, const AnnotatedText&) = default;
};

// Splits "body <name: [a, b, c, d], name2: [a, b, c, d]>" into the trimmed
// body and its annotations, in suffix order. A line without a suffix has no
// annotations. Throws mrg::ParseError (with the character offset) on an
// unterminated suffix, a quadruple without exactly four numbers, or an empty
// name; mrg::GeometryError propagates from box conversion.
AnnotatedText ParseAnnotatedText(std::string_view raw,
                                 const BoxEncoding& encoding = {});

// Inverse of ParseAnnotatedText. Numbers use six decimals, so the round trip
// is exact for coordinates on the 1e-6 grid.
std::string RenderAnnotatedText(std::string_view text,
                                const std::vector<Annotation>& annotations,
                                const BoxEncoding& encoding = {});

std::string FormatCoordinate(double value);

// Filler phrases removed from answers before scoring. Each entry is a
// case-insensitive ECMAScript regex matched on word boundaries.
struct AnswerCleaningConfig {
  std::vector<std::string> fillers = {"it is", "there is", "region[0-9]+"};
};

// Removes filler phrases, collapses whitespace, and repairs spacing around
// punctuation. Idempotent.
std::string NormalizeAnswerText(std::string_view raw,
                                const AnswerCleaningConfig& config = {});

// "man_2" -> "man". Names without a numeric suffix are returned unchanged.
std::string BaseName(std::string_view name);
// Case-insensitive name equality; an unindexed name also matches any indexed
// form of the same base ("cup" ~ "cup_1"), two indexed names must agree.
bool SameObjectName(std::string_view a, std::string_view b);

// Replaces the first whole-word occurrence of phrase in text (case
// insensitive) together with a directly preceding determiner ("the", "a",
// "an", "this", "that"). The replacement is capitalized when it starts a
// sentence. Returns std::nullopt when the phrase does not occur.
std::optional<std::string> ReplaceFirstMention(std::string_view text,
                                               std::string_view phrase,
                                               std::string_view replacement);

// True when phrase occurs in text as a whole word, case-insensitively.
bool MentionsPhrase(std::string_view text, std::string_view phrase);

// In every round n >= 2, the first mention of each object annotated in the
// answer of round n-1 is replaced in the question: the first replacement in
// a question becomes "it"; further replacements, and names shared by several
// prior-answer objects, become "the object". Annotations are not modified.
Thread SubstitutePronouns(const Thread& thread);

}  // namespace mrg

#endif  // MRG_DIALOGUE_H_
