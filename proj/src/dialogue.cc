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
#include "mrg/dialogue.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <regex>
#include <string>

#include "mrg/errors.h"

namespace mrg {
namespace {

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)); }
bool IsWordChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}
char Lower(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

std::string ToLower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), Lower);
  return out;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && IsSpace(s.front())) s.remove_prefix(1);
  while (!s.empty() && IsSpace(s.back())) s.remove_suffix(1);
  return s;
}

// Offset of the first non-space character at or after pos.
std::size_t SkipSpace(std::string_view s, std::size_t pos) {
  while (pos < s.size() && IsSpace(s[pos])) ++pos;
  return pos;
}

class SuffixParser {
 public:
  SuffixParser(std::string_view raw, std::size_t open, std::size_t close,
               const BoxEncoding& encoding)
      : raw_(raw), pos_(open + 1), close_(close), encoding_(encoding) {}

  std::vector<Annotation> Parse() {
    std::vector<Annotation> out;
    pos_ = SkipSpace(raw_, pos_);
    if (pos_ >= close_) throw ParseError("empty annotation suffix", pos_);
    while (true) {
      out.push_back(ParseEntry());
      pos_ = SkipSpace(raw_, pos_);
      if (pos_ == close_) break;
      if (raw_[pos_] != ',') {
        throw ParseError("expected ',' between annotations", pos_);
      }
      ++pos_;
    }
    return out;
  }

 private:
  Annotation ParseEntry() {
    const std::size_t name_start = pos_;
    const std::size_t colon = raw_.find(':', pos_);
    if (colon == std::string_view::npos || colon > close_) {
      throw ParseError("expected ':' after annotation name", name_start);
    }
    const std::string_view name = Trim(raw_.substr(pos_, colon - pos_));
    if (name.empty()) throw ParseError("empty annotation name", name_start);
    if (name.find_first_of("[],<>") != std::string_view::npos) {
      throw ParseError("invalid character in annotation name", name_start);
    }
    pos_ = SkipSpace(raw_, colon + 1);
    if (pos_ >= close_ || raw_[pos_] != '[') {
      throw ParseError("expected '[' to open a quadruple", pos_);
    }
    const std::size_t bracket = pos_;
    const std::size_t end = raw_.find(']', bracket);
    if (end == std::string_view::npos || end > close_) {
      throw ParseError("unterminated quadruple", bracket);
    }

    std::vector<double> numbers;
    std::size_t p = bracket + 1;
    while (true) {
      p = SkipSpace(raw_, p);
      if (p == end && numbers.empty()) break;
      numbers.push_back(ParseNumber(p, end));
      p = SkipSpace(raw_, p);
      if (p == end) break;
      if (raw_[p] != ',') throw ParseError("expected ',' in quadruple", p);
      ++p;
    }
    if (numbers.size() != 4) {
      throw ParseError("quadruple has " + std::to_string(numbers.size()) +
                           " numbers, expected 4",
                       bracket);
    }
    pos_ = end + 1;

    Annotation annotation;
    annotation.name = std::string(name);
    try {
      annotation.box =
          Convert({numbers[0], numbers[1], numbers[2], numbers[3]},
                  encoding_.format, encoding_.pixel_dims, encoding_.convert);
    } catch (const GeometryError& e) {
      throw ParseError(e.what(), bracket);
    }
    return annotation;
  }

  double ParseNumber(std::size_t& p, std::size_t end) {
    std::size_t q = p;
    while (q < end && !IsSpace(raw_[q]) && raw_[q] != ',') ++q;
    const std::string token(raw_.substr(p, q - p));
    if (token.empty()) throw ParseError("missing number in quadruple", p);
    char* stop = nullptr;
    const double value = std::strtod(token.c_str(), &stop);
    if (stop != token.c_str() + token.size()) {
      throw ParseError("invalid number '" + token + "'", p);
    }
    p = q;
    return value;
  }

  std::string_view raw_;
  std::size_t pos_;
  std::size_t close_;
  const BoxEncoding& encoding_;
};

bool AtSentenceStart(std::string_view text, std::size_t pos) {
  std::size_t i = pos;
  while (i > 0 && IsSpace(text[i - 1])) --i;
  if (i == 0) return true;
  const char prev = text[i - 1];
  return prev == '.' || prev == '?' || prev == '!';
}

// First whole-word, case-insensitive occurrence of phrase at or after from.
std::size_t FindWord(std::string_view text, std::string_view phrase,
                     std::size_t from = 0) {
  if (phrase.empty()) return std::string_view::npos;
  const std::string lower_text = ToLower(text);
  const std::string lower_phrase = ToLower(phrase);
  std::size_t pos = lower_text.find(lower_phrase, from);
  while (pos != std::string::npos) {
    const bool left_ok = pos == 0 || !IsWordChar(text[pos - 1]);
    const std::size_t after = pos + lower_phrase.size();
    const bool right_ok = after >= text.size() || !IsWordChar(text[after]);
    if (left_ok && right_ok) return pos;
    pos = lower_text.find(lower_phrase, pos + 1);
  }
  return std::string_view::npos;
}

// Start of a determiner directly preceding pos, or pos itself.
std::size_t DeterminerStart(std::string_view text, std::size_t pos) {
  static const char* const kDeterminers[] = {"the", "a", "an", "this", "that"};
  std::size_t end = pos;
  while (end > 0 && IsSpace(text[end - 1])) --end;
  if (end == pos) return pos;
  std::size_t start = end;
  while (start > 0 && IsWordChar(text[start - 1])) --start;
  const std::string word = ToLower(text.substr(start, end - start));
  for (const char* d : kDeterminers) {
    if (word == d) return start;
  }
  return pos;
}

std::string Capitalize(std::string_view s) {
  std::string out(s);
  if (!out.empty()) {
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  }
  return out;
}

struct Mention {
  std::size_t start;
  std::size_t end;
};

std::optional<Mention> FindMention(std::string_view text,
                                   std::string_view phrase) {
  const std::size_t pos = FindWord(text, phrase);
  if (pos == std::string_view::npos) return std::nullopt;
  return Mention{DeterminerStart(text, pos), pos + phrase.size()};
}

std::string SpliceMention(std::string_view text, const Mention& m,
                          std::string_view replacement) {
  std::string out(text.substr(0, m.start));
  out += AtSentenceStart(text, m.start) ? Capitalize(replacement)
                                        : std::string(replacement);
  out += text.substr(m.end);
  return out;
}

// Text used to look for an annotated object in prose: the full name first,
// then the unindexed base name.
std::optional<Mention> FindObjectMention(std::string_view text,
                                         std::string_view name) {
  if (auto m = FindMention(text, name)) return m;
  const std::string base = BaseName(name);
  if (base != name) return FindMention(text, base);
  return std::nullopt;
}

}  // namespace

std::string_view ToString(Subset subset) {
  switch (subset) {
    case Subset::kMrg:
      return "MRG";
    case Subset::kLc:
      return "LC";
    case Subset::kRef:
      return "REF";
    case Subset::kGnd:
      return "GND";
  }
  return "MRG";
}

Subset ParseSubset(std::string_view name) {
  if (name == "MRG") return Subset::kMrg;
  if (name == "LC") return Subset::kLc;
  if (name == "REF") return Subset::kRef;
  if (name == "GND") return Subset::kGnd;
  throw ParseError("unknown subset '" + std::string(name) + "'", 0);
}

bool RelationshipChain::is_linked() const {
  if (links.empty()) return false;
  for (std::size_t i = 1; i < links.size(); ++i) {
    if (!SameObjectName(links[i - 1].object, links[i].subject)) return false;
  }
  return true;
}

void Canonicalize(Thread& thread) {
  int index = 1;
  for (Round& round : thread.rounds) {
    round.index = index++;
    round.grounding_required = !round.answer_annotations.empty();
  }
}

AnnotatedText ParseAnnotatedText(std::string_view raw,
                                 const BoxEncoding& encoding) {
  const std::string_view trimmed = Trim(raw);
  const std::size_t lead = trimmed.empty()
                               ? 0
                               : static_cast<std::size_t>(trimmed.data() -
                                                          raw.data());
  const std::size_t open = raw.rfind('<');
  if (open == std::string_view::npos || open < lead) {
    return {std::string(trimmed), {}};
  }
  const std::size_t close = lead + trimmed.size() - 1;
  if (raw[close] != '>') {
    // A bare '<' in prose ("3 < 5") is body text; something that looks like
    // an annotation entry is an unterminated suffix.
    const std::string_view tail = raw.substr(open);
    if (tail.find(':') != std::string_view::npos &&
        tail.find('[') != std::string_view::npos) {
      throw ParseError("unterminated annotation suffix", open);
    }
    return {std::string(trimmed), {}};
  }
  AnnotatedText out;
  out.annotations = SuffixParser(raw, open, close, encoding).Parse();
  out.text = std::string(Trim(raw.substr(lead, open - lead)));
  return out;
}

std::string FormatCoordinate(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

std::string RenderAnnotatedText(std::string_view text,
                                const std::vector<Annotation>& annotations,
                                const BoxEncoding& encoding) {
  std::string out(text);
  if (annotations.empty()) return out;
  if (!out.empty()) out += ' ';
  out += '<';
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    if (i > 0) out += ", ";
    const Quad q =
        ToQuad(annotations[i].box, encoding.format, encoding.pixel_dims);
    out += annotations[i].name;
    out += ": [";
    for (std::size_t k = 0; k < 4; ++k) {
      if (k > 0) out += ", ";
      out += FormatCoordinate(q[k]);
    }
    out += ']';
  }
  out += '>';
  return out;
}

std::string NormalizeAnswerText(std::string_view raw,
                                const AnswerCleaningConfig& config) {
  // Compiling the filler patterns dominates the cost of a call, so keep the
  // last compiled set around.
  thread_local std::vector<std::string> cached_fillers;
  thread_local std::vector<std::regex> patterns;
  if (patterns.empty() || cached_fillers != config.fillers) {
    patterns.clear();
    for (const std::string& filler : config.fillers) {
      std::string pattern;
      for (char c : filler) pattern += c == ' ' ? std::string("\\s+") : std::string(1, c);
      patterns.emplace_back("\\b(?:" + pattern + ")\\b",
                            std::regex::ECMAScript | std::regex::icase);
    }
    cached_fillers = config.fillers;
  }
  static const std::regex kSpaces("\\s+");
  static const std::regex kSpaceBeforePunct("\\s+([.,!?;:])");
  static const std::regex kLeadingPunct("^[,;:]+\\s*");

  std::string text(raw);
  while (true) {
    std::string next = text;
    for (const auto& re : patterns) next = std::regex_replace(next, re, " ");
    next = std::regex_replace(next, kSpaces, " ");
    next = std::regex_replace(next, kSpaceBeforePunct, "$1");
    next = std::string(Trim(next));
    next = std::regex_replace(next, kLeadingPunct, "");
    if (next == text) break;
    text = std::move(next);
  }
  return text;
}

std::string BaseName(std::string_view name) {
  const std::size_t underscore = name.rfind('_');
  if (underscore == std::string_view::npos || underscore == 0 ||
      underscore + 1 == name.size()) {
    return std::string(name);
  }
  const std::string_view digits = name.substr(underscore + 1);
  if (!std::all_of(digits.begin(), digits.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c));
      })) {
    return std::string(name);
  }
  return std::string(name.substr(0, underscore));
}

bool SameObjectName(std::string_view a, std::string_view b) {
  const std::string la = ToLower(Trim(a));
  const std::string lb = ToLower(Trim(b));
  if (la == lb) return true;
  const std::string ba = BaseName(la);
  const std::string bb = BaseName(lb);
  if (ba != bb) return false;
  // Exactly one side is indexed.
  return (ba == la) != (bb == lb);
}

std::optional<std::string> ReplaceFirstMention(std::string_view text,
                                               std::string_view phrase,
                                               std::string_view replacement) {
  const auto mention = FindMention(text, phrase);
  if (!mention) return std::nullopt;
  return SpliceMention(text, *mention, replacement);
}

bool MentionsPhrase(std::string_view text, std::string_view phrase) {
  return FindWord(text, phrase) != std::string_view::npos;
}

Thread SubstitutePronouns(const Thread& thread) {
  Thread out = thread;
  for (std::size_t n = 1; n < out.rounds.size(); ++n) {
    const auto& prior = thread.rounds[n - 1].answer_annotations;
    if (prior.empty()) continue;

    // Distinct prior objects per lowercase base name.
    std::map<std::string, std::vector<Box>> boxes_by_base;
    for (const Annotation& a : prior) {
      auto& boxes = boxes_by_base[ToLower(BaseName(a.name))];
      if (std::find(boxes.begin(), boxes.end(), a.box) == boxes.end()) {
        boxes.push_back(a.box);
      }
    }

    std::string& question = out.rounds[n].question;
    struct Hit {
      Mention mention;
      bool ambiguous;
    };
    std::vector<Hit> hits;
    std::vector<std::string> seen;
    for (const Annotation& a : prior) {
      const std::string key = ToLower(a.name);
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
      seen.push_back(key);
      const auto m = FindObjectMention(question, a.name);
      if (!m) continue;
      const bool overlaps = std::any_of(hits.begin(), hits.end(), [&](const Hit& h) {
        return m->start < h.mention.end && h.mention.start < m->end;
      });
      if (overlaps) continue;
      hits.push_back({*m, boxes_by_base[ToLower(BaseName(a.name))].size() > 1});
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
      return a.mention.start < b.mention.start;
    });
    // Splice right to left so earlier offsets stay valid.
    for (std::size_t i = hits.size(); i-- > 0;) {
      const bool use_it = i == 0 && !hits[i].ambiguous;
      question = SpliceMention(question, hits[i].mention,
                               use_it ? "it" : "the object");
    }
  }
  return out;
}

}  // namespace mrg
