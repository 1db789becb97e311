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
#ifndef MRG_JSON_H_
#define MRG_JSON_H_

#include <functional>
#include <istream>
#include <string>

#include "json.hpp"

namespace mrg {

// Object keys keep insertion order so emitted files read naturally.
using Json = nlohmann::ordered_json;

// Calls fn(record, line_number) for every non-blank line of a JSON-lines
// stream. Syntax errors become mrg::ParseError with the line number; any
// mrg::ParseError thrown by fn without a line number is rethrown with it.
void ForEachJsonLine(std::istream& in,
                     const std::function<void(const Json&, std::size_t)>& fn);

// Typed field access that reports the missing or mistyped key.
const Json& RequireField(const Json& record, const char* key);
std::string RequireString(const Json& record, const char* key);

}  // namespace mrg

#endif  // MRG_JSON_H_
