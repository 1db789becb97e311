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
#include "mrg/json.h"

#include "mrg/errors.h"

namespace mrg {

void ForEachJsonLine(std::istream& in,
                     const std::function<void(const Json&, std::size_t)>& fn) {
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    Json record;
    try {
      record = Json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(),
                       e.byte > 0 ? e.byte - 1 : 0, line_number);
    }
    try {
      fn(record, line_number);
    } catch (const ParseError& e) {
      if (e.line() != 0) throw;
      throw ParseError(e.message(), e.offset(), line_number);
    } catch (const GeometryError& e) {
      throw ParseError(e.what(), 0, line_number);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed record: ") + e.what(), 0,
                       line_number);
    }
  }
}

const Json& RequireField(const Json& record, const char* key) {
  if (!record.is_object() || !record.contains(key)) {
    throw ParseError(std::string("missing field '") + key + "'", 0);
  }
  return record.at(key);
}

std::string RequireString(const Json& record, const char* key) {
  const Json& value = RequireField(record, key);
  if (!value.is_string()) {
    throw ParseError(std::string("field '") + key + "' must be a string", 0);
  }
  return value.get<std::string>();
}

}  // namespace mrg
