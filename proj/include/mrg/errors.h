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
#ifndef MRG_ERRORS_H_
#define MRG_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mrg {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input (annotation grammar, JSON records, box quadruples).
// offset is a character offset within the parsed line; line is 1-based
// when the error comes from a multi-line file, 0 otherwise.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset, std::size_t line = 0)
      : Error(Format(message, offset, line)),
        message_(message),
        offset_(offset),
        line_(line) {}

  // The message without location information.
  const std::string& message() const { return message_; }
  std::size_t offset() const { return offset_; }
  std::size_t line() const { return line_; }

 private:
  static std::string Format(const std::string& message, std::size_t offset,
                            std::size_t line) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    out += message + " (at offset " + std::to_string(offset) + ")";
    return out;
  }

  std::string message_;
  std::size_t offset_;
  std::size_t line_;
};

// Invalid geometry: negative extents, out-of-range coordinates.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Inputs that are individually well-formed but inconsistent with each other
// (prediction/corpus misalignment, unknown sources, infeasible splits).
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Similarity provider could not be reached.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Similarity provider answered with something that violates the contract.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace mrg

#endif  // MRG_ERRORS_H_
