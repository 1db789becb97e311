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
#ifndef MRG_SIMILARITY_H_
#define MRG_SIMILARITY_H_

#include <chrono>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mrg/json.h"

namespace mrg {

struct TextPair {
  std::string candidate;
  std::string reference;
};

// Semantic similarity between a model answer and the reference answer.
// Scores lie in [0, 1]; score(s, s) == 1 for non-empty s.
class SimilarityProvider {
 public:
  virtual ~SimilarityProvider() = default;

  virtual double Score(std::string_view candidate,
                       std::string_view reference) = 0;
  // Must agree element-wise with Score.
  virtual std::vector<double> ScoreBatch(const std::vector<TextPair>& pairs);
  // Short identifier recorded in reports.
  virtual std::string Name() const = 0;
};

// Lowercases, strips punctuation, and splits on whitespace.
std::vector<std::string> LexicalTokens(std::string_view text);

// Token-multiset F1. Empty vs empty is 1, empty vs non-empty is 0.
double LexicalF1(std::string_view candidate, std::string_view reference);

class LexicalProvider : public SimilarityProvider {
 public:
  double Score(std::string_view candidate, std::string_view reference) override;
  std::string Name() const override { return "lexical"; }
};

enum class ProviderKind { kLexical, kRemote };

struct ProviderConfig {
  ProviderKind kind = ProviderKind::kLexical;
  // Base URL of the similarity service, e.g. "http://127.0.0.1:8080".
  std::string endpoint;
  std::chrono::milliseconds timeout{10000};
  int retries = 2;
  // Delay before the first retry; doubled after every failure.
  std::chrono::milliseconds backoff{200};
};

// Environment variable consulted when no endpoint is given explicitly.
inline constexpr char kEndpointEnvVar[] = "MRG_SIMILARITY_ENDPOINT";

// Client for the similarity service:
//   POST /v1/similarity  {"pairs": [{"candidate": s, "reference": s}, ...]}
//     -> {"scores": [x, ...]}
//   GET  /v1/health      -> {"status": "ok", "model": s}
class RemoteProvider : public SimilarityProvider {
 public:
  explicit RemoteProvider(ProviderConfig config);

  double Score(std::string_view candidate, std::string_view reference) override;
  // Throws mrg::TransportError once retries are exhausted and
  // mrg::ProtocolError for malformed responses, a wrong number of scores, or
  // scores outside [0, 1]. Messages name the affected pair index range.
  std::vector<double> ScoreBatch(const std::vector<TextPair>& pairs) override;
  std::string Name() const override;

  // Returns the health payload; throws mrg::TransportError when unreachable.
  Json Health();

 private:
  ProviderConfig config_;
};

// Wire helpers shared with tests and mock services.
Json SimilarityRequestToJson(const std::vector<TextPair>& pairs);
std::vector<TextPair> SimilarityRequestFromJson(const Json& body);

std::unique_ptr<SimilarityProvider> MakeProvider(const ProviderConfig& config);

}  // namespace mrg

#endif  // MRG_SIMILARITY_H_
