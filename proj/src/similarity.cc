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
#include "mrg/similarity.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <thread>

#include "httplib.h"
#include "mrg/errors.h"

namespace mrg {
namespace {

// Scores this far outside [0, 1] are rounding noise and get clamped.
constexpr double kClampSlack = 1e-6;

std::string RangeLabel(std::size_t begin, std::size_t end) {
  if (end <= begin) return "pairs [none]";
  return "pairs [" + std::to_string(begin) + ", " + std::to_string(end - 1) +
         "]";
}

}  // namespace

std::vector<double> SimilarityProvider::ScoreBatch(
    const std::vector<TextPair>& pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const TextPair& p : pairs) out.push_back(Score(p.candidate, p.reference));
  return out;
}

std::vector<std::string> LexicalTokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else if (!std::ispunct(c)) {
      current += static_cast<char>(std::tolower(c));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

double LexicalF1(std::string_view candidate, std::string_view reference) {
  const auto cand = LexicalTokens(candidate);
  const auto ref = LexicalTokens(reference);
  if (cand.empty() && ref.empty()) return 1.0;
  if (cand.empty() || ref.empty()) return 0.0;

  std::map<std::string, std::size_t> ref_counts;
  for (const auto& t : ref) ++ref_counts[t];
  std::size_t overlap = 0;
  for (const auto& t : cand) {
    auto it = ref_counts.find(t);
    if (it != ref_counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  const double precision = static_cast<double>(overlap) / cand.size();
  const double recall = static_cast<double>(overlap) / ref.size();
  return 2.0 * precision * recall / (precision + recall);
}

double LexicalProvider::Score(std::string_view candidate,
                              std::string_view reference) {
  return LexicalF1(candidate, reference);
}

Json SimilarityRequestToJson(const std::vector<TextPair>& pairs) {
  Json list = Json::array();
  for (const TextPair& p : pairs) {
    list.push_back(Json{{"candidate", p.candidate}, {"reference", p.reference}});
  }
  return Json{{"pairs", std::move(list)}};
}

std::vector<TextPair> SimilarityRequestFromJson(const Json& body) {
  std::vector<TextPair> pairs;
  for (const Json& p : RequireField(body, "pairs")) {
    pairs.push_back({RequireString(p, "candidate"), RequireString(p, "reference")});
  }
  return pairs;
}

RemoteProvider::RemoteProvider(ProviderConfig config)
    : config_(std::move(config)) {
  if (config_.endpoint.empty()) {
    throw StructuralError("remote similarity provider needs an endpoint");
  }
  if (config_.timeout.count() <= 0) {
    throw StructuralError("provider timeout must be positive");
  }
  if (config_.retries < 0) {
    throw StructuralError("provider retries must be non-negative");
  }
}

std::string RemoteProvider::Name() const { return "remote:" + config_.endpoint; }

double RemoteProvider::Score(std::string_view candidate,
                             std::string_view reference) {
  return ScoreBatch({{std::string(candidate), std::string(reference)}}).at(0);
}

std::vector<double> RemoteProvider::ScoreBatch(
    const std::vector<TextPair>& pairs) {
  if (pairs.empty()) return {};
  const std::string range = RangeLabel(0, pairs.size());
  const std::string body = SimilarityRequestToJson(pairs).dump();

  httplib::Client client(config_.endpoint);
  const auto seconds = config_.timeout.count() / 1000;
  const auto micros = (config_.timeout.count() % 1000) * 1000;
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);

  httplib::Result result;
  auto delay = config_.backoff;
  std::string last_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    result = client.Post("/v1/similarity", body, "application/json");
    if (!result) {
      last_error = httplib::to_string(result.error());
      continue;
    }
    // Server-side failures are retried; client errors are not.
    if (result->status >= 500) {
      last_error = "HTTP " + std::to_string(result->status);
      continue;
    }
    break;
  }
  if (!result || result->status >= 500) {
    throw TransportError("similarity service unreachable for " + range +
                         " after " + std::to_string(config_.retries + 1) +
                         " attempts: " + last_error);
  }
  if (result->status != 200) {
    throw ProtocolError("similarity service returned HTTP " +
                        std::to_string(result->status) + " for " + range);
  }

  Json response;
  try {
    response = Json::parse(result->body);
  } catch (const nlohmann::json::exception&) {
    throw ProtocolError("similarity response is not JSON for " + range);
  }
  if (!response.is_object() || !response.contains("scores") ||
      !response.at("scores").is_array()) {
    throw ProtocolError("similarity response lacks a 'scores' array for " +
                        range);
  }
  const Json& scores = response.at("scores");
  if (scores.size() != pairs.size()) {
    const std::size_t got = scores.size();
    throw ProtocolError(
        "similarity service returned " + std::to_string(got) + " scores for " +
        std::to_string(pairs.size()) + " pairs; missing " +
        RangeLabel(std::min(got, pairs.size()), pairs.size()));
  }
  std::vector<double> out;
  out.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!scores[i].is_number()) {
      throw ProtocolError("non-numeric score for " + RangeLabel(i, i + 1));
    }
    const double s = scores[i].get<double>();
    if (!std::isfinite(s) || s < -kClampSlack || s > 1.0 + kClampSlack) {
      throw ProtocolError("score " + std::to_string(s) + " out of range for " +
                          RangeLabel(i, i + 1));
    }
    out.push_back(std::clamp(s, 0.0, 1.0));
  }
  return out;
}

Json RemoteProvider::Health() {
  httplib::Client client(config_.endpoint);
  const auto seconds = config_.timeout.count() / 1000;
  const auto micros = (config_.timeout.count() % 1000) * 1000;
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  auto result = client.Get("/v1/health");
  if (!result) {
    throw TransportError("similarity service unreachable: " +
                         httplib::to_string(result.error()));
  }
  try {
    return Json::parse(result->body);
  } catch (const nlohmann::json::exception&) {
    throw ProtocolError("health response is not JSON");
  }
}

std::unique_ptr<SimilarityProvider> MakeProvider(const ProviderConfig& config) {
  if (config.kind == ProviderKind::kRemote) {
    return std::make_unique<RemoteProvider>(config);
  }
  return std::make_unique<LexicalProvider>();
}

}  // namespace mrg
