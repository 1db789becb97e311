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
#include <numeric>
#include <set>

#include "mrg/dataset.h"
#include "mrg/errors.h"

namespace mrg {

Split SplitDataset(const std::vector<Thread>& threads, const Holdout& holdout,
                   std::uint64_t seed) {
  std::vector<bool> is_test(threads.size(), false);
  for (const auto& [subset, count] : holdout.counts) {
    if (count == 0) continue;
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < threads.size(); ++i) {
      if (threads[i].subset == subset) members.push_back(i);
    }
    if (members.size() < count) {
      throw StructuralError("subset " + std::string(ToString(subset)) +
                            " has " + std::to_string(members.size()) +
                            " threads, cannot hold out " +
                            std::to_string(count));
    }
    Rng rng(DeriveSeed(seed, "split/" + std::string(ToString(subset))));
    Shuffle(members, rng);
    for (std::size_t k = 0; k < count; ++k) is_test[members[k]] = true;
  }

  std::set<std::string> test_images;
  for (std::size_t i = 0; i < threads.size(); ++i) {
    if (is_test[i]) test_images.insert(threads[i].image_id);
  }

  Split split;
  for (std::size_t i = 0; i < threads.size(); ++i) {
    if (is_test[i]) {
      split.test.push_back(threads[i]);
    } else if (test_images.count(threads[i].image_id)) {
      split.quarantine.push_back(threads[i]);
    } else {
      split.train.push_back(threads[i]);
    }
  }
  if (split.train.empty() && !split.quarantine.empty()) {
    throw StructuralError(
        "every training candidate shares an image with the test split");
  }
  return split;
}

std::string_view ToString(Group group) {
  switch (group) {
    case Group::kA:
      return "A";
    case Group::kB:
      return "B";
    case Group::kC:
      return "C";
  }
  return "A";
}

Group ParseGroup(std::string_view name) {
  if (name == "A" || name == "a") return Group::kA;
  if (name == "B" || name == "b") return Group::kB;
  if (name == "C" || name == "c") return Group::kC;
  throw ParseError("unknown group '" + std::string(name) + "'", 0);
}

std::vector<SourceRatio> DefaultRatios(Group group) {
  switch (group) {
    case Group::kA:
      return {{"MRG", 3}, {"LC", 2}, {"LLaVA-Instruct-150K", 5}};
    case Group::kB:
      return {{"MRG", 2},     {"LC", 3},        {"REF", 5},
              {"RefCOCO", 1}, {"RefCOCO+", 1},  {"RefCOCOg", 1},
              {"Flickr30K", 1}, {"VisualGenome", 1}};
    case Group::kC:
      return {{"MRG", 3},      {"LC", 1},       {"GND", 2},
              {"COCO", 2},     {"RefCOCO", 1},  {"RefCOCO+", 1},
              {"RefCOCOg", 1}};
  }
  return {};
}

namespace {

bool IsPlaceholderName(const std::string& name) {
  return name == "it" || name == "region" || name == "this region" ||
         name == "the region";
}

}  // namespace

std::optional<Thread> ApplyGroupView(const Thread& thread, Group group,
                                     Rng& rng) {
  Thread out = thread;
  switch (group) {
    case Group::kA:
      for (Round& r : out.rounds) {
        r.question_annotations.clear();
        r.answer_annotations.clear();
        r.grounding_required = false;
      }
      return out;
    case Group::kB: {
      static const char* const kReferents[] = {"it", "the region",
                                               "this region"};
      bool any = false;
      for (Round& r : out.rounds) {
        r.answer_annotations.clear();
        r.grounding_required = false;
        for (const Annotation& a : r.question_annotations) {
          any = true;
          if (IsPlaceholderName(a.name)) continue;
          const char* referent = kReferents[UniformIndex(rng, 3)];
          auto replaced = ReplaceFirstMention(r.question, a.name, referent);
          if (!replaced && BaseName(a.name) != a.name) {
            replaced = ReplaceFirstMention(r.question, BaseName(a.name), referent);
          }
          if (replaced) r.question = std::move(*replaced);
        }
      }
      if (!any) return std::nullopt;
      return out;
    }
    case Group::kC: {
      const bool any = std::any_of(
          out.rounds.begin(), out.rounds.end(),
          [](const Round& r) { return !r.answer_annotations.empty(); });
      if (!any) return std::nullopt;
      return out;
    }
  }
  return std::nullopt;
}

GroupMixer::GroupMixer(
    const std::map<std::string, std::vector<Thread>>& sources, Group group,
    std::vector<SourceRatio> ratios, std::uint64_t seed)
    : ratios_(std::move(ratios)), rng_(DeriveSeed(seed, "mix")) {
  if (ratios_.empty()) throw StructuralError("no mixture sources given");
  for (const SourceRatio& ratio : ratios_) {
    if (ratio.weight == 0) {
      throw StructuralError("zero ratio for source '" + ratio.source + "'");
    }
    const auto it = sources.find(ratio.source);
    if (it == sources.end()) {
      throw StructuralError("unknown source '" + ratio.source + "'");
    }
    Rng view_rng(DeriveSeed(seed, "view/" + ratio.source));
    Pool pool;
    for (const Thread& t : it->second) {
      if (auto viewed = ApplyGroupView(t, group, view_rng)) {
        pool.threads.push_back(std::move(*viewed));
      }
    }
    if (pool.threads.empty()) {
      throw StructuralError("source '" + ratio.source +
                            "' has no threads for group " +
                            std::string(ToString(group)));
    }
    pool.order.resize(pool.threads.size());
    std::iota(pool.order.begin(), pool.order.end(), 0);
    Shuffle(pool.order, rng_);
    total_weight_ += ratio.weight;
    pools_.push_back(std::move(pool));
  }
}

MixedSample GroupMixer::Next() {
  std::uint64_t draw = UniformIndex(rng_, total_weight_);
  std::size_t source = 0;
  while (draw >= ratios_[source].weight) {
    draw -= ratios_[source].weight;
    ++source;
  }
  Pool& pool = pools_[source];
  if (pool.cursor == pool.order.size()) {
    Shuffle(pool.order, rng_);
    pool.cursor = 0;
  }
  return {source, pool.threads[pool.order[pool.cursor++]]};
}

std::vector<MixedSample> GroupMixer::Take(std::size_t count) {
  std::vector<MixedSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(Next());
  return out;
}

Statistics ComputeStatistics(const std::vector<Thread>& threads) {
  Statistics stats;
  for (const Thread& t : threads) {
    SubsetStats& s = stats.per_subset[t.subset];
    ++s.threads;
    s.qa_pairs += t.rounds.size();
    ++stats.total.threads;
    stats.total.qa_pairs += t.rounds.size();
  }
  return stats;
}

}  // namespace mrg
