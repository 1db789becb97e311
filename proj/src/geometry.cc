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
#include "mrg/geometry.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mrg/errors.h"

namespace mrg {

bool Box::is_canonical() const {
  return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) &&
         std::isfinite(y2) && 0.0 <= x1 && x1 <= x2 && x2 <= 1.0 &&
         0.0 <= y1 && y1 <= y2 && y2 <= 1.0;
}

std::string_view ToString(BoxFormat format) {
  return format == BoxFormat::kCorners ? "corners" : "xywh";
}

BoxFormat ParseBoxFormat(std::string_view name) {
  if (name == "corners") return BoxFormat::kCorners;
  if (name == "xywh") return BoxFormat::kXywh;
  throw ParseError("unknown box format '" + std::string(name) + "'", 0);
}

Box Convert(const Quad& coords, BoxFormat format,
            std::optional<ImageDims> image_dims, ConvertOptions options) {
  for (double v : coords) {
    if (!std::isfinite(v)) throw GeometryError("non-finite coordinate");
  }
  Quad corners = coords;
  if (format == BoxFormat::kXywh) {
    if (coords[2] < 0.0 || coords[3] < 0.0) {
      throw GeometryError("negative box extent");
    }
    corners[2] = coords[0] + coords[2];
    corners[3] = coords[1] + coords[3];
  }
  if (corners[2] < corners[0] || corners[3] < corners[1]) {
    throw GeometryError("negative box extent");
  }

  if (image_dims) {
    if (image_dims->width <= 0 || image_dims->height <= 0) {
      throw GeometryError("image dimensions must be positive");
    }
    corners[0] /= image_dims->width;
    corners[2] /= image_dims->width;
    corners[1] /= image_dims->height;
    corners[3] /= image_dims->height;
  } else if (!options.clamp &&
             std::any_of(corners.begin(), corners.end(),
                         [](double v) { return v > 1.0; })) {
    throw GeometryError(
        "pixel-valued coordinates require image dimensions");
  }

  Box box{corners[0], corners[1], corners[2], corners[3]};
  if (options.clamp) {
    auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
    box = {clamp01(box.x1), clamp01(box.y1), clamp01(box.x2), clamp01(box.y2)};
  }
  if (!box.is_canonical()) {
    throw GeometryError("box coordinates out of range after normalization");
  }
  return box;
}

Quad ToQuad(const Box& box, BoxFormat format,
            std::optional<ImageDims> image_dims) {
  Quad q{box.x1, box.y1, box.x2, box.y2};
  if (image_dims) {
    q[0] *= image_dims->width;
    q[2] *= image_dims->width;
    q[1] *= image_dims->height;
    q[3] *= image_dims->height;
  }
  if (format == BoxFormat::kXywh) {
    q[2] -= q[0];
    q[3] -= q[1];
  }
  return q;
}

double Iou(const Box& a, const Box& b) {
  const double area_a = a.area();
  const double area_b = b.area();
  if (area_a <= 0.0 || area_b <= 0.0) return 0.0;
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return std::clamp(inter / (area_a + area_b - inter), 0.0, 1.0);
}

std::vector<ScoredBox> Nms(std::span<const ScoredBox> candidates,
                           double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw GeometryError("NMS threshold must lie in (0, 1]");
  }
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    const auto& a = candidates[i];
    const auto& b = candidates[j];
    if (a.score != b.score) return a.score > b.score;
    return a.object_id < b.object_id;
  });

  std::vector<ScoredBox> kept;
  for (std::size_t idx : order) {
    const auto& candidate = candidates[idx];
    const bool suppressed =
        std::any_of(kept.begin(), kept.end(), [&](const ScoredBox& k) {
          return Iou(k.box, candidate.box) >= iou_threshold;
        });
    if (!suppressed) kept.push_back(candidate);
  }
  return kept;
}

}  // namespace mrg
