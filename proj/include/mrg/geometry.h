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
#ifndef MRG_GEOMETRY_H_
#define MRG_GEOMETRY_H_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace mrg {

// Axis-aligned box in normalized image coordinates, corner form.
// Canonical boxes satisfy 0 <= x1 <= x2 <= 1 and 0 <= y1 <= y2 <= 1; use
// Convert() to build one from external data.
struct Box {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  bool is_canonical() const;

  friend bool operator==(const Box&, const Box&) = default;
};

enum class BoxFormat { kCorners, kXywh };

std::string_view ToString(BoxFormat format);
// Accepts "corners" and "xywh"; throws mrg::ParseError otherwise.
BoxFormat ParseBoxFormat(std::string_view name);

struct ImageDims {
  int width = 0;
  int height = 0;

  friend bool operator==(const ImageDims&, const ImageDims&) = default;
};

using Quad = std::array<double, 4>;

struct ConvertOptions {
  // Clamp to [0,1] instead of rejecting out-of-range coordinates. Used for
  // model predictions, which may legitimately fall outside the image.
  bool clamp = false;
};

// Builds a canonical box from a coordinate quadruple. With image_dims the
// quadruple is read as pixels and divided by the dimensions; without them
// any value above 1 is an error. xywh maps to [x, y, x+w, y+h] first.
// Throws mrg::GeometryError on negative extents, missing dims for pixel
// input, and out-of-range results (unless options.clamp).
Box Convert(const Quad& coords, BoxFormat format,
            std::optional<ImageDims> image_dims = std::nullopt,
            ConvertOptions options = {});

// Inverse of Convert for a canonical box.
Quad ToQuad(const Box& box, BoxFormat format,
            std::optional<ImageDims> image_dims = std::nullopt);

// Intersection over union. Zero when either operand has zero area, including
// two identical degenerate boxes.
double Iou(const Box& a, const Box& b);

struct ScoredBox {
  Box box;
  double score = 0.0;
  std::size_t object_id = 0;
};

// Greedy non-maximum suppression. Candidates are visited in descending
// score order (ties: lower object_id first); a candidate is dropped when its
// IoU with an already kept box is >= iou_threshold. The result is in that
// priority order. iou_threshold must lie in (0, 1].
std::vector<ScoredBox> Nms(std::span<const ScoredBox> candidates,
                           double iou_threshold);

}  // namespace mrg

#endif  // MRG_GEOMETRY_H_
