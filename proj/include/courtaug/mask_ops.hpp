// Copyright 2026 The CourtAug Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "courtaug/raster.hpp"

namespace courtaug {

// Closed polygon, one vertex per column. The closing edge is implicit.
using Polygon = Eigen::Matrix2Xd;

// Uncompressed COCO run-length encoding. Runs scan the mask column by column
// (x outer, y inner) and alternate background/foreground, starting with
// background; a mask that begins with foreground has a leading zero.
struct Rle {
  int height = 0;
  int width = 0;
  std::vector<std::uint32_t> counts;

  bool operator==(const Rle&) const = default;
};

// Pixel (row i, col j) is foreground iff its center (j + 0.5, i + 0.5) lies
// inside any polygon under the even-odd rule. Throws DegeneratePolygon for
// polygons with fewer than three vertices.
Mask rasterize_polygons(std::span<const Polygon> polygons, int width, int height);

Rle rle_encode(const Mask& mask);
// Throws LengthMismatch when the counts do not cover width * height pixels.
Mask rle_decode(const Rle& rle);
Mask rle_decode(std::span<const std::uint32_t> counts, int width, int height);

std::int64_t rle_area(const Rle& rle);
std::int64_t rle_intersection_area(const Rle& a, const Rle& b);
double rle_iou(const Rle& a, const Rle& b);
std::optional<BoxI> rle_bbox(const Rle& rle);

// The compact string form used by pycocotools ("counts" as a string). Only
// accepted on input; everything this toolkit writes uses integer counts.
std::string rle_to_string(const Rle& rle);
Rle rle_from_string(const std::string& counts, int width, int height);

inline std::int64_t mask_area(const Mask& mask) {
  return static_cast<std::int64_t>((mask != 0).count());
}

// Tightest box around the foreground; nullopt for an all-background mask.
std::optional<BoxI> mask_bbox(const Mask& mask);

template <typename Scalar>
double box_iou(const Box<Scalar>& a, const Box<Scalar>& b) {
  const double iw = std::max(0.0, static_cast<double>(std::min(a.x_max, b.x_max)) -
                                      static_cast<double>(std::max(a.x_min, b.x_min)));
  const double ih = std::max(0.0, static_cast<double>(std::min(a.y_max, b.y_max)) -
                                      static_cast<double>(std::max(a.y_min, b.y_min)));
  const double inter = iw * ih;
  const double uni = static_cast<double>(a.area()) + static_cast<double>(b.area()) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

// |a & b| / |a | b|; 0 when both are empty. Throws DimensionMismatch.
double mask_iou(const Mask& a, const Mask& b);

// `patch` translated so its top-left lands on `position`, clipped to a
// width x height canvas.
Mask place_patch(const Mask& patch, const Eigen::Vector2i& position, int width, int height);
std::int64_t visible_area(const Mask& patch, const Eigen::Vector2i& position, int width,
                          int height);

struct PasteResult {
  std::vector<Mask> masks;           // same order as the input canvas masks
  Mask pasted;                       // clipped, canvas-sized
  std::vector<std::size_t> removed;  // indices whose area dropped to zero
};

// Pastes `patch` on top of the scene: every canvas mask loses the pasted
// pixels. Throws EmptyAfterClip if nothing of the patch is visible.
PasteResult composite_paste(std::span<const Mask> canvas_masks, const Mask& patch,
                            const Eigen::Vector2i& position, int width, int height);

// In-place form used by the augmentation pipeline; returns the pasted mask
// and fills `removed`.
Mask composite_paste_inplace(std::vector<Mask>& canvas_masks, const Mask& patch,
                             const Eigen::Vector2i& position, int width, int height,
                             std::vector<std::size_t>& removed);

}  // namespace courtaug
