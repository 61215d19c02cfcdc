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

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "courtaug/coco_io.hpp"
#include "courtaug/mask_ops.hpp"
#include "courtaug/raster.hpp"

namespace courtaug {

// One model output in COCO results form.
struct Detection {
  std::int64_t image_id = 0;
  std::int64_t category_id = 0;
  double score = 0.0;
  std::array<double, 4> bbox{};  // x, y, w, h
  std::optional<Rle> mask;
  Json extra = Json::object();

  BoxD box() const { return BoxD::from_xywh(bbox[0], bbox[1], bbox[2], bbox[3]); }
  bool operator==(const Detection&) const = default;
};

// Results file: a JSON list of {image_id, category_id, score, bbox, segmentation?}.
std::vector<Detection> parse_results(std::string_view raw);
std::vector<Detection> parse_results(const Json& root);
inline std::vector<Detection> parse_results(const std::string& raw) { return parse_results(std::string_view(raw)); }
inline std::vector<Detection> parse_results(const char* raw) { return parse_results(std::string_view(raw)); }
std::string serialize_results(const std::vector<Detection>& dets);
Json results_to_json(const std::vector<Detection>& dets);

struct CropTransform {
  std::int64_t image_id = 0;
  std::string file_name;
  int original_width = 0;
  int original_height = 0;
  int top_offset = 0;
  double fraction = 0.2;

  int cropped_height() const { return original_height - top_offset; }
  bool operator==(const CropTransform&) const = default;
};

// Rows removed from the top of an image of height `height`:
// floor(height * fraction), never the whole image.
int crop_offset(int height, double fraction);

// Drops the top floor(h * fraction) rows. Throws InvalidArgument unless
// 0 <= fraction < 1.
std::pair<RgbImage, CropTransform> crop_top(const RgbImage& image, double fraction);

// Moves detections from the cropped frame back to the original one. Throws
// DimensionMismatch if a mask is not in the cropped frame.
std::vector<Detection> uncrop_detections(const std::vector<Detection>& dets,
                                         const CropTransform& transform);

Json transforms_to_json(const std::vector<CropTransform>& transforms);
std::vector<CropTransform> transforms_from_json(const Json& j);

enum class GateMode {
  Both,    // drop when both sides are too small, or both too large
  Either,  // drop when any side is out of range
};

std::optional<GateMode> parse_gate_mode(std::string_view s);

struct SizeGate {
  double min_dim = 10.0;
  double max_dim = 40.0;
  GateMode mode = GateMode::Both;
};

// True if the ball detection is kept.
bool ball_size_gate(const Detection& det, const SizeGate& gate = {});

struct FilterOptions {
  std::int64_t ball_category = 0;
  SizeGate gate;
  bool gate_before_selection = true;
};

// Single-image max-score ball filter. Non-ball detections pass untouched;
// the top-scoring (first on ties) gated ball is kept along with every other
// gated ball whose box overlaps it (IoU > 0). Output keeps input order.
std::vector<Detection> max_score_filter(const std::vector<Detection>& dets,
                                        const FilterOptions& options);
std::vector<Detection> max_score_filter(const std::vector<Detection>& dets,
                                        std::int64_t ball_category);

// Applies max_score_filter to each image's detections independently.
std::vector<Detection> filter_results(const std::vector<Detection>& dets,
                                      const FilterOptions& options);

using DetectionProvider = std::function<std::vector<Detection>(const RgbImage&)>;

// crop_top -> provider -> uncrop_detections -> max_score_filter.
std::vector<Detection> run_tsip(const RgbImage& image, const DetectionProvider& provider,
                                double fraction, const FilterOptions& options);

}  // namespace courtaug
