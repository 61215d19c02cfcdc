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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "courtaug/coco_io.hpp"
#include "courtaug/inference.hpp"
#include "courtaug/mask_ops.hpp"

namespace courtaug {

struct GroundTruthObject {
  std::int64_t image_id = 0;
  std::int64_t category_id = 0;
  Rle mask;
  bool iscrowd = false;
};

struct ScoredObject {
  std::int64_t image_id = 0;
  std::int64_t category_id = 0;
  double score = 0.0;
  Rle mask;
};

struct MatchEntry {
  std::size_t det = 0;
  std::optional<std::size_t> gt;
  bool ignored = false;  // matched only a crowd region

  bool operator==(const MatchEntry&) const = default;
};

// The ten mask-IoU thresholds 0.50, 0.55, ..., 0.95, computed as k / 20.
std::array<double, 10> iou_thresholds();

// Greedy matching: detections in descending score order (ties by index) each
// take the unmatched same-image, same-category ground truth with the highest
// mask IoU >= threshold (ties by index). Entries come out in processing order.
std::vector<MatchEntry> match_at_threshold(std::span<const GroundTruthObject> gts,
                                           std::span<const ScoredObject> dets,
                                           double iou_threshold);

// 101-point interpolated AP of the pooled inputs; pass one category at a time.
// 0 when there is no non-crowd ground truth.
double ap_at_threshold(std::span<const GroundTruthObject> gts, std::span<const ScoredObject> dets,
                       double iou_threshold);

// Mean of ap_at_threshold over iou_thresholds().
double ap_range(std::span<const GroundTruthObject> gts, std::span<const ScoredObject> dets);

struct EvalResult {
  std::map<std::int64_t, double> per_category_ap;
  std::map<std::int64_t, std::array<double, 10>> per_threshold_ap;
  double map_overall = 0.0;
};

// Thresholds are averaged first, then categories with at least one non-crowd
// ground truth. Throws BrokenReference, DimensionMismatch, MalformedDocument.
EvalResult evaluate(const DatasetDoc& gt_doc, const std::vector<Detection>& results);

Json eval_to_json(const EvalResult& result);
std::string format_eval_table(const EvalResult& result, const DatasetDoc& gt_doc);

// Ground truth of a doc, masks converted to RLE in their image frames.
std::vector<GroundTruthObject> ground_truth_objects(const DatasetDoc& doc);

}  // namespace courtaug
