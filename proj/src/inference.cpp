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
#include "courtaug/inference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <span>

#include "courtaug/error.hpp"

namespace courtaug {

namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorKind::MalformedDocument, what);
}

}  // namespace

std::vector<Detection> parse_results(std::string_view raw) {
  Json root;
  try {
    root = Json::parse(raw.begin(), raw.end());
  } catch (const Json::parse_error& e) {
    malformed(std::string("results file is not JSON: ") + e.what());
  }
  return parse_results(root);
}

std::vector<Detection> parse_results(const Json& root) {
  if (!root.is_array()) malformed("results must be a JSON list");
  std::vector<Detection> dets;
  dets.reserve(root.size());
  for (std::size_t k = 0; k < root.size(); ++k) {
    const Json& j = root[k];
    const std::string where = "results[" + std::to_string(k) + "]";
    if (!j.is_object()) malformed(where + " must be an object");
    Detection d;
    auto get_int = [&](const char* key) {
      auto it = j.find(key);
      if (it == j.end() || !it->is_number_integer()) malformed(where + ": bad \"" + key + "\"");
      return it->get<std::int64_t>();
    };
    d.image_id = get_int("image_id");
    d.category_id = get_int("category_id");
    auto score = j.find("score");
    if (score == j.end() || !score->is_number()) malformed(where + ": bad \"score\"");
    d.score = score->get<double>();
    if (!(d.score >= 0.0 && d.score <= 1.0)) malformed(where + ": score outside [0, 1]");
    auto bbox = j.find("bbox");
    if (bbox != j.end()) {
      if (!bbox->is_array() || bbox->size() != 4) malformed(where + ": bbox must have 4 numbers");
      for (int i = 0; i < 4; ++i) {
        if (!(*bbox)[i].is_number()) malformed(where + ": bbox must have 4 numbers");
        d.bbox[i] = (*bbox)[i].get<double>();
      }
      if (d.bbox[2] < 0 || d.bbox[3] < 0) {
        throw Error(ErrorKind::GeometryError, where + ": bbox has negative size");
      }
    }
    auto seg = j.find("segmentation");
    if (seg != j.end()) {
      if (!seg->is_object() || !seg->contains("size")) {
        malformed(where + ": segmentation must be an RLE object with \"size\"");
      }
      d.mask = std::get<Rle>(segmentation_from_json(*seg, 0, 0));
      if (bbox == j.end()) {
        if (auto b = rle_bbox(*d.mask)) {
          d.bbox = {double(b->x_min), double(b->y_min), double(b->width()), double(b->height())};
        }
      }
    } else if (bbox == j.end()) {
      malformed(where + ": needs a bbox or a segmentation");
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto& key = it.key();
      if (key != "image_id" && key != "category_id" && key != "score" && key != "bbox" &&
          key != "segmentation") {
        d.extra[key] = it.value();
      }
    }
    dets.push_back(std::move(d));
  }
  return dets;
}

Json results_to_json(const std::vector<Detection>& dets) {
  Json out = Json::array();
  for (const auto& d : dets) {
    Json j = d.extra;
    j["image_id"] = d.image_id;
    j["category_id"] = d.category_id;
    j["score"] = d.score;
    j["bbox"] = d.bbox;
    if (d.mask) j["segmentation"] = segmentation_to_json(*d.mask);
    out.push_back(std::move(j));
  }
  return out;
}

std::string serialize_results(const std::vector<Detection>& dets) {
  return results_to_json(dets).dump() + "\n";
}

int crop_offset(int height, double fraction) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "crop fraction must lie in [0, 1)");
  }
  // The epsilon absorbs representation error, e.g. 0.2 * 1440 stays 288.
  const int offset = static_cast<int>(std::floor(height * fraction + 1e-9));
  return std::clamp(offset, 0, std::max(0, height - 1));
}

std::pair<RgbImage, CropTransform> crop_top(const RgbImage& image, double fraction) {
  CropTransform t;
  t.original_width = image.width();
  t.original_height = image.height();
  t.fraction = fraction;
  t.top_offset = crop_offset(image.height(), fraction);
  RgbImage out;
  for (int c = 0; c < 3; ++c) out[c] = image[c].bottomRows(t.cropped_height());
  return {std::move(out), t};
}

std::vector<Detection> uncrop_detections(const std::vector<Detection>& dets,
                                         const CropTransform& t) {
  std::vector<Detection> out;
  out.reserve(dets.size());
  const double W = t.original_width, H = t.original_height;
  for (const auto& d : dets) {
    Detection u = d;
    if (d.mask) {
      if (d.mask->width != t.original_width || d.mask->height != t.cropped_height()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "detection mask is " + std::to_string(d.mask->height) + "x" +
                        std::to_string(d.mask->width) + ", cropped frame is " +
                        std::to_string(t.cropped_height()) + "x" +
                        std::to_string(t.original_width));
      }
      if (t.top_offset == 0) {
        u.mask = d.mask;
      } else {
        Mask full = Mask::Zero(t.original_height, t.original_width);
        full.bottomRows(t.cropped_height()) = rle_decode(*d.mask);
        u.mask = rle_encode(full);
      }
    }
    const double x0 = std::clamp(d.bbox[0], 0.0, W);
    const double y0 = std::clamp(d.bbox[1] + t.top_offset, 0.0, H);
    const double x1 = std::clamp(d.bbox[0] + d.bbox[2], 0.0, W);
    const double y1 = std::clamp(d.bbox[1] + t.top_offset + d.bbox[3], 0.0, H);
    u.bbox = {x0, y0, x1 - x0, y1 - y0};
    out.push_back(std::move(u));
  }
  return out;
}

Json transforms_to_json(const std::vector<CropTransform>& transforms) {
  Json arr = Json::array();
  for (const auto& t : transforms) {
    arr.push_back({{"image_id", t.image_id},
                   {"file_name", t.file_name},
                   {"original_width", t.original_width},
                   {"original_height", t.original_height},
                   {"top_offset", t.top_offset},
                   {"fraction", t.fraction}});
  }
  return Json{{"transforms", arr}};
}

std::vector<CropTransform> transforms_from_json(const Json& j) {
  std::vector<CropTransform> out;
  try {
    for (const Json& e : j.at("transforms")) {
      CropTransform t;
      t.image_id = e.at("image_id").get<std::int64_t>();
      t.file_name = e.value("file_name", std::string{});
      t.original_width = e.at("original_width").get<int>();
      t.original_height = e.at("original_height").get<int>();
      t.top_offset = e.at("top_offset").get<int>();
      t.fraction = e.at("fraction").get<double>();
      if (t.top_offset < 0 || t.top_offset >= t.original_height || t.original_width < 1) {
        malformed("crop transform for image " + std::to_string(t.image_id) + " is inconsistent");
      }
      out.push_back(std::move(t));
    }
  } catch (const Json::exception& e) {
    malformed(std::string("bad crop transforms file: ") + e.what());
  }
  return out;
}

std::optional<GateMode> parse_gate_mode(std::string_view s) {
  if (s == "both") return GateMode::Both;
  if (s == "either") return GateMode::Either;
  return std::nullopt;
}

bool ball_size_gate(const Detection& det, const SizeGate& gate) {
  const double w = det.bbox[2], h = det.bbox[3];
  if (gate.mode == GateMode::Both) {
    const bool too_small = w < gate.min_dim && h < gate.min_dim;
    const bool too_large = w > gate.max_dim && h > gate.max_dim;
    return !(too_small || too_large);
  }
  const bool too_small = w < gate.min_dim || h < gate.min_dim;
  const bool too_large = w > gate.max_dim || h > gate.max_dim;
  return !(too_small || too_large);
}

namespace {

// Marks in `keep` which of the detections listed in `subset` survive the
// filter; the subset is treated as one image.
void mark_survivors(const std::vector<Detection>& dets, std::span<const std::size_t> subset,
                    const FilterOptions& options, std::vector<bool>& keep) {
  std::vector<std::size_t> balls;
  for (std::size_t k : subset) {
    if (dets[k].category_id != options.ball_category) {
      keep[k] = true;
      continue;
    }
    if (options.gate_before_selection && !ball_size_gate(dets[k], options.gate)) continue;
    balls.push_back(k);
  }
  if (balls.empty()) return;
  std::size_t anchor = balls.front();
  for (std::size_t k : balls)
    if (dets[k].score > dets[anchor].score) anchor = k;
  const BoxD anchor_box = dets[anchor].box();
  for (std::size_t k : balls) {
    bool kept = k == anchor || box_iou(dets[k].box(), anchor_box) > 0.0;
    if (!options.gate_before_selection) kept = kept && ball_size_gate(dets[k], options.gate);
    keep[k] = kept;
  }
}

std::vector<Detection> select(const std::vector<Detection>& dets, const std::vector<bool>& keep) {
  std::vector<Detection> out;
  for (std::size_t k = 0; k < dets.size(); ++k)
    if (keep[k]) out.push_back(dets[k]);
  return out;
}

}  // namespace

std::vector<Detection> max_score_filter(const std::vector<Detection>& dets,
                                        const FilterOptions& options) {
  std::vector<std::size_t> all(dets.size());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  std::vector<bool> keep(dets.size(), false);
  mark_survivors(dets, all, options, keep);
  return select(dets, keep);
}

std::vector<Detection> max_score_filter(const std::vector<Detection>& dets,
                                        std::int64_t ball_category) {
  FilterOptions options;
  options.ball_category = ball_category;
  return max_score_filter(dets, options);
}

std::vector<Detection> filter_results(const std::vector<Detection>& dets,
                                      const FilterOptions& options) {
  std::map<std::int64_t, std::vector<std::size_t>> by_image;
  for (std::size_t k = 0; k < dets.size(); ++k) by_image[dets[k].image_id].push_back(k);
  std::vector<bool> keep(dets.size(), false);
  for (const auto& [image_id, idx] : by_image) mark_survivors(dets, idx, options, keep);
  return select(dets, keep);
}

std::vector<Detection> run_tsip(const RgbImage& image, const DetectionProvider& provider,
                                double fraction, const FilterOptions& options) {
  auto [cropped, transform] = crop_top(image, fraction);
  const auto dets = provider(cropped);
  return max_score_filter(uncrop_detections(dets, transform), options);
}

}  // namespace courtaug
