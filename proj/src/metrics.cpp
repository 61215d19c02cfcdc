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
#include "courtaug/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "courtaug/error.hpp"

namespace courtaug {

std::array<double, 10> iou_thresholds() {
  std::array<double, 10> t{};
  for (int k = 0; k < 10; ++k) t[k] = (10 + k) / 20.0;
  return t;
}

namespace {

std::vector<std::size_t> score_order(std::span<const ScoredObject> dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score;
  });
  return order;
}

}  // namespace

std::vector<MatchEntry> match_at_threshold(std::span<const GroundTruthObject> gts,
                                           std::span<const ScoredObject> dets,
                                           double iou_threshold) {
  std::unordered_map<std::int64_t, std::vector<std::size_t>> gts_by_image;
  for (std::size_t g = 0; g < gts.size(); ++g) gts_by_image[gts[g].image_id].push_back(g);

  std::vector<bool> taken(gts.size(), false);
  std::vector<MatchEntry> out;
  out.reserve(dets.size());
  for (std::size_t d : score_order(dets)) {
    const ScoredObject& det = dets[d];
    MatchEntry entry{d, std::nullopt, false};
    std::optional<std::size_t> best;
    double best_iou = iou_threshold;
    bool hits_crowd = false;
    auto it = gts_by_image.find(det.image_id);
    if (it != gts_by_image.end()) {
      for (std::size_t g : it->second) {
        const GroundTruthObject& gt = gts[g];
        if (gt.category_id != det.category_id) continue;
        if (gt.mask.width != det.mask.width || gt.mask.height != det.mask.height) {
          throw Error(ErrorKind::DimensionMismatch, "detection and ground truth frames differ");
        }
        if (!gt.iscrowd && taken[g]) continue;
        const double iou = rle_iou(gt.mask, det.mask);
        if (iou < iou_threshold) continue;
        if (gt.iscrowd) {
          hits_crowd = true;
          continue;
        }
        if (!best || iou > best_iou) {
          best = g;
          best_iou = iou;
        }
      }
    }
    if (best) {
      taken[*best] = true;
      entry.gt = best;
    } else {
      entry.ignored = hits_crowd;
    }
    out.push_back(entry);
  }
  return out;
}

double ap_at_threshold(std::span<const GroundTruthObject> gts, std::span<const ScoredObject> dets,
                       double iou_threshold) {
  const auto npos = std::count_if(gts.begin(), gts.end(),
                                  [](const GroundTruthObject& g) { return !g.iscrowd; });
  if (npos == 0) return 0.0;
  const auto matches = match_at_threshold(gts, dets, iou_threshold);
  std::vector<double> precision, recall;
  double tp = 0, fp = 0;
  for (const auto& m : matches) {
    if (m.ignored) continue;
    (m.gt ? tp : fp) += 1.0;
    precision.push_back(tp / (tp + fp));
    recall.push_back(tp / static_cast<double>(npos));
  }
  for (std::size_t i = precision.size(); i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double sum = 0.0;
  for (int r = 0; r <= 100; ++r) {
    const double level = r / 100.0;
    const auto it = std::lower_bound(recall.begin(), recall.end(), level);
    if (it != recall.end()) sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  return sum / 101.0;
}

double ap_range(std::span<const GroundTruthObject> gts, std::span<const ScoredObject> dets) {
  double sum = 0.0;
  for (double t : iou_thresholds()) sum += ap_at_threshold(gts, dets, t);
  return sum / 10.0;
}

std::vector<GroundTruthObject> ground_truth_objects(const DatasetDoc& doc) {
  std::unordered_map<std::int64_t, const ImageRecord*> images;
  for (const auto& im : doc.images) images.emplace(im.id, &im);
  std::vector<GroundTruthObject> out;
  out.reserve(doc.annotations.size());
  for (const auto& a : doc.annotations) {
    auto it = images.find(a.image_id);
    if (it == images.end()) {
      throw Error(ErrorKind::BrokenReference,
                  "annotation " + std::to_string(a.id) + " references a missing image");
    }
    GroundTruthObject g;
    g.image_id = a.image_id;
    g.category_id = a.category_id;
    g.iscrowd = a.iscrowd;
    if (const auto* rle = std::get_if<Rle>(&a.segmentation)) {
      g.mask = *rle;
    } else {
      g.mask = rle_encode(decode_segmentation(a.segmentation, it->second->width,
                                              it->second->height));
    }
    out.push_back(std::move(g));
  }
  return out;
}

EvalResult evaluate(const DatasetDoc& gt_doc, const std::vector<Detection>& results) {
  std::unordered_map<std::int64_t, const ImageRecord*> images;
  for (const auto& im : gt_doc.images) images.emplace(im.id, &im);

  std::map<std::int64_t, std::vector<ScoredObject>> dets_by_cat;
  for (std::size_t k = 0; k < results.size(); ++k) {
    const Detection& d = results[k];
    auto it = images.find(d.image_id);
    if (it == images.end()) {
      throw Error(ErrorKind::BrokenReference, "result " + std::to_string(k) + ": image_id " +
                                                  std::to_string(d.image_id) + " not in ground truth");
    }
    if (!gt_doc.find_category(d.category_id)) {
      throw Error(ErrorKind::BrokenReference, "result " + std::to_string(k) + ": category_id " +
                                                  std::to_string(d.category_id) + " not in ground truth");
    }
    if (!d.mask) {
      throw Error(ErrorKind::MalformedDocument,
                  "result " + std::to_string(k) + " has no segmentation");
    }
    if (d.mask->width != it->second->width || d.mask->height != it->second->height) {
      throw Error(ErrorKind::DimensionMismatch,
                  "result " + std::to_string(k) + ": mask size differs from its image");
    }
    dets_by_cat[d.category_id].push_back({d.image_id, d.category_id, d.score, *d.mask});
  }

  std::map<std::int64_t, std::vector<GroundTruthObject>> gts_by_cat;
  for (auto& g : ground_truth_objects(gt_doc)) gts_by_cat[g.category_id].push_back(std::move(g));

  EvalResult result;
  const auto thresholds = iou_thresholds();
  for (const auto& c : gt_doc.categories) {
    const auto& gts = gts_by_cat[c.id];
    const bool has_gt = std::any_of(gts.begin(), gts.end(),
                                    [](const GroundTruthObject& g) { return !g.iscrowd; });
    if (!has_gt) continue;
    const auto& dets = dets_by_cat[c.id];
    std::array<double, 10> per{};
    for (int k = 0; k < 10; ++k) per[k] = ap_at_threshold(gts, dets, thresholds[k]);
    result.per_threshold_ap[c.id] = per;
    result.per_category_ap[c.id] = std::accumulate(per.begin(), per.end(), 0.0) / 10.0;
  }
  if (!result.per_category_ap.empty()) {
    double sum = 0.0;
    for (const auto& [id, ap] : result.per_category_ap) sum += ap;
    result.map_overall = sum / static_cast<double>(result.per_category_ap.size());
  }
  return result;
}

Json eval_to_json(const EvalResult& result) {
  Json per_cat = Json::object();
  for (const auto& [id, ap] : result.per_category_ap) per_cat[std::to_string(id)] = ap;
  Json per_thr = Json::object();
  const auto thresholds = iou_thresholds();
  for (const auto& [id, aps] : result.per_threshold_ap) {
    Json row = Json::object();
    for (int k = 0; k < 10; ++k) {
      char key[8];
      std::snprintf(key, sizeof key, "%.2f", thresholds[k]);
      row[key] = aps[k];
    }
    per_thr[std::to_string(id)] = row;
  }
  return Json{{"per_category_ap", per_cat},
              {"per_threshold_ap", per_thr},
              {"map_overall", result.map_overall}};
}

std::string format_eval_table(const EvalResult& result, const DatasetDoc& gt_doc) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %8s %8s %8s\n", "category", "AP", "AP50", "AP75");
  os << line;
  for (const auto& [id, ap] : result.per_category_ap) {
    const auto* cat = gt_doc.find_category(id);
    const auto& per = result.per_threshold_ap.at(id);
    std::snprintf(line, sizeof line, "%-16s %8.3f %8.3f %8.3f\n",
                  cat ? cat->name.c_str() : std::to_string(id).c_str(), ap, per[0], per[5]);
    os << line;
  }
  std::snprintf(line, sizeof line, "mAP@[.50:.95] %.3f\n", result.map_overall);
  os << line;
  return os.str();
}

}  // namespace courtaug
