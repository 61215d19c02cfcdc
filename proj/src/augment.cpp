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
#include "courtaug/augment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "courtaug/error.hpp"
#include "courtaug/mask_ops.hpp"

namespace courtaug {

std::string_view to_string(ViewSide view) { return view == ViewSide::Right ? "right" : "left"; }

ViewSide infer_view(std::string_view file_name) {
  const auto slash = file_name.find_last_of("/\\");
  std::string_view base = slash == std::string_view::npos ? file_name : file_name.substr(slash + 1);
  const auto dot = base.find_last_of('.');
  std::string_view stem = (dot == std::string_view::npos || dot == 0) ? base : base.substr(0, dot);
  const std::string_view token = stem.substr(0, stem.find('_'));
  return (!token.empty() && token.back() == '0') ? ViewSide::Right : ViewSide::Left;
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

template <typename T>
void check_range(const Range<T>& r, T min_lo, const char* name) {
  if (!(r.lo <= r.hi)) config_error(std::string(name) + ": empty range");
  if (r.lo < min_lo) config_error(std::string(name) + ": lower bound out of range");
}

template <typename T>
Json range_json(const Range<T>& r) {
  return Json::array({r.lo, r.hi});
}

template <typename T>
Range<T> range_from(const Json& j, const char* name) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    config_error(std::string(name) + " must be a [lo, hi] pair");
  }
  if constexpr (std::is_integral_v<T>) {
    if (!j[0].is_number_integer() || !j[1].is_number_integer()) {
      config_error(std::string(name) + " must hold integers");
    }
  }
  return {j[0].get<T>(), j[1].get<T>()};
}

template <typename T>
T number_from(const Json& j, const char* name) {
  if (!j.is_number()) config_error(std::string(name) + " must be a number");
  if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer()) config_error(std::string(name) + " must be an integer");
  }
  return j.get<T>();
}

void reject_unknown(const Json& j, std::initializer_list<const char*> known, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) config_error(std::string("unknown key \"") + it.key() + "\" in " + where);
  }
}

}  // namespace

void validate_config(const AugmentConfig& c) {
  check_range(c.persons_per_image, 0, "persons_per_image");
  check_range(c.balls_per_image, 0, "balls_per_image");
  check_range(c.interaction_persons, 0, "interaction_persons");
  if (!(c.pure_ball_prob >= 0.0 && c.pure_ball_prob <= 1.0)) {
    config_error("pure_ball_prob must lie in [0, 1]");
  }
  if (c.pure_ball_prob > 0.0 && c.pure_ball_palette.empty()) {
    config_error("pure_ball_palette is empty but pure_ball_prob > 0");
  }
  for (const auto& e : c.pure_ball_palette) {
    for (const auto* r : {&e.r, &e.g, &e.b}) {
      check_range(*r, 0, "pure_ball_palette");
      if (r->hi > 255) config_error("pure_ball_palette: channel values must be <= 255");
    }
  }
  const auto& g = c.geometric;
  if (!(g.rotate_deg >= 0 && g.shear >= 0 && g.translate_frac >= 0)) {
    config_error("geometric magnitudes must be non-negative");
  }
  const auto& p = c.photometric;
  if (!(p.brightness_delta >= 0 && p.hue_deg >= 0)) {
    config_error("photometric magnitudes must be non-negative");
  }
  check_range(p.contrast, 0.0, "photometric.contrast");
  check_range(p.saturation, 0.0, "photometric.saturation");
  check_range(c.resize.short_side, 1, "resize.short_side");
  if (c.resize.long_side_max < 1 || c.resize.target_width < 1 || c.resize.target_height < 1) {
    config_error("resize sizes must be positive");
  }
  if (c.duplication_factor < 1) config_error("duplication_factor must be >= 1");
  if (c.max_resample_attempts < 1) config_error("max_resample_attempts must be >= 1");
}

Json config_to_json(const AugmentConfig& c) {
  Json palette = Json::array();
  for (const auto& e : c.pure_ball_palette) {
    palette.push_back(
        {{"name", e.name}, {"r", range_json(e.r)}, {"g", range_json(e.g)}, {"b", range_json(e.b)}});
  }
  return Json{
      {"seed", c.seed},
      {"persons_per_image", range_json(c.persons_per_image)},
      {"balls_per_image", range_json(c.balls_per_image)},
      {"interaction_persons", range_json(c.interaction_persons)},
      {"pure_ball_prob", c.pure_ball_prob},
      {"pure_ball_palette", palette},
      {"geometric",
       {{"rotate_deg", c.geometric.rotate_deg},
        {"shear", c.geometric.shear},
        {"translate_frac", c.geometric.translate_frac}}},
      {"photometric",
       {{"brightness_delta", c.photometric.brightness_delta},
        {"contrast", range_json(c.photometric.contrast)},
        {"saturation", range_json(c.photometric.saturation)},
        {"hue_deg", c.photometric.hue_deg}}},
      {"resize",
       {{"short_side", range_json(c.resize.short_side)},
        {"long_side_max", c.resize.long_side_max},
        {"target", Json::array({c.resize.target_width, c.resize.target_height})}}},
      {"duplication_factor", c.duplication_factor},
      {"max_resample_attempts", c.max_resample_attempts},
      {"person_category", c.person_category},
      {"ball_category", c.ball_category},
  };
}

AugmentConfig config_from_json(const Json& j) {
  if (!j.is_object()) config_error("config must be a JSON object");
  reject_unknown(j,
                 {"seed", "persons_per_image", "balls_per_image", "interaction_persons",
                  "pure_ball_prob", "pure_ball_palette", "geometric", "photometric", "resize",
                  "duplication_factor", "max_resample_attempts", "person_category",
                  "ball_category"},
                 "config");
  AugmentConfig c;
  if (j.contains("seed")) {
    const Json& s = j["seed"];
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() &&
                                   s.get<std::int64_t>() < 0)) {
      config_error("seed must be a non-negative integer");
    }
    c.seed = s.get<std::uint64_t>();
  }
  if (j.contains("persons_per_image"))
    c.persons_per_image = range_from<int>(j["persons_per_image"], "persons_per_image");
  if (j.contains("balls_per_image"))
    c.balls_per_image = range_from<int>(j["balls_per_image"], "balls_per_image");
  if (j.contains("interaction_persons"))
    c.interaction_persons = range_from<int>(j["interaction_persons"], "interaction_persons");
  if (j.contains("pure_ball_prob"))
    c.pure_ball_prob = number_from<double>(j["pure_ball_prob"], "pure_ball_prob");
  if (j.contains("pure_ball_palette")) {
    const Json& pal = j["pure_ball_palette"];
    if (!pal.is_array()) config_error("pure_ball_palette must be a list");
    c.pure_ball_palette.clear();
    for (const Json& e : pal) {
      if (!e.is_object()) config_error("pure_ball_palette entries must be objects");
      reject_unknown(e, {"name", "r", "g", "b"}, "pure_ball_palette");
      PaletteEntry entry;
      entry.name = e.value("name", std::string{});
      if (!e.contains("r") || !e.contains("g") || !e.contains("b")) {
        config_error("pure_ball_palette entries need r, g and b ranges");
      }
      entry.r = range_from<int>(e["r"], "pure_ball_palette.r");
      entry.g = range_from<int>(e["g"], "pure_ball_palette.g");
      entry.b = range_from<int>(e["b"], "pure_ball_palette.b");
      c.pure_ball_palette.push_back(std::move(entry));
    }
  }
  if (j.contains("geometric")) {
    const Json& g = j["geometric"];
    if (!g.is_object()) config_error("geometric must be an object");
    reject_unknown(g, {"rotate_deg", "shear", "translate_frac"}, "geometric");
    if (g.contains("rotate_deg")) c.geometric.rotate_deg = number_from<double>(g["rotate_deg"], "rotate_deg");
    if (g.contains("shear")) c.geometric.shear = number_from<double>(g["shear"], "shear");
    if (g.contains("translate_frac"))
      c.geometric.translate_frac = number_from<double>(g["translate_frac"], "translate_frac");
  }
  if (j.contains("photometric")) {
    const Json& p = j["photometric"];
    if (!p.is_object()) config_error("photometric must be an object");
    reject_unknown(p, {"brightness_delta", "contrast", "saturation", "hue_deg"}, "photometric");
    if (p.contains("brightness_delta"))
      c.photometric.brightness_delta = number_from<double>(p["brightness_delta"], "brightness_delta");
    if (p.contains("contrast")) c.photometric.contrast = range_from<double>(p["contrast"], "contrast");
    if (p.contains("saturation"))
      c.photometric.saturation = range_from<double>(p["saturation"], "saturation");
    if (p.contains("hue_deg")) c.photometric.hue_deg = number_from<double>(p["hue_deg"], "hue_deg");
  }
  if (j.contains("resize")) {
    const Json& r = j["resize"];
    if (!r.is_object()) config_error("resize must be an object");
    reject_unknown(r, {"short_side", "long_side_max", "target"}, "resize");
    if (r.contains("short_side")) c.resize.short_side = range_from<int>(r["short_side"], "short_side");
    if (r.contains("long_side_max"))
      c.resize.long_side_max = number_from<int>(r["long_side_max"], "long_side_max");
    if (r.contains("target")) {
      const auto t = range_from<int>(r["target"], "target");
      c.resize.target_width = t.lo;
      c.resize.target_height = t.hi;
    }
  }
  if (j.contains("duplication_factor"))
    c.duplication_factor = number_from<int>(j["duplication_factor"], "duplication_factor");
  if (j.contains("max_resample_attempts"))
    c.max_resample_attempts = number_from<int>(j["max_resample_attempts"], "max_resample_attempts");
  if (j.contains("person_category")) {
    if (!j["person_category"].is_string()) config_error("person_category must be a string");
    c.person_category = j["person_category"].get<std::string>();
  }
  if (j.contains("ball_category")) {
    if (!j["ball_category"].is_string()) config_error("ball_category must be a string");
    c.ball_category = j["ball_category"].get<std::string>();
  }
  validate_config(c);
  return c;
}

// ---------------------------------------------------------------------------
// Scenes

std::int64_t Scene::next_instance_id() const {
  std::int64_t id = 0;
  for (const auto& inst : instances) id = std::max(id, inst.id);
  return id + 1;
}

Scene make_scene(const ImageRecord& record, RgbImage image,
                 std::span<const AnnotationRecord> annotations) {
  if (image.width() != record.width || image.height() != record.height) {
    throw Error(ErrorKind::DimensionMismatch,
                "image " + record.file_name + " is " + std::to_string(image.width()) + "x" +
                    std::to_string(image.height()) + ", record says " +
                    std::to_string(record.width) + "x" + std::to_string(record.height));
  }
  Scene scene{record, std::move(image), {}};
  for (const auto& a : annotations) {
    if (a.image_id != record.id) continue;
    scene.instances.push_back({a.id, a.category_id,
                               decode_segmentation(a.segmentation, record.width, record.height),
                               a.iscrowd, a.extra});
  }
  return scene;
}

std::vector<AnnotationRecord> scene_annotations(const Scene& scene) {
  std::vector<AnnotationRecord> out;
  out.reserve(scene.instances.size());
  for (const auto& inst : scene.instances) {
    Rle rle = rle_encode(inst.mask);
    const auto box = rle_bbox(rle);
    if (!box) continue;
    AnnotationRecord a;
    a.id = inst.id;
    a.image_id = scene.record.id;
    a.category_id = inst.category_id;
    a.bbox = {static_cast<double>(box->x_min), static_cast<double>(box->y_min),
              static_cast<double>(box->width()), static_cast<double>(box->height())};
    a.area = static_cast<double>(rle_area(rle));
    a.segmentation = std::move(rle);
    a.iscrowd = inst.iscrowd;
    a.extra = inst.extra;
    out.push_back(std::move(a));
  }
  return out;
}

CategoryRoles resolve_roles(const DatasetDoc& doc, const AugmentConfig& config) {
  CategoryRoles roles;
  if (const auto* c = doc.find_category(config.person_category)) roles.person = c->id;
  if (const auto* c = doc.find_category(config.ball_category)) roles.ball = c->id;
  return roles;
}

// ---------------------------------------------------------------------------
// Copy-paste

BoxD view_paste_bounds(ViewSide view, int width, int height) {
  const double w = width, h = height;
  BoxD b;
  if (view == ViewSide::Right) {
    b.x_min = w / 5.0;
    b.x_max = w;
  } else {
    b.x_min = 0.0;
    b.x_max = w - w / 5.0;
  }
  b.y_min = h / 2.0 - h / 5.0;
  b.y_max = h / 2.0 + h / 5.0;
  return b;
}

namespace {

// Integers inside [lo, hi]; collapses to the nearest integer to the midpoint
// when the interval holds none (only happens for canvases a few pixels high).
Range<int> integer_interval(double lo, double hi) {
  Range<int> r{static_cast<int>(std::ceil(lo)), static_cast<int>(std::floor(hi))};
  if (r.lo > r.hi) r.lo = r.hi = static_cast<int>(std::lround(0.5 * (lo + hi)));
  return r;
}

std::vector<std::size_t> bank_indices(std::span<const ObjectPatch> bank,
                                      std::optional<std::int64_t> category) {
  std::vector<std::size_t> idx;
  if (!category) return idx;
  for (std::size_t k = 0; k < bank.size(); ++k)
    if (bank[k].category_id == *category && bank[k].mask.size() > 0) idx.push_back(k);
  return idx;
}

// Extent of the patch's pixels left visible on the canvas at `pos`.
std::optional<BoxI> visible_box(const Mask& patch, const Eigen::Vector2i& pos, int width,
                                int height) {
  const int x0 = std::max(0, pos.x()), y0 = std::max(0, pos.y());
  const int x1 = std::min(width, pos.x() + static_cast<int>(patch.cols()));
  const int y1 = std::min(height, pos.y() + static_cast<int>(patch.rows()));
  if (x1 <= x0 || y1 <= y0) return std::nullopt;
  const Mask block = patch.block(y0 - pos.y(), x0 - pos.x(), y1 - y0, x1 - x0);
  auto box = mask_bbox(block);
  if (box) *box = {box->x_min + x0, box->y_min + y0, box->x_max + x0, box->y_max + y0};
  return box;
}

// Edge clipping can push the visible top-left away from the anchor, so the
// visible box itself must start inside the allowed intervals.
bool starts_within(const std::optional<BoxI>& box, const Range<int>& xs, const Range<int>& ys) {
  return box && box->x_min >= xs.lo && box->x_min <= xs.hi && box->y_min >= ys.lo &&
         box->y_min <= ys.hi;
}

}  // namespace

Eigen::Vector2i sample_view_paste_location(ViewSide view, int width, int height,
                                           const Mask& patch_mask, RngStream& rng,
                                           int max_attempts) {
  const BoxD bounds = view_paste_bounds(view, width, height);
  const Range<int> xs = integer_interval(bounds.x_min, bounds.x_max);
  const Range<int> ys = integer_interval(bounds.y_min, bounds.y_max);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const Eigen::Vector2i pos(static_cast<int>(rng.uniform_int(xs.lo, xs.hi)),
                              static_cast<int>(rng.uniform_int(ys.lo, ys.hi)));
    if (starts_within(visible_box(patch_mask, pos, width, height), xs, ys)) return pos;
  }
  throw Error(ErrorKind::SamplingExhausted,
              "no visible paste location after " + std::to_string(max_attempts) + " attempts");
}

Eigen::Vector2i sample_interaction_location(const BoxI& person_box, RngStream& rng) {
  return {static_cast<int>(rng.uniform_int(person_box.x_min, person_box.x_max)),
          static_cast<int>(rng.uniform_int(person_box.y_min, person_box.y_max))};
}

ObjectPatch recolor_pure_ball(const ObjectPatch& patch, const PaletteEntry& entry,
                              RngStream& rng) {
  const std::array<std::uint8_t, 3> color{
      static_cast<std::uint8_t>(rng.uniform_int(entry.r.lo, entry.r.hi)),
      static_cast<std::uint8_t>(rng.uniform_int(entry.g.lo, entry.g.hi)),
      static_cast<std::uint8_t>(rng.uniform_int(entry.b.lo, entry.b.hi))};
  ObjectPatch out = patch;
  const auto fg = (patch.mask != 0);
  for (int c = 0; c < 3; ++c) {
    out.pixels[c] = fg.select(Plane<std::uint8_t>::Constant(patch.height(), patch.width(), color[c]),
                              patch.pixels[c]);
  }
  return out;
}

PasteRecord paste_patch(Scene& scene, const ObjectPatch& patch, const Eigen::Vector2i& position) {
  const int w = scene.width(), h = scene.height();
  std::vector<Mask> masks;
  masks.reserve(scene.instances.size());
  for (auto& inst : scene.instances) masks.push_back(std::move(inst.mask));
  std::vector<std::size_t> removed;
  Mask pasted;
  try {
    pasted = composite_paste_inplace(masks, patch.mask, position, w, h, removed);
  } catch (...) {
    for (std::size_t k = 0; k < masks.size(); ++k) scene.instances[k].mask = std::move(masks[k]);
    throw;
  }
  for (std::size_t k = 0; k < masks.size(); ++k) scene.instances[k].mask = std::move(masks[k]);
  for (auto it = removed.rbegin(); it != removed.rend(); ++it) {
    scene.instances.erase(scene.instances.begin() + static_cast<std::ptrdiff_t>(*it));
  }

  const int x0 = std::max(0, position.x()), y0 = std::max(0, position.y());
  const int x1 = std::min(w, position.x() + patch.width());
  const int y1 = std::min(h, position.y() + patch.height());
  for (int x = x0; x < x1; ++x) {
    for (int y = y0; y < y1; ++y) {
      const int sx = x - position.x(), sy = y - position.y();
      if (!patch.mask(sy, sx)) continue;
      for (int c = 0; c < 3; ++c) scene.image[c](y, x) = patch.pixels[c](sy, sx);
    }
  }

  PasteRecord rec;
  rec.category_id = patch.category_id;
  rec.position = position;
  const auto local = mask_bbox(pasted.block(y0, x0, y1 - y0, x1 - x0));
  rec.pasted_box = {local->x_min + x0, local->y_min + y0, local->x_max + x0, local->y_max + y0};

  Instance inst;
  inst.id = scene.next_instance_id();
  inst.category_id = patch.category_id;
  inst.mask = std::move(pasted);
  scene.instances.push_back(std::move(inst));
  return rec;
}

namespace {

const ObjectPatch& maybe_recolor(const ObjectPatch& patch, const AugmentConfig& config,
                                 RngStream& rng, ObjectPatch& storage, bool& recolored) {
  recolored = false;
  if (config.pure_ball_palette.empty() || !rng.bernoulli(config.pure_ball_prob)) return patch;
  const PaletteEntry& entry = config.pure_ball_palette[rng.index(config.pure_ball_palette.size())];
  storage = recolor_pure_ball(patch, entry, rng);
  recolored = true;
  return storage;
}

[[noreturn]] void empty_bank(const std::string& category) {
  throw Error(ErrorKind::EmptyBank, "object bank has no \"" + category + "\" patches");
}

}  // namespace

PasteLog paste_objects(Scene& scene, std::span<const ObjectPatch> bank, ViewSide view,
                       const CategoryRoles& roles, const AugmentConfig& config, RngStream& rng) {
  const int n_persons =
      static_cast<int>(rng.uniform_int(config.persons_per_image.lo, config.persons_per_image.hi));
  const int n_balls =
      static_cast<int>(rng.uniform_int(config.balls_per_image.lo, config.balls_per_image.hi));
  const auto persons = bank_indices(bank, roles.person);
  const auto balls = bank_indices(bank, roles.ball);
  if (n_persons > 0 && persons.empty()) empty_bank(config.person_category);
  if (n_balls > 0 && balls.empty()) empty_bank(config.ball_category);

  PasteLog log;
  auto paste_one = [&](std::size_t idx, const ObjectPatch& patch, bool recolored) {
    const Eigen::Vector2i pos = sample_view_paste_location(
        view, scene.width(), scene.height(), patch.mask, rng, config.max_resample_attempts);
    PasteRecord rec = paste_patch(scene, patch, pos);
    rec.stage = "view";
    rec.bank_index = idx;
    rec.recolored = recolored;
    log.push_back(std::move(rec));
  };
  for (int i = 0; i < n_persons; ++i) {
    const std::size_t idx = persons[rng.index(persons.size())];
    paste_one(idx, bank[idx], false);
  }
  for (int i = 0; i < n_balls; ++i) {
    const std::size_t idx = balls[rng.index(balls.size())];
    ObjectPatch storage;
    bool recolored = false;
    const ObjectPatch& patch = maybe_recolor(bank[idx], config, rng, storage, recolored);
    paste_one(idx, patch, recolored);
  }
  return log;
}

PasteLog paste_interaction_balls(Scene& scene, std::span<const ObjectPatch> bank,
                                 const CategoryRoles& roles, const AugmentConfig& config,
                                 RngStream& rng) {
  PasteLog log;
  if (!roles.person) return log;
  std::vector<BoxI> person_boxes;
  for (const auto& inst : scene.instances) {
    if (inst.category_id != *roles.person || inst.iscrowd) continue;
    if (auto box = mask_bbox(inst.mask)) person_boxes.push_back(*box);
  }
  if (person_boxes.empty()) return log;

  const auto k_drawn =
      rng.uniform_int(config.interaction_persons.lo, config.interaction_persons.hi);
  const std::size_t k = std::min(static_cast<std::size_t>(k_drawn), person_boxes.size());
  if (k == 0) return log;
  const auto balls = bank_indices(bank, roles.ball);
  if (balls.empty()) empty_bank(config.ball_category);

  // Partial Fisher-Yates: the first k entries become a uniform k-subset.
  std::vector<std::size_t> order(person_boxes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.index(order.size() - i);
    std::swap(order[i], order[j]);
  }

  for (std::size_t i = 0; i < k; ++i) {
    const BoxI& target = person_boxes[order[i]];
    const std::size_t idx = balls[rng.index(balls.size())];
    ObjectPatch storage;
    bool recolored = false;
    const ObjectPatch& patch = maybe_recolor(bank[idx], config, rng, storage, recolored);
    std::optional<Eigen::Vector2i> pos;
    for (int attempt = 0; attempt < config.max_resample_attempts && !pos; ++attempt) {
      const Eigen::Vector2i p = sample_interaction_location(target, rng);
      if (starts_within(visible_box(patch.mask, p, scene.width(), scene.height()),
                        {target.x_min, target.x_max}, {target.y_min, target.y_max})) {
        pos = p;
      }
    }
    if (!pos) {
      throw Error(ErrorKind::SamplingExhausted, "no visible ball location around person box");
    }
    PasteRecord rec = paste_patch(scene, patch, *pos);
    rec.stage = "interaction";
    rec.bank_index = idx;
    rec.recolored = recolored;
    rec.person_box = target;
    log.push_back(std::move(rec));
  }
  return log;
}

// ---------------------------------------------------------------------------
// Geometric transforms

Eigen::Affine2d rotation_about_center(double degrees, int width, int height) {
  const Eigen::Vector2d c(0.5 * width, 0.5 * height);
  return Eigen::Translation2d(c) * Eigen::Rotation2Dd(degrees * std::numbers::pi / 180.0) *
         Eigen::Translation2d(-c);
}

Eigen::Affine2d shear_about_center(double factor, int width, int height) {
  const Eigen::Vector2d c(0.5 * width, 0.5 * height);
  Eigen::Affine2d shear = Eigen::Affine2d::Identity();
  shear.linear() << 1.0, factor, 0.0, 1.0;
  return Eigen::Translation2d(c) * shear * Eigen::Translation2d(-c);
}

Eigen::Affine2d translation(double dx, double dy) {
  return Eigen::Affine2d(Eigen::Translation2d(dx, dy));
}

Eigen::Affine2d draw_geometric(const GeometricConfig& config, int width, int height,
                               RngStream& rng, GeometricKind* chosen) {
  const auto kind = static_cast<GeometricKind>(rng.index(3));
  if (chosen) *chosen = kind;
  switch (kind) {
    case GeometricKind::Shear:
      return shear_about_center(rng.uniform_real(-config.shear, config.shear), width, height);
    case GeometricKind::Rotate:
      return rotation_about_center(rng.uniform_real(-config.rotate_deg, config.rotate_deg), width,
                                   height);
    case GeometricKind::Translate: {
      const double fx = config.translate_frac * width, fy = config.translate_frac * height;
      const double dx = rng.uniform_real(-fx, fx);
      const double dy = rng.uniform_real(-fy, fy);
      return translation(dx, dy);
    }
  }
  return Eigen::Affine2d::Identity();
}

namespace {

std::uint8_t to_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
}

Mask warp_mask(const Mask& src, const Eigen::Affine2d& forward, const Eigen::Affine2d& inverse) {
  const int w = static_cast<int>(src.cols()), h = static_cast<int>(src.rows());
  Mask out = Mask::Zero(h, w);
  const auto box = mask_bbox(src);
  if (!box) return out;
  Eigen::Matrix<double, 2, 4> corners;
  corners << box->x_min, box->x_max, box->x_min, box->x_max,
             box->y_min, box->y_min, box->y_max, box->y_max;
  const Eigen::Matrix<double, 2, 4> mapped = forward * corners;
  const int ox0 = std::max(0, static_cast<int>(std::floor(mapped.row(0).minCoeff())) - 1);
  const int ox1 = std::min(w, static_cast<int>(std::ceil(mapped.row(0).maxCoeff())) + 1);
  const int oy0 = std::max(0, static_cast<int>(std::floor(mapped.row(1).minCoeff())) - 1);
  const int oy1 = std::min(h, static_cast<int>(std::ceil(mapped.row(1).maxCoeff())) + 1);
  const Eigen::Matrix2d lin = inverse.linear();
  const Eigen::Vector2d t = inverse.translation();
  for (int x = ox0; x < ox1; ++x) {
    for (int y = oy0; y < oy1; ++y) {
      const Eigen::Vector2d q = lin * Eigen::Vector2d(x + 0.5, y + 0.5) + t;
      const double fx = std::floor(q.x()), fy = std::floor(q.y());
      if (fx < box->x_min || fx >= box->x_max || fy < box->y_min || fy >= box->y_max) continue;
      out(y, x) = src(static_cast<int>(fy), static_cast<int>(fx)) != 0 ? 1 : 0;
    }
  }
  return out;
}

}  // namespace

void apply_affine(Scene& scene, const Eigen::Affine2d& transform) {
  const int w = scene.width(), h = scene.height();
  const Eigen::Affine2d inverse = transform.inverse();
  const Eigen::Matrix2d lin = inverse.linear();
  const Eigen::Vector2d t = inverse.translation();

  RgbImage out(w, h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) {
      const Eigen::Vector2d q = lin * Eigen::Vector2d(x + 0.5, y + 0.5) + t;
      const double u = q.x() - 0.5, v = q.y() - 0.5;
      const double fu = std::floor(u), fv = std::floor(v);
      const int x0 = static_cast<int>(fu), y0 = static_cast<int>(fv);
      if (x0 < -1 || y0 < -1 || x0 >= w || y0 >= h) continue;
      const double ax = u - fu, ay = v - fv;
      const double wts[4] = {(1 - ax) * (1 - ay), ax * (1 - ay), (1 - ax) * ay, ax * ay};
      const int xs[4] = {x0, x0 + 1, x0, x0 + 1};
      const int ys[4] = {y0, y0, y0 + 1, y0 + 1};
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) {
          if (wts[k] == 0.0 || xs[k] < 0 || ys[k] < 0 || xs[k] >= w || ys[k] >= h) continue;
          acc += wts[k] * scene.image[c](ys[k], xs[k]);
        }
        out[c](y, x) = to_u8(acc);
      }
    }
  }
  scene.image = std::move(out);

  std::vector<Instance> kept;
  kept.reserve(scene.instances.size());
  for (auto& inst : scene.instances) {
    inst.mask = warp_mask(inst.mask, transform, inverse);
    if (mask_area(inst.mask) > 0) kept.push_back(std::move(inst));
  }
  scene.instances = std::move(kept);
}

void apply_geometric(Scene& scene, const AugmentConfig& config, RngStream& rng) {
  apply_affine(scene, draw_geometric(config.geometric, scene.width(), scene.height(), rng));
}

// ---------------------------------------------------------------------------
// Photometric distortion

PhotometricParams draw_photometric(const PhotometricConfig& config, RngStream& rng) {
  PhotometricParams p;
  p.brightness = rng.uniform_real(-config.brightness_delta, config.brightness_delta);
  p.contrast = rng.uniform_real(config.contrast.lo, config.contrast.hi);
  p.saturation = rng.uniform_real(config.saturation.lo, config.saturation.hi);
  p.hue_deg = rng.uniform_real(-config.hue_deg, config.hue_deg);
  return p;
}

namespace {

void shift_hue(double& r, double& g, double& b, double shift_deg) {
  const double mx = std::max({r, g, b}), mn = std::min({r, g, b});
  const double chroma = mx - mn;
  if (chroma <= 0.0) return;
  double hue;
  if (mx == r) {
    hue = std::fmod((g - b) / chroma, 6.0);
  } else if (mx == g) {
    hue = (b - r) / chroma + 2.0;
  } else {
    hue = (r - g) / chroma + 4.0;
  }
  hue = std::fmod(hue * 60.0 + shift_deg, 360.0);
  if (hue < 0) hue += 360.0;
  const double hp = hue / 60.0;
  const double x = chroma * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r1 = 0, g1 = 0, b1 = 0;
  switch (static_cast<int>(hp) % 6) {
    case 0: r1 = chroma; g1 = x; break;
    case 1: r1 = x; g1 = chroma; break;
    case 2: g1 = chroma; b1 = x; break;
    case 3: g1 = x; b1 = chroma; break;
    case 4: r1 = x; b1 = chroma; break;
    default: r1 = chroma; b1 = x; break;
  }
  const double m = mx - chroma;
  r = r1 + m;
  g = g1 + m;
  b = b1 + m;
}

}  // namespace

void apply_photometric(RgbImage& image, const PhotometricParams& params) {
  if (image.empty()) return;
  Rgb<double> f = image.cast<double>();
  auto clamp_all = [&f] {
    for (auto& ch : f.channels) ch = ch.max(0.0).min(255.0);
  };
  auto gray = [&f] { return (0.299 * f[0] + 0.587 * f[1] + 0.114 * f[2]).eval(); };

  if (params.brightness != 0.0) {
    for (auto& ch : f.channels) ch += params.brightness;
    clamp_all();
  }
  if (params.contrast != 1.0) {
    const double mean = gray().mean();
    for (auto& ch : f.channels) ch = params.contrast * ch + (1.0 - params.contrast) * mean;
    clamp_all();
  }
  if (params.saturation != 1.0) {
    const Plane<double> g = gray();
    for (auto& ch : f.channels) ch = params.saturation * ch + (1.0 - params.saturation) * g;
    clamp_all();
  }
  if (params.hue_deg != 0.0) {
    const Eigen::Index n = f[0].size();
    double* r = f[0].data();
    double* g = f[1].data();
    double* b = f[2].data();
    for (Eigen::Index k = 0; k < n; ++k) shift_hue(r[k], g[k], b[k], params.hue_deg);
    clamp_all();
  }
  for (int c = 0; c < 3; ++c) image[c] = f[c].round().cast<std::uint8_t>();
}

void apply_photometric(RgbImage& image, const AugmentConfig& config, RngStream& rng) {
  apply_photometric(image, draw_photometric(config.photometric, rng));
}

// ---------------------------------------------------------------------------
// Resize, crop and pad

void resize_crop_pad(Scene& scene, const ResizeConfig& config, RngStream& rng,
                     std::optional<int> forced_short_side) {
  const int w = scene.width(), h = scene.height();
  if (w < 1 || h < 1) throw Error(ErrorKind::InvalidArgument, "resize_crop_pad on empty image");
  const int s = forced_short_side ? *forced_short_side
                                  : static_cast<int>(rng.uniform_int(config.short_side.lo,
                                                                     config.short_side.hi));
  const double scale = std::min(static_cast<double>(s) / std::min(w, h),
                                static_cast<double>(config.long_side_max) / std::max(w, h));
  const int sw = std::max(1, static_cast<int>(std::lround(w * scale)));
  const int sh = std::max(1, static_cast<int>(std::lround(h * scale)));
  const int tw = config.target_width, th = config.target_height;
  const int ox = sw > tw ? static_cast<int>(rng.uniform_int(0, sw - tw)) : 0;
  const int oy = sh > th ? static_cast<int>(rng.uniform_int(0, sh - th)) : 0;
  const int vw = std::min(tw, sw - ox), vh = std::min(th, sh - oy);  // non-padded extent

  const double inv_x = static_cast<double>(w) / sw, inv_y = static_cast<double>(h) / sh;
  // Source coordinates for every visible output column / row.
  std::vector<int> near_x(vw), near_y(vh), lo_x(vw), lo_y(vh);
  std::vector<double> frac_x(vw), frac_y(vh);
  for (int x = 0; x < vw; ++x) {
    const double src = (x + ox + 0.5) * inv_x;
    near_x[x] = std::min(w - 1, static_cast<int>(std::floor(src)));
    const double u = std::clamp(src - 0.5, 0.0, static_cast<double>(w - 1));
    lo_x[x] = static_cast<int>(std::floor(u));
    frac_x[x] = u - lo_x[x];
  }
  for (int y = 0; y < vh; ++y) {
    const double src = (y + oy + 0.5) * inv_y;
    near_y[y] = std::min(h - 1, static_cast<int>(std::floor(src)));
    const double v = std::clamp(src - 0.5, 0.0, static_cast<double>(h - 1));
    lo_y[y] = static_cast<int>(std::floor(v));
    frac_y[y] = v - lo_y[y];
  }

  RgbImage out(tw, th);
  for (int c = 0; c < 3; ++c) {
    const auto& src = scene.image[c];
    for (int x = 0; x < vw; ++x) {
      const int x0 = lo_x[x], x1 = std::min(w - 1, x0 + 1);
      const double ax = frac_x[x];
      for (int y = 0; y < vh; ++y) {
        const int y0 = lo_y[y], y1 = std::min(h - 1, y0 + 1);
        const double ay = frac_y[y];
        const double top = (1 - ax) * src(y0, x0) + (ax > 0 ? ax * src(y0, x1) : 0.0);
        const double bot = (1 - ax) * src(y1, x0) + (ax > 0 ? ax * src(y1, x1) : 0.0);
        out[c](y, x) = to_u8((1 - ay) * top + (ay > 0 ? ay * bot : 0.0));
      }
    }
  }
  scene.image = std::move(out);

  std::vector<Instance> kept;
  for (auto& inst : scene.instances) {
    Mask m = Mask::Zero(th, tw);
    if (const auto box = mask_bbox(inst.mask)) {
      const auto x_begin = std::lower_bound(near_x.begin(), near_x.end(), box->x_min) - near_x.begin();
      const auto x_end = std::lower_bound(near_x.begin(), near_x.end(), box->x_max) - near_x.begin();
      const auto y_begin = std::lower_bound(near_y.begin(), near_y.end(), box->y_min) - near_y.begin();
      const auto y_end = std::lower_bound(near_y.begin(), near_y.end(), box->y_max) - near_y.begin();
      for (auto x = x_begin; x < x_end; ++x)
        for (auto y = y_begin; y < y_end; ++y)
          m(y, x) = inst.mask(near_y[y], near_x[x]) != 0 ? 1 : 0;
    }
    inst.mask = std::move(m);
    if (mask_area(inst.mask) > 0) kept.push_back(std::move(inst));
  }
  scene.instances = std::move(kept);
  scene.record.width = tw;
  scene.record.height = th;
}

// ---------------------------------------------------------------------------
// Dataset duplication and the full pipeline

DatasetDoc duplicate_dataset(const DatasetDoc& doc, int factor) {
  if (factor < 1) throw Error(ErrorKind::InvalidArgument, "duplication factor must be >= 1");
  auto span_of = [](auto first, auto last, auto id_of) -> std::int64_t {
    if (first == last) return 0;
    std::int64_t lo = id_of(*first), hi = lo;
    for (auto it = first; it != last; ++it) {
      lo = std::min(lo, id_of(*it));
      hi = std::max(hi, id_of(*it));
    }
    if (hi - lo == std::numeric_limits<std::int64_t>::max()) {
      throw Error(ErrorKind::IdOverflow, "id range too wide to duplicate");
    }
    return hi - lo + 1;
  };
  const std::int64_t image_stride = span_of(doc.images.begin(), doc.images.end(),
                                            [](const ImageRecord& r) { return r.id; });
  const std::int64_t ann_stride = span_of(doc.annotations.begin(), doc.annotations.end(),
                                          [](const AnnotationRecord& r) { return r.id; });
  DatasetDoc out;
  out.categories = doc.categories;
  out.extra = doc.extra;
  out.images.reserve(doc.images.size() * static_cast<std::size_t>(factor));
  out.annotations.reserve(doc.annotations.size() * static_cast<std::size_t>(factor));
  constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();
  for (int k = 0; k < factor; ++k) {
    if ((image_stride > 0 && k > kMax / image_stride) || (ann_stride > 0 && k > kMax / ann_stride)) {
      throw Error(ErrorKind::IdOverflow, "duplicated ids exceed the identifier range");
    }
    DatasetDoc copy = reindex(doc, k * image_stride, k * ann_stride);
    std::move(copy.images.begin(), copy.images.end(), std::back_inserter(out.images));
    std::move(copy.annotations.begin(), copy.annotations.end(),
              std::back_inserter(out.annotations));
  }
  return out;
}

AugmentResult augment_image(Scene scene, std::span<const ObjectPatch> bank,
                            const CategoryRoles& roles, const AugmentConfig& config) {
  const std::int64_t id = scene.record.id;
  AugmentResult result;
  const ViewSide view = infer_view(scene.record.file_name);

  RngStream view_rng(config.seed, id, "view_paste");
  result.log = paste_objects(scene, bank, view, roles, config, view_rng);

  RngStream interaction_rng(config.seed, id, "interaction_paste");
  PasteLog more = paste_interaction_balls(scene, bank, roles, config, interaction_rng);
  result.log.insert(result.log.end(), more.begin(), more.end());

  RngStream geometric_rng(config.seed, id, "geometric");
  apply_geometric(scene, config, geometric_rng);

  RngStream photometric_rng(config.seed, id, "photometric");
  apply_photometric(scene.image, config, photometric_rng);

  result.scene = std::move(scene);
  return result;
}

}  // namespace courtaug
