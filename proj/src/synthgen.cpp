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
#include "courtaug/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "courtaug/error.hpp"
#include "courtaug/image_io.hpp"
#include "courtaug/mask_ops.hpp"
#include "courtaug/rng.hpp"

namespace fs = std::filesystem;

namespace courtaug {

std::vector<CategoryRecord> synth_categories() {
  return {{kSynthHumanCategory, "human", Json::object()},
          {kSynthBallCategory, "ball", Json::object()}};
}

std::string synth_file_name(std::int64_t image_id, ViewSide view) {
  const long long token = 1000 + 10 * image_id + (view == ViewSide::Right ? 0 : 1);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%lld_%02d_%03lld.png", token, view == ViewSide::Right ? 0 : 1,
                static_cast<long long>(image_id));
  return buf;
}

namespace {

using Color = std::array<std::uint8_t, 3>;

void paint_background(RgbImage& img, ViewSide view) {
  const int w = img.width(), h = img.height();
  const int stands = h / 5;
  const int band = std::max(1, h / 24);
  for (int y = 0; y < h; ++y) {
    Color c;
    if (y < stands) {
      c = (y / std::max(1, stands / 6)) % 2 == 0 ? Color{62, 44, 74} : Color{54, 38, 66};
    } else {
      c = ((y - stands) / band) % 2 == 0 ? Color{196, 150, 98} : Color{184, 140, 90};
    }
    for (int ch = 0; ch < 3; ++ch) img[ch].row(y).setConstant(c[ch]);
  }
  // A painted court line whose side mirrors the camera.
  const int line_x = view == ViewSide::Right ? (3 * w) / 4 : w / 4;
  const int thickness = std::max(1, w / 320);
  for (int x = line_x; x < std::min(w, line_x + thickness); ++x)
    for (int ch = 0; ch < 3; ++ch) img[ch].col(x).tail(h - stands).setConstant(240);
}

struct Shape {
  Mask mask;
  BoxI box;
};

// Pixel-centre ellipse test, restricted to the ellipse's bounding rows/cols.
void draw_ellipse(Mask& m, double cx, double cy, double rx, double ry) {
  const int w = static_cast<int>(m.cols()), h = static_cast<int>(m.rows());
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - rx)));
  const int x1 = std::min(w, static_cast<int>(std::ceil(cx + rx)) + 1);
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - ry)));
  const int y1 = std::min(h, static_cast<int>(std::ceil(cy + ry)) + 1);
  for (int x = x0; x < x1; ++x) {
    for (int y = y0; y < y1; ++y) {
      const double dx = (x + 0.5 - cx) / rx, dy = (y + 0.5 - cy) / ry;
      if (dx * dx + dy * dy <= 1.0) m(y, x) = 1;
    }
  }
}

void draw_rect(Mask& m, int x0, int y0, int x1, int y1) {
  const int w = static_cast<int>(m.cols()), h = static_cast<int>(m.rows());
  x0 = std::clamp(x0, 0, w);
  x1 = std::clamp(x1, 0, w);
  y0 = std::clamp(y0, 0, h);
  y1 = std::clamp(y1, 0, h);
  if (x1 > x0 && y1 > y0) m.block(y0, x0, y1 - y0, x1 - x0).setOnes();
}

bool overlaps(const BoxI& a, const std::vector<BoxI>& others) {
  for (const auto& b : others)
    if (box_iou(a, b) > 0.0) return true;
  return false;
}

}  // namespace

SyntheticScene generate_scene(const SceneSpec& spec) {
  if (spec.width < 1 || spec.height < 1 || spec.n_persons < 0 || spec.n_balls < 0) {
    throw Error(ErrorKind::InvalidArgument, "invalid scene spec");
  }
  const int w = spec.width, h = spec.height;
  RngStream rng(spec.seed, spec.image_id, "synth");
  SyntheticScene out;
  out.record = {spec.image_id, synth_file_name(spec.image_id, spec.view), w, h, Json::object()};
  out.image = RgbImage(w, h);
  paint_background(out.image, spec.view);

  struct Drawn {
    std::int64_t category;
    Mask mask;
    Color primary, secondary;
    double cx = 0, radius = 0;
  };
  std::vector<Drawn> objects;
  std::vector<BoxI> boxes;
  const double band_lo = h / 2.0 - h / 5.0, band_hi = h / 2.0 + h / 5.0;

  for (int p = 0; p < spec.n_persons; ++p) {
    const int pw = std::max(3, static_cast<int>(rng.uniform_int(
                                   std::max<std::int64_t>(2, std::lround(h * 0.04)),
                                   std::max<std::int64_t>(3, std::lround(h * 0.07)))));
    const int ph = std::max(6, static_cast<int>(rng.uniform_int(
                                   std::max<std::int64_t>(5, std::lround(h * 0.15)),
                                   std::max<std::int64_t>(6, std::lround(h * 0.25)))));
    const bool may_overlap = rng.bernoulli(spec.occlusion_prob);
    Mask m;
    BoxI box;
    for (int attempt = 0; attempt < 50; ++attempt) {
      const double cy = rng.uniform_real(band_lo, band_hi);
      const double cx = rng.uniform_real(std::min(pw, w / 2), std::max(w - pw, w / 2));
      const double head_r = 0.4 * pw;
      const int top = static_cast<int>(std::lround(cy - ph / 2.0 + 2 * head_r));
      const int left = static_cast<int>(std::lround(cx - pw / 2.0));
      m = Mask::Zero(h, w);
      draw_rect(m, left, top, left + pw, static_cast<int>(std::lround(cy + ph / 2.0)));
      draw_ellipse(m, cx, cy - ph / 2.0 + head_r, 0.35 * pw, head_r);
      const auto b = mask_bbox(m);
      if (!b) continue;
      box = *b;
      if (may_overlap || !overlaps(box, boxes)) break;
    }
    if (mask_area(m) == 0) continue;
    const Color jersey{static_cast<std::uint8_t>(rng.uniform_int(20, 235)),
                       static_cast<std::uint8_t>(rng.uniform_int(20, 235)),
                       static_cast<std::uint8_t>(rng.uniform_int(20, 235))};
    objects.push_back({kSynthHumanCategory, std::move(m), jersey, Color{224, 182, 150}, 0, 0});
    boxes.push_back(box);
  }

  for (int b = 0; b < spec.n_balls; ++b) {
    const double r = std::max(8.0, rng.uniform_real(h * 0.008, h * 0.013));
    const double cy = rng.uniform_real(band_lo, band_hi);
    const double cx = rng.uniform_real(r, std::max(r, w - r));
    Mask m = Mask::Zero(h, w);
    draw_ellipse(m, cx, cy, r, r);
    if (mask_area(m) == 0) continue;
    objects.push_back({kSynthBallCategory, std::move(m), Color{222, 112, 38}, Color{40, 30, 28},
                       cx, r});
    out.ball_radii.push_back(r);
  }

  // Later objects occlude earlier ones.
  for (std::size_t i = 0; i < objects.size(); ++i) {
    for (std::size_t j = i + 1; j < objects.size(); ++j) {
      objects[i].mask = (objects[i].mask != 0 && objects[j].mask == 0).cast<std::uint8_t>();
    }
  }

  std::int64_t next_id = 1;
  for (const auto& obj : objects) {
    const auto box = mask_bbox(obj.mask);
    if (!box) continue;
    const int head_split = obj.category == kSynthHumanCategory
                               ? box->y_min + std::max(1, box->height() / 6)
                               : 0;
    for (int x = box->x_min; x < box->x_max; ++x) {
      for (int y = box->y_min; y < box->y_max; ++y) {
        if (!obj.mask(y, x)) continue;
        bool second;
        if (obj.category == kSynthBallCategory) {
          second = std::abs(x + 0.5 - obj.cx) < 0.15 * obj.radius;
        } else {
          second = y < head_split;
        }
        const Color& c = second ? obj.secondary : obj.primary;
        for (int ch = 0; ch < 3; ++ch) out.image[ch](y, x) = c[ch];
      }
    }
    AnnotationRecord a;
    a.id = next_id++;
    a.image_id = spec.image_id;
    a.category_id = obj.category;
    Rle rle = rle_encode(obj.mask);
    a.bbox = {double(box->x_min), double(box->y_min), double(box->width()), double(box->height())};
    a.area = static_cast<double>(rle_area(rle));
    a.segmentation = std::move(rle);
    out.annotations.push_back(std::move(a));
  }
  return out;
}

SceneSpec corpus_scene_spec(const SceneSpec& base, int index) {
  SceneSpec spec = base;
  spec.image_id = index + 1;
  spec.view = index % 2 == 0 ? ViewSide::Right : ViewSide::Left;
  return spec;
}

std::vector<SyntheticScene> generate_scenes(int n_images, const SceneSpec& base) {
  std::vector<SyntheticScene> scenes;
  scenes.reserve(std::max(0, n_images));
  std::int64_t next_ann = 1;
  for (int i = 0; i < n_images; ++i) {
    SyntheticScene s = generate_scene(corpus_scene_spec(base, i));
    for (auto& a : s.annotations) a.id = next_ann++;
    scenes.push_back(std::move(s));
  }
  return scenes;
}

DatasetDoc corpus_doc(const std::vector<SyntheticScene>& scenes) {
  DatasetDoc doc;
  doc.categories = synth_categories();
  for (const auto& s : scenes) {
    doc.images.push_back(s.record);
    doc.annotations.insert(doc.annotations.end(), s.annotations.begin(), s.annotations.end());
  }
  return doc;
}

DatasetDoc generate_corpus(int n_images, const SceneSpec& base, const std::string& out_dir) {
  const fs::path images_dir = fs::path(out_dir) / "images";
  std::error_code ec;
  fs::create_directories(images_dir, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + images_dir.string());
  DatasetDoc doc;
  doc.categories = synth_categories();
  std::int64_t next_ann = 1;
  for (int i = 0; i < n_images; ++i) {
    SyntheticScene s = generate_scene(corpus_scene_spec(base, i));
    write_png_rgb((images_dir / s.record.file_name).string(), s.image);
    doc.images.push_back(s.record);
    for (auto& a : s.annotations) {
      a.id = next_ann++;
      doc.annotations.push_back(std::move(a));
    }
  }
  return doc;
}

}  // namespace courtaug
