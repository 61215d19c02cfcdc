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
#include <set>

#include <gtest/gtest.h>

#include "courtaug/augment.hpp"
#include "courtaug/error.hpp"
#include "courtaug/synthgen.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace courtaug {
namespace {

using testing_util::rect_mask;

constexpr std::int64_t kHuman = 1;
constexpr std::int64_t kBall = 2;
const CategoryRoles kRoles{kHuman, kBall};

ObjectPatch solid_patch(std::int64_t category, int w, int h, std::uint8_t value) {
  ObjectPatch p;
  p.category_id = category;
  p.pixels = RgbImage(w, h);
  p.pixels.fill(value, value, value);
  p.mask = Mask::Ones(h, w);
  return p;
}

// Disc-shaped ball with a notch so the mask is not the full rectangle.
ObjectPatch disc_patch(int r) {
  ObjectPatch p = solid_patch(kBall, 2 * r, 2 * r, 200);
  for (int y = 0; y < 2 * r; ++y)
    for (int x = 0; x < 2 * r; ++x) {
      const double dx = x + 0.5 - r, dy = y + 0.5 - r;
      p.mask(y, x) = dx * dx + dy * dy < r * r ? 1 : 0;
      p.pixels[0](y, x) = static_cast<std::uint8_t>(x * 9);
    }
  return p;
}

std::vector<ObjectPatch> small_bank() {
  return {solid_patch(kHuman, 20, 60, 90), solid_patch(kHuman, 30, 70, 120), disc_patch(8),
          disc_patch(12)};
}

Scene empty_scene(int w, int h, const std::string& name = "1640_00_001.png") {
  Scene s;
  s.record = {1, name, w, h, Json::object()};
  s.image = RgbImage(w, h);
  s.image.fill(30, 60, 90);
  return s;
}

AugmentConfig zero_paste_config() {
  AugmentConfig c;
  c.persons_per_image = {0, 0};
  c.balls_per_image = {0, 0};
  c.interaction_persons = {0, 0};
  return c;
}

void expect_consistent(const Scene& scene) {
  for (const auto& a : scene_annotations(scene)) {
    const Mask m = rle_decode(std::get<Rle>(a.segmentation));
    const auto box = oracle::bbox(m);
    ASSERT_TRUE(box.has_value());
    EXPECT_EQ(a.bbox[0], box->x_min);
    EXPECT_EQ(a.bbox[1], box->y_min);
    EXPECT_EQ(a.bbox[2], box->width());
    EXPECT_EQ(a.bbox[3], box->height());
    EXPECT_EQ(a.area, static_cast<double>(oracle::area(m)));
  }
}

TEST(InferView, TokenRule) {
  EXPECT_EQ(infer_view("1640_03_02.png"), ViewSide::Right);
  EXPECT_EQ(infer_view("1641_03_02.png"), ViewSide::Left);
  EXPECT_EQ(infer_view("a.png"), ViewSide::Left);
  EXPECT_EQ(infer_view("dir/20.png"), ViewSide::Right);
  EXPECT_EQ(infer_view("x_0.png"), ViewSide::Left);
}

TEST(Rng, SameKeySameSequence) {
  RngStream a(5, 7, "view_paste"), b(5, 7, "view_paste"), c(5, 7, "geometric");
  bool differs = false;
  for (int k = 0; k < 100; ++k) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differs |= x != c.next();
  }
  EXPECT_TRUE(differs);
  RngStream d(1);
  for (int k = 0; k < 1000; ++k) {
    const auto v = d.uniform_int(-3, 4);
    EXPECT_GE(v, -3);
    EXPECT_LE(v, 4);
    const double r = d.uniform_real(2.0, 2.5);
    EXPECT_GE(r, 2.0);
    EXPECT_LT(r, 2.5);
  }
}

TEST(Config, JsonRoundTripAndStrictness) {
  AugmentConfig c;
  c.seed = 99;
  c.pure_ball_palette.push_back({"orange", {200, 230}, {90, 120}, {0, 30}});
  c.photometric.contrast = {0.8, 1.2};
  EXPECT_EQ(config_from_json(config_to_json(c)), c);
  Json j = config_to_json(c);
  j["persons_per_imag"] = Json::array({1, 2});
  EXPECT_THROW(config_from_json(j), Error);
  AugmentConfig bad;
  bad.pure_ball_prob = 1.5;
  EXPECT_THROW(validate_config(bad), Error);
  bad = AugmentConfig{};
  bad.balls_per_image = {3, 1};
  EXPECT_THROW(validate_config(bad), Error);
  bad = AugmentConfig{};
  bad.duplication_factor = 0;
  EXPECT_THROW(validate_config(bad), Error);
  EXPECT_NO_THROW(validate_config(AugmentConfig{}));
}

TEST(ViewPaste, ClosedFormBounds) {
  const BoxD r = view_paste_bounds(ViewSide::Right, 1920, 1440);
  EXPECT_EQ(r.x_min, 384);
  EXPECT_EQ(r.x_max, 1920);
  EXPECT_EQ(r.y_min, 432);
  EXPECT_EQ(r.y_max, 1008);
  const BoxD l = view_paste_bounds(ViewSide::Left, 1920, 1440);
  EXPECT_EQ(l.x_min, 0);
  EXPECT_EQ(l.x_max, 1536);
}

TEST(ViewPaste, FuzzStaysInInterval) {
  const Mask patch = Mask::Ones(30, 12);
  for (ViewSide view : {ViewSide::Left, ViewSide::Right}) {
    RngStream rng(3, 0, to_string(view));
    int hit_hi = 0;
    for (int k = 0; k < 10000; ++k) {
      const auto p = sample_view_paste_location(view, 1920, 1440, patch, rng);
      if (view == ViewSide::Right) {
        ASSERT_GE(p.x(), 384);
        ASSERT_LE(p.x(), 1920);
      } else {
        ASSERT_GE(p.x(), 0);
        ASSERT_LE(p.x(), 1536);
      }
      ASSERT_GE(p.y(), 432);
      ASSERT_LE(p.y(), 1008);
      ASSERT_GT(visible_area(patch, p, 1920, 1440), 0);
      hit_hi += p.x() == 1919;
    }
    if (view == ViewSide::Right) {
      EXPECT_GT(hit_hi, 0);
    }
  }
}

TEST(ViewPaste, Exhaustion) {
  // Every anchor in the Right interval of a 5-wide canvas at x = 5 is off-canvas
  // only for x == 5; force failure with a mask whose first column is empty.
  Mask patch = Mask::Zero(1, 6);
  patch(0, 5) = 1;
  RngStream rng(1);
  try {
    sample_view_paste_location(ViewSide::Right, 5, 5, patch, rng, 25);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SamplingExhausted);
  }
}

TEST(ViewPaste, ClippedVisibleBoxStaysInInterval) {
  // Only the bottom-left pixel is set outside the first column, so clipping
  // at the right edge would push the visible top edge down.
  Mask patch = Mask::Zero(200, 40);
  patch.col(0).setOnes();
  patch.col(0).head(199).setZero();
  patch.row(0).tail(39).setOnes();
  RngStream rng(11);
  for (int k = 0; k < 1000; ++k) {
    const auto p = sample_view_paste_location(ViewSide::Right, 1920, 1440, patch, rng);
    Mask canvas = place_patch(patch, p, 1920, 1440);
    const auto box = mask_bbox(canvas);
    ASSERT_TRUE(box.has_value());
    ASSERT_GE(box->x_min, 384);
    ASSERT_LE(box->x_min, 1920);
    ASSERT_GE(box->y_min, 432);
    ASSERT_LE(box->y_min, 1008);
  }
}

TEST(InteractionPaste, BoxIntervals) {
  RngStream rng(2);
  const BoxI person{100, 200, 150, 400};
  std::set<int> xs;
  for (int k = 0; k < 10000; ++k) {
    const auto p = sample_interaction_location(person, rng);
    ASSERT_GE(p.x(), 100);
    ASSERT_LE(p.x(), 150);
    ASSERT_GE(p.y(), 200);
    ASSERT_LE(p.y(), 400);
    xs.insert(p.x());
  }
  EXPECT_EQ(xs.size(), 51u);
  const BoxI thin{100, 200, 100, 400};
  for (int k = 0; k < 100; ++k) EXPECT_EQ(sample_interaction_location(thin, rng).x(), 100);
}

TEST(PureBall, BrownRangesAndMaskUntouched) {
  const ObjectPatch ball = disc_patch(10);
  const PaletteEntry brown{"brown", {80, 90}, {50, 60}, {50, 60}};
  RngStream rng(4);
  for (int k = 0; k < 200; ++k) {
    const ObjectPatch out = recolor_pure_ball(ball, brown, rng);
    EXPECT_TRUE((out.mask == ball.mask).all());
    const std::uint8_t r = out.pixels[0](10, 10), g = out.pixels[1](10, 10), b = out.pixels[2](10, 10);
    EXPECT_GE(r, 80);
    EXPECT_LE(r, 90);
    EXPECT_GE(g, 50);
    EXPECT_LE(g, 60);
    EXPECT_GE(b, 50);
    EXPECT_LE(b, 60);
    for (int y = 0; y < ball.height(); ++y)
      for (int x = 0; x < ball.width(); ++x)
        for (int c = 0; c < 3; ++c) {
          if (ball.mask(y, x)) {
            ASSERT_EQ(out.pixels[c](y, x), out.pixels[c](10, 10));  // one flat triple
          } else {
            ASSERT_EQ(out.pixels[c](y, x), ball.pixels[c](y, x));
          }
        }
  }
}

TEST(PasteObjects, ZeroCountsIsIdentity) {
  Scene scene = empty_scene(200, 150);
  const RgbImage before = scene.image;
  RngStream rng(1);
  const auto bank = small_bank();
  const auto log = paste_objects(scene, bank, ViewSide::Right, kRoles, zero_paste_config(), rng);
  EXPECT_TRUE(log.empty());
  EXPECT_TRUE(scene.image == before);
  EXPECT_TRUE(scene.instances.empty());
}

TEST(PasteObjects, SingleBallLandsInInterval) {
  AugmentConfig c = zero_paste_config();
  c.balls_per_image = {1, 1};
  const std::vector<ObjectPatch> bank{disc_patch(8)};
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    Scene scene = empty_scene(1920, 1440);
    RngStream rng(seed);
    const ViewSide view = seed % 2 ? ViewSide::Left : ViewSide::Right;
    const auto log = paste_objects(scene, bank, view, kRoles, c, rng);
    ASSERT_EQ(scene.instances.size(), 1u);
    const auto ann = scene_annotations(scene);
    const BoxD bounds = view_paste_bounds(view, 1920, 1440);
    EXPECT_GE(ann[0].bbox[0], bounds.x_min);
    EXPECT_LE(ann[0].bbox[0], bounds.x_max);
    EXPECT_GE(ann[0].bbox[1], bounds.y_min);
    EXPECT_LE(ann[0].bbox[1], bounds.y_max);
    EXPECT_EQ(log[0].position.x(), ann[0].bbox[0]);
    EXPECT_EQ(log[0].stage, "view");
  }
}

TEST(PasteObjects, EmptyBank) {
  Scene scene = empty_scene(200, 150);
  RngStream rng(1);
  const std::vector<ObjectPatch> only_balls{disc_patch(5)};
  try {
    paste_objects(scene, only_balls, ViewSide::Left, kRoles, AugmentConfig{}, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyBank);
  }
}

TEST(PasteObjects, FullCoverRemovesPerson) {
  Scene scene = empty_scene(100, 100);
  scene.instances.push_back({1, kHuman, rect_mask(100, 100, 40, 40, 50, 60), false, {}});
  const ObjectPatch big = solid_patch(kHuman, 20, 30, 5);
  const auto rec = paste_patch(scene, big, Eigen::Vector2i(35, 35));
  ASSERT_EQ(scene.instances.size(), 1u);
  EXPECT_EQ(rec.pasted_box, (BoxI{35, 35, 55, 65}));
  EXPECT_EQ(scene.image[0](50, 45), 5);
}

TEST(PasteObjects, OcclusionDisjointness) {
  AugmentConfig c;
  c.persons_per_image = {3, 3};
  c.balls_per_image = {2, 2};
  const auto bank = small_bank();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Scene scene = empty_scene(240, 180);
    RngStream rng(seed);
    paste_objects(scene, bank, ViewSide::Right, kRoles, c, rng);
    for (std::size_t a = 0; a < scene.instances.size(); ++a) {
      EXPECT_GT(mask_area(scene.instances[a].mask), 0);
      for (std::size_t b = a + 1; b < scene.instances.size(); ++b)
        EXPECT_EQ(oracle::area((scene.instances[a].mask * scene.instances[b].mask).eval()), 0);
    }
    expect_consistent(scene);
  }
}

TEST(InteractionPaste, NoPersonsIsNoop) {
  Scene scene = empty_scene(200, 150);
  scene.instances.push_back({1, kBall, rect_mask(200, 150, 5, 5, 9, 9), false, {}});
  RngStream rng(1);
  const auto bank = small_bank();
  EXPECT_TRUE(paste_interaction_balls(scene, bank, kRoles, AugmentConfig{}, rng).empty());
  EXPECT_EQ(scene.instances.size(), 1u);
}

TEST(InteractionPaste, BallAnchoredInPersonBox) {
  AugmentConfig c;
  c.interaction_persons = {1, 1};
  const std::vector<ObjectPatch> bank{disc_patch(6)};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Scene scene = empty_scene(640, 480);
    scene.instances.push_back({1, kHuman, rect_mask(640, 480, 100, 200, 151, 401), false, {}});
    RngStream rng(seed);
    const auto log = paste_interaction_balls(scene, bank, kRoles, c, rng);
    ASSERT_EQ(log.size(), 1u);
    EXPECT_EQ(log[0].stage, "interaction");
    const auto ann = scene_annotations(scene);
    const auto& ball = ann.back();
    EXPECT_EQ(ball.category_id, kBall);
    EXPECT_GE(ball.bbox[0], 100);
    EXPECT_LE(ball.bbox[0], 151);
    EXPECT_GE(ball.bbox[1], 200);
    EXPECT_LE(ball.bbox[1], 401);
  }
}

TEST(InteractionPaste, DeterministicLog) {
  AugmentConfig c;
  c.interaction_persons = {1, 2};
  const auto bank = small_bank();
  auto run = [&] {
    Scene scene = empty_scene(640, 480);
    scene.instances.push_back({1, kHuman, rect_mask(640, 480, 100, 200, 150, 400), false, {}});
    scene.instances.push_back({2, kHuman, rect_mask(640, 480, 300, 100, 340, 300), false, {}});
    RngStream rng(77, 1, "interaction_paste");
    return paste_interaction_balls(scene, bank, kRoles, c, rng);
  };
  EXPECT_EQ(run(), run());
}

TEST(Geometric, ZeroTranslationIsIdentity) {
  Scene scene = empty_scene(120, 90);
  scene.instances.push_back({1, kHuman, rect_mask(120, 90, 10, 20, 40, 70), false, {}});
  scene.image[0](30, 30) = 250;
  const Scene before = scene;
  apply_affine(scene, translation(0, 0));
  EXPECT_TRUE(scene.image == before.image);
  EXPECT_TRUE((scene.instances[0].mask == before.instances[0].mask).all());
}

TEST(Geometric, RotateNinetyKeepsArea) {
  Scene scene = empty_scene(200, 200);
  scene.instances.push_back({1, kHuman, rect_mask(200, 200, 70, 60, 130, 140), false, {}});
  const auto before = mask_area(scene.instances[0].mask);
  apply_affine(scene, rotation_about_center(90, 200, 200));
  const auto after = mask_area(scene.instances[0].mask);
  EXPECT_LE(std::abs(after - before), 0.02 * before);
  EXPECT_EQ(mask_bbox(scene.instances[0].mask), (BoxI{60, 70, 140, 130}));
}

TEST(Geometric, DropsInstancesMovedOffCanvas) {
  Scene scene = empty_scene(100, 100);
  scene.instances.push_back({1, kHuman, rect_mask(100, 100, 0, 0, 10, 10), false, {}});
  scene.instances.push_back({2, kBall, rect_mask(100, 100, 50, 50, 60, 60), false, {}});
  apply_affine(scene, translation(-20, 0));
  ASSERT_EQ(scene.instances.size(), 1u);
  EXPECT_EQ(scene.instances[0].id, 2);
  EXPECT_EQ(mask_bbox(scene.instances[0].mask), (BoxI{30, 50, 40, 60}));
  EXPECT_EQ(scene.image[0](50, 95), 0);  // black fill
}

TEST(Geometric, RandomTransformsStayConsistent) {
  const auto synth = generate_scene({320, 240, 5, 1, ViewSide::Left, 3, 0.5, 1});
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Scene scene = make_scene(synth.record, synth.image, synth.annotations);
    RngStream rng(seed);
    GeometricKind kind;
    apply_affine(scene, draw_geometric(AugmentConfig{}.geometric, 320, 240, rng, &kind));
    expect_consistent(scene);
  }
}

TEST(Photometric, IdentityParameters) {
  const auto synth = generate_scene({160, 120, 3, 1, ViewSide::Left, 3, 0.0, 1});
  RgbImage img = synth.image;
  apply_photometric(img, PhotometricParams{});
  EXPECT_TRUE(img == synth.image);
}

TEST(Photometric, BrightnessIsAdditive) {
  RgbImage img(8, 8);
  img.fill(100, 100, 100);
  apply_photometric(img, PhotometricParams{10.0, 1.0, 1.0, 0.0});
  for (int c = 0; c < 3; ++c) EXPECT_TRUE((img[c] == 110).all());
}

TEST(Photometric, FuzzStaysInRangeAndGrayIsHueInvariant) {
  const auto synth = generate_scene({96, 72, 3, 1, ViewSide::Left, 5, 0.0, 1});
  RngStream rng(8);
  for (int k = 0; k < 50; ++k) {
    RgbImage img = synth.image;
    PhotometricConfig wide;
    wide.brightness_delta = 200;
    wide.contrast = {0.0, 3.0};
    wide.saturation = {0.0, 3.0};
    wide.hue_deg = 180;
    apply_photometric(img, draw_photometric(wide, rng));
    EXPECT_EQ(img.width(), 96);
  }
  RgbImage gray(4, 4);
  gray.fill(77, 77, 77);
  apply_photometric(gray, PhotometricParams{0.0, 1.0, 1.0, 90.0});
  EXPECT_TRUE((gray[0] == 77).all());
}

TEST(ResizeCropPad, FixedPoint) {
  const auto synth = generate_scene({1920, 1440, 4, 1, ViewSide::Right, 1, 0.0, 1});
  Scene scene = make_scene(synth.record, synth.image, synth.annotations);
  RngStream rng(1);
  resize_crop_pad(scene, ResizeConfig{}, rng, 1440);
  EXPECT_TRUE(scene.image == synth.image);
  const auto anns = scene_annotations(scene);
  ASSERT_EQ(anns.size(), synth.annotations.size());
  for (std::size_t k = 0; k < anns.size(); ++k)
    EXPECT_EQ(std::get<Rle>(anns[k].segmentation), std::get<Rle>(synth.annotations[k].segmentation));
}

TEST(ResizeCropPad, OutputSizeAndLongSideCap) {
  RngStream rng(5);
  const ResizeConfig cfg;
  for (int k = 0; k < 15; ++k) {
    const int w = static_cast<int>(rng.uniform_int(20, 400));
    const int h = static_cast<int>(rng.uniform_int(20, 400));
    Scene scene = empty_scene(w, h);
    scene.instances.push_back({1, kHuman, Mask::Ones(h, w), false, {}});
    const int s = static_cast<int>(rng.uniform_int(cfg.short_side.lo, cfg.short_side.hi));
    resize_crop_pad(scene, cfg, rng, s);
    ASSERT_EQ(scene.width(), 1920);
    ASSERT_EQ(scene.height(), 1440);
    EXPECT_EQ(scene.record.width, 1920);
    const double scale = std::min(double(s) / std::min(w, h), 3680.0 / std::max(w, h));
    EXPECT_LE(std::lround(std::max(w, h) * scale), 3680);
    // The full-frame mask shows the scaled extent wherever no crop happened.
    const BoxI box = *mask_bbox(scene.instances[0].mask);
    EXPECT_EQ(box.x_min, 0);
    EXPECT_EQ(box.y_min, 0);
    EXPECT_EQ(box.width(), std::min<long>(1920, std::lround(w * scale)));
    EXPECT_EQ(box.height(), std::min<long>(1440, std::lround(h * scale)));
    expect_consistent(scene);
  }
}

TEST(DuplicateDataset, FactorOneAndCounts) {
  std::vector<SyntheticScene> scenes = generate_scenes(3, {64, 48, 2, 1, ViewSide::Right, 2, 0, 1});
  const DatasetDoc doc = corpus_doc(scenes);
  EXPECT_EQ(duplicate_dataset(doc, 1), doc);
  const DatasetDoc ten = duplicate_dataset(doc, 10);
  EXPECT_EQ(ten.images.size(), 30u);
  EXPECT_EQ(ten.annotations.size(), doc.annotations.size() * 10);
  EXPECT_TRUE(validate_dataset(ten).empty());
  EXPECT_EQ(ten.images[3].file_name, doc.images[0].file_name);
  try {
    duplicate_dataset(doc, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
  DatasetDoc huge = doc;
  huge.images[0].id = std::numeric_limits<std::int64_t>::max() - 1;
  for (auto& a : huge.annotations)
    if (a.image_id == 1) a.image_id = huge.images[0].id;
  try {
    duplicate_dataset(huge, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IdOverflow);
  }
}

TEST(AugmentImage, EmptyBankZeroCountsEqualsBaseTransform) {
  const auto synth = generate_scene({160, 120, 3, 1, ViewSide::Right, 9, 0.0, 4});
  AugmentConfig c = zero_paste_config();
  c.seed = 12;
  const Scene scene = make_scene(synth.record, synth.image, synth.annotations);
  const auto result = augment_image(scene, {}, kRoles, c);
  Scene expected = scene;
  RngStream g(12, 4, "geometric"), p(12, 4, "photometric");
  apply_geometric(expected, c, g);
  apply_photometric(expected.image, c, p);
  EXPECT_TRUE(result.scene.image == expected.image);
  EXPECT_EQ(scene_annotations(result.scene), scene_annotations(expected));
  EXPECT_TRUE(result.log.empty());
}

TEST(AugmentImage, DeterministicAndValid) {
  const auto synth = generate_scene({320, 240, 4, 1, ViewSide::Left, 9, 0.3, 2});
  std::vector<ObjectPatch> bank = small_bank();
  AugmentConfig c;
  c.seed = 3;
  const Scene scene = make_scene(synth.record, synth.image, synth.annotations);
  const auto a = augment_image(scene, bank, kRoles, c);
  const auto b = augment_image(scene, bank, kRoles, c);
  EXPECT_TRUE(a.scene.image == b.scene.image);
  EXPECT_EQ(scene_annotations(a.scene), scene_annotations(b.scene));
  EXPECT_EQ(a.log, b.log);
  DatasetDoc doc;
  doc.images = {a.scene.record};
  doc.categories = synth_categories();
  doc.annotations = scene_annotations(a.scene);
  EXPECT_TRUE(validate_dataset(doc, {.require_tight_bbox = true}).empty());
}

}  // namespace
}  // namespace courtaug
