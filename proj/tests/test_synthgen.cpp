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
#include <filesystem>
#include <numbers>

#include <gtest/gtest.h>

#include "courtaug/image_io.hpp"
#include "courtaug/synthgen.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace courtaug {
namespace {

using testing_util::TempDir;

TEST(GenerateScene, BackgroundOnly) {
  const auto s = generate_scene({320, 240, 0, 0, ViewSide::Left, 1, 0.0, 1});
  EXPECT_TRUE(s.annotations.empty());
  EXPECT_EQ(s.image.width(), 320);
  EXPECT_EQ(s.image.height(), 240);
}

TEST(GenerateScene, BallAreaNearAnalyticDisc) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = generate_scene({1920, 1440, 3, 1, ViewSide::Right, seed, 0.0, 1});
    ASSERT_EQ(s.ball_radii.size(), 1u);
    int balls = 0;
    for (const auto& a : s.annotations) {
      if (a.category_id != kSynthBallCategory) continue;
      ++balls;
      const double r = s.ball_radii[0];
      const double analytic = std::numbers::pi * r * r;
      const double area = static_cast<double>(oracle::area(rle_decode(std::get<Rle>(a.segmentation))));
      EXPECT_NEAR(area, analytic, 0.02 * analytic) << "seed " << seed;
    }
    EXPECT_EQ(balls, 1);
  }
}

TEST(GenerateScene, DeterministicAndValid) {
  const SceneSpec spec{640, 480, 6, 1, ViewSide::Left, 17, 0.5, 3};
  const auto a = generate_scene(spec), b = generate_scene(spec);
  EXPECT_TRUE(a.image == b.image);
  EXPECT_EQ(a.annotations, b.annotations);
  DatasetDoc doc;
  doc.images = {a.record};
  doc.categories = synth_categories();
  doc.annotations = a.annotations;
  EXPECT_TRUE(validate_dataset(doc, {.require_tight_bbox = true}).empty());
}

TEST(GenerateScene, PersonsInCentralBand) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = generate_scene({1920, 1440, 6, 0, ViewSide::Right, seed, 0.0, 1});
    for (const auto& a : s.annotations) {
      ASSERT_EQ(a.category_id, kSynthHumanCategory);
      const double cy = a.bbox[1] + a.bbox[3] / 2.0;
      EXPECT_GE(cy, 1440 / 2.0 - 1440 / 5.0 - 1);
      EXPECT_LE(cy, 1440 / 2.0 + 1440 / 5.0 + 1);
    }
  }
}

TEST(GenerateScene, FileNameEncodesView) {
  for (std::int64_t id = 1; id < 30; ++id) {
    for (ViewSide v : {ViewSide::Left, ViewSide::Right}) {
      EXPECT_EQ(infer_view(synth_file_name(id, v)), v);
    }
  }
}

TEST(GenerateCorpus, FilesAndDoc) {
  TempDir dir("corpus");
  const DatasetDoc doc = generate_corpus(10, {160, 120, 3, 1, ViewSide::Right, 2, 0.2, 1}, dir.str());
  ASSERT_EQ(doc.images.size(), 10u);
  EXPECT_TRUE(validate_dataset(doc, {.require_tight_bbox = true}).empty());
  int files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir.path() / "images")) {
    files += e.path().extension() == ".png";
  }
  EXPECT_EQ(files, 10);
  for (std::size_t k = 0; k < doc.images.size(); ++k) {
    EXPECT_EQ(infer_view(doc.images[k].file_name), k % 2 == 0 ? ViewSide::Right : ViewSide::Left);
    const RgbImage img = read_png_rgb((dir.path() / "images" / doc.images[k].file_name).string());
    EXPECT_TRUE(img == generate_scene(corpus_scene_spec({160, 120, 3, 1, ViewSide::Right, 2, 0.2, 1},
                                                        static_cast<int>(k)))
                           .image);
  }
}

}  // namespace
}  // namespace courtaug
