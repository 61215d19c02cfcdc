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

#include <cstdint>
#include <string>
#include <vector>

#include "courtaug/augment.hpp"
#include "courtaug/coco_io.hpp"
#include "courtaug/raster.hpp"

namespace courtaug {

inline constexpr std::int64_t kSynthHumanCategory = 1;
inline constexpr std::int64_t kSynthBallCategory = 2;

struct SceneSpec {
  int width = 1920;
  int height = 1440;
  int n_persons = 4;
  int n_balls = 1;  // 0 or 1
  ViewSide view = ViewSide::Right;
  std::uint64_t seed = 0;
  double occlusion_prob = 0.0;  // chance a person may overlap earlier objects
  std::int64_t image_id = 1;
};

struct SyntheticScene {
  RgbImage image;
  ImageRecord record;
  std::vector<AnnotationRecord> annotations;  // ids 1..n within the scene
  std::vector<double> ball_radii;             // analytic radius of each ball, in order
};

std::vector<CategoryRecord> synth_categories();

// File name whose prefix token encodes the view ("1010_00_001.png" is a
// right-view name, "1021_01_002.png" a left-view one).
std::string synth_file_name(std::int64_t image_id, ViewSide view);

// Court-like scene: an auditorium band over the top fifth, a banded floor,
// rectangle-plus-ellipse persons centred in the middle vertical band and
// circular balls. Masks are exact pixel-centre rasterisations; later objects
// occlude earlier ones. Deterministic in (seed, image_id).
SyntheticScene generate_scene(const SceneSpec& spec);

// Spec of the `index`-th corpus scene: id index + 1, right view on even indices.
SceneSpec corpus_scene_spec(const SceneSpec& base, int index);

// `n_images` scenes with alternating views (right first) and ids 1..n;
// annotation ids are renumbered to be unique across the corpus.
std::vector<SyntheticScene> generate_scenes(int n_images, const SceneSpec& base);
DatasetDoc corpus_doc(const std::vector<SyntheticScene>& scenes);

// Writes <out_dir>/images/*.png and returns the combined doc (not written).
// Throws IoFailure.
DatasetDoc generate_corpus(int n_images, const SceneSpec& base, const std::string& out_dir);

}  // namespace courtaug
