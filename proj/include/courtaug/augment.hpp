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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "courtaug/coco_io.hpp"
#include "courtaug/object_bank.hpp"
#include "courtaug/raster.hpp"
#include "courtaug/rng.hpp"

namespace courtaug {

enum class ViewSide { Left, Right };

std::string_view to_string(ViewSide view);

// Stem up to the first '_' is the prefix token; a token ending in '0' means
// the right-hand camera, anything else the left-hand one.
ViewSide infer_view(std::string_view file_name);

template <typename T>
struct Range {
  T lo{};
  T hi{};
  bool operator==(const Range&) const = default;
};

struct PaletteEntry {
  std::string name;
  Range<int> r, g, b;
  bool operator==(const PaletteEntry&) const = default;
};

// Symmetric magnitudes: rotation is drawn from [-rotate_deg, rotate_deg], etc.
struct GeometricConfig {
  double rotate_deg = 10.0;
  double shear = 0.1;
  double translate_frac = 0.1;
  bool operator==(const GeometricConfig&) const = default;
};

struct PhotometricConfig {
  double brightness_delta = 32.0;  // 8-bit scale
  Range<double> contrast{0.5, 1.5};
  Range<double> saturation{0.5, 1.5};
  double hue_deg = 18.0;
  bool operator==(const PhotometricConfig&) const = default;
};

struct ResizeConfig {
  Range<int> short_side{820, 3080};
  int long_side_max = 3680;
  int target_width = 1920;
  int target_height = 1440;
  bool operator==(const ResizeConfig&) const = default;
};

struct AugmentConfig {
  std::uint64_t seed = 0;
  Range<int> persons_per_image{1, 3};
  Range<int> balls_per_image{1, 2};
  Range<int> interaction_persons{1, 2};
  double pure_ball_prob = 0.5;
  std::vector<PaletteEntry> pure_ball_palette{{"brown", {80, 90}, {50, 60}, {50, 60}}};
  GeometricConfig geometric;
  PhotometricConfig photometric;
  ResizeConfig resize;
  int duplication_factor = 10;
  int max_resample_attempts = 25;
  std::string person_category = "human";
  std::string ball_category = "ball";

  bool operator==(const AugmentConfig&) const = default;
};

// Throws ConfigError on empty ranges, probabilities outside [0, 1], etc.
void validate_config(const AugmentConfig& config);
Json config_to_json(const AugmentConfig& config);
// Missing keys keep their defaults; unknown keys are a ConfigError.
AugmentConfig config_from_json(const Json& j);

// One object instance of a scene, carried as a dense canvas-sized mask.
struct Instance {
  std::int64_t id = 0;
  std::int64_t category_id = 0;
  Mask mask;
  bool iscrowd = false;
  Json extra = Json::object();
};

struct Scene {
  ImageRecord record;
  RgbImage image;
  std::vector<Instance> instances;

  int width() const { return image.width(); }
  int height() const { return image.height(); }
  std::int64_t next_instance_id() const;
};

// Builds a scene from the annotations of `record` (others are ignored).
// Throws DimensionMismatch if `image` disagrees with the record.
Scene make_scene(const ImageRecord& record, RgbImage image,
                 std::span<const AnnotationRecord> annotations);
// RLE segmentation with bbox and area recomputed from each mask.
std::vector<AnnotationRecord> scene_annotations(const Scene& scene);

struct CategoryRoles {
  std::optional<std::int64_t> person;
  std::optional<std::int64_t> ball;
};

CategoryRoles resolve_roles(const DatasetDoc& doc, const AugmentConfig& config);

struct PasteRecord {
  std::string stage;  // "view" or "interaction"
  std::int64_t category_id = 0;
  std::size_t bank_index = 0;
  Eigen::Vector2i position{0, 0};
  BoxI pasted_box;  // visible extent right after compositing
  bool recolored = false;
  std::optional<BoxI> person_box;  // interaction pastes: the targeted person

  bool operator==(const PasteRecord& o) const {
    return stage == o.stage && category_id == o.category_id && bank_index == o.bank_index &&
           position == o.position && pasted_box == o.pasted_box && recolored == o.recolored &&
           person_box == o.person_box;
  }
};

using PasteLog = std::vector<PasteRecord>;

// Allowed (x_min, y_min) region of a view-specific paste, as real intervals:
// x in [w/5, w] (right view) or [0, w - w/5] (left view), and
// y in [h/2 - h/5, h/2 + h/5]. Stored as a box of the two intervals.
BoxD view_paste_bounds(ViewSide view, int width, int height);

// Uniform integer anchor inside view_paste_bounds, redrawn while the patch
// would have no visible pixel or its visible top-left would leave the bounds.
// Throws SamplingExhausted.
Eigen::Vector2i sample_view_paste_location(ViewSide view, int width, int height,
                                           const Mask& patch_mask, RngStream& rng,
                                           int max_attempts = 25);

// Uniform integer anchor in [x_min, x_max] x [y_min, y_max] of the person box.
Eigen::Vector2i sample_interaction_location(const BoxI& person_box, RngStream& rng);

// Flat recolor: one (R, G, B) triple drawn from the entry's ranges is written
// to every masked pixel. The mask and unmasked pixels stay as they are.
ObjectPatch recolor_pure_ball(const ObjectPatch& patch, const PaletteEntry& entry,
                              RngStream& rng);

// Pastes `patch` at `position` on top of everything in the scene.
PasteRecord paste_patch(Scene& scene, const ObjectPatch& patch, const Eigen::Vector2i& position);

PasteLog paste_objects(Scene& scene, std::span<const ObjectPatch> bank, ViewSide view,
                       const CategoryRoles& roles, const AugmentConfig& config, RngStream& rng);

PasteLog paste_interaction_balls(Scene& scene, std::span<const ObjectPatch> bank,
                                 const CategoryRoles& roles, const AugmentConfig& config,
                                 RngStream& rng);

enum class GeometricKind { Shear, Rotate, Translate };

Eigen::Affine2d rotation_about_center(double degrees, int width, int height);
Eigen::Affine2d shear_about_center(double factor, int width, int height);
Eigen::Affine2d translation(double dx, double dy);

// Picks one of shear/rotate/translate uniformly and draws its parameter.
Eigen::Affine2d draw_geometric(const GeometricConfig& config, int width, int height,
                               RngStream& rng, GeometricKind* chosen = nullptr);

// Maps pixel-boundary source coordinates to destination coordinates. Pixels
// are resampled bilinearly with black fill, masks by nearest neighbour;
// instances left with no pixels are dropped.
void apply_affine(Scene& scene, const Eigen::Affine2d& transform);
void apply_geometric(Scene& scene, const AugmentConfig& config, RngStream& rng);

struct PhotometricParams {
  double brightness = 0.0;
  double contrast = 1.0;
  double saturation = 1.0;
  double hue_deg = 0.0;
};

PhotometricParams draw_photometric(const PhotometricConfig& config, RngStream& rng);
// Brightness, contrast, saturation, hue, in that order.
void apply_photometric(RgbImage& image, const PhotometricParams& params);
void apply_photometric(RgbImage& image, const AugmentConfig& config, RngStream& rng);

// Random isotropic rescale of the short side (long side capped), then a
// random crop and top-left anchored black pad to the target size.
void resize_crop_pad(Scene& scene, const ResizeConfig& config, RngStream& rng,
                     std::optional<int> forced_short_side = std::nullopt);

// `factor` copies of every image and annotation with fresh ids. Copy k's ids
// are offset by k times the id span of the input.
DatasetDoc duplicate_dataset(const DatasetDoc& doc, int factor);

struct AugmentResult {
  Scene scene;
  PasteLog log;
};

// View paste, interaction paste, geometric, photometric, each with its own
// stream keyed by (config.seed, scene.record.id, stage).
AugmentResult augment_image(Scene scene, std::span<const ObjectPatch> bank,
                            const CategoryRoles& roles, const AugmentConfig& config);

}  // namespace courtaug
