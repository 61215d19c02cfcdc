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
#include <functional>
#include <string>
#include <vector>

#include "courtaug/coco_io.hpp"
#include "courtaug/raster.hpp"

namespace courtaug {

// A tight crop of one annotated object, ready to be pasted elsewhere.
struct ObjectPatch {
  std::int64_t category_id = 0;
  RgbImage pixels;
  Mask mask;  // same size as `pixels`
  std::int64_t source_image_id = 0;
  std::int64_t source_annotation_id = 0;

  int width() const { return pixels.width(); }
  int height() const { return pixels.height(); }

  bool operator==(const ObjectPatch& other) const {
    return category_id == other.category_id && source_image_id == other.source_image_id &&
           source_annotation_id == other.source_annotation_id && pixels == other.pixels &&
           same_shape(mask, other.mask) && (mask == other.mask).all();
  }
};

struct BankEntry {
  std::string patch_file;  // relative to the manifest directory
  std::string mask_file;
  std::int64_t category_id = 0;
  std::int64_t source_image_id = 0;
  std::int64_t source_annotation_id = 0;
  int width = 0;
  int height = 0;

  bool operator==(const BankEntry&) const = default;
};

struct BankManifest {
  std::vector<BankEntry> entries;
};

inline constexpr const char* kBankManifestName = "manifest.json";

using ImageLoader = std::function<RgbImage(const ImageRecord&)>;

// One patch per annotation with a non-empty mask, cropped to the mask's tight
// box, in annotation order. Throws DimensionMismatch when a loaded image does
// not match its record; loader failures propagate.
std::vector<ObjectPatch> extract_bank(const DatasetDoc& doc, const ImageLoader& loader);

// Crop of `image` / `mask` to the tight box of `mask`; empty patch if the mask is empty.
ObjectPatch crop_object(const RgbImage& image, const Mask& mask);

BankManifest save_bank(const std::vector<ObjectPatch>& patches, const std::string& directory);
// Throws ManifestMissing or CorruptEntry.
std::vector<ObjectPatch> load_bank(const std::string& directory);

Json manifest_to_json(const BankManifest& manifest);

}  // namespace courtaug
