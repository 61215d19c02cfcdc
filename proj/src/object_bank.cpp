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
#include "courtaug/object_bank.hpp"

#include <cstdio>
#include <filesystem>
#include <unordered_map>

#include "courtaug/error.hpp"
#include "courtaug/image_io.hpp"

namespace fs = std::filesystem;

namespace courtaug {

ObjectPatch crop_object(const RgbImage& image, const Mask& mask) {
  ObjectPatch patch;
  const auto box = mask_bbox(mask);
  if (!box) return patch;
  const int w = box->width(), h = box->height();
  patch.mask = (mask.block(box->y_min, box->x_min, h, w) != 0).cast<std::uint8_t>();
  patch.pixels = RgbImage(w, h);
  for (int c = 0; c < 3; ++c) patch.pixels[c] = image[c].block(box->y_min, box->x_min, h, w);
  return patch;
}

std::vector<ObjectPatch> extract_bank(const DatasetDoc& doc, const ImageLoader& loader) {
  std::unordered_map<std::int64_t, std::vector<const AnnotationRecord*>> by_image;
  for (const auto& a : doc.annotations) by_image[a.image_id].push_back(&a);

  std::unordered_map<std::int64_t, ObjectPatch> patches;
  for (const auto& im : doc.images) {
    auto it = by_image.find(im.id);
    if (it == by_image.end()) continue;
    const RgbImage pixels = loader(im);
    if (pixels.width() != im.width || pixels.height() != im.height) {
      throw Error(ErrorKind::DimensionMismatch,
                  "image " + im.file_name + " is " + std::to_string(pixels.width()) + "x" +
                      std::to_string(pixels.height()) + ", record says " +
                      std::to_string(im.width) + "x" + std::to_string(im.height));
    }
    for (const AnnotationRecord* a : it->second) {
      const Mask mask = decode_segmentation(a->segmentation, im.width, im.height);
      ObjectPatch patch = crop_object(pixels, mask);
      if (patch.mask.size() == 0) continue;
      patch.category_id = a->category_id;
      patch.source_image_id = im.id;
      patch.source_annotation_id = a->id;
      patches.emplace(a->id, std::move(patch));
    }
  }
  std::vector<ObjectPatch> bank;
  bank.reserve(patches.size());
  for (const auto& a : doc.annotations) {
    auto it = patches.find(a.id);
    if (it != patches.end()) bank.push_back(std::move(it->second));
  }
  return bank;
}

Json manifest_to_json(const BankManifest& manifest) {
  Json entries = Json::array();
  for (const auto& e : manifest.entries) {
    entries.push_back({{"patch_file", e.patch_file},
                       {"mask_file", e.mask_file},
                       {"category_id", e.category_id},
                       {"source_image_id", e.source_image_id},
                       {"source_annotation_id", e.source_annotation_id},
                       {"width", e.width},
                       {"height", e.height}});
  }
  return Json{{"version", 1}, {"entries", std::move(entries)}};
}

BankManifest save_bank(const std::vector<ObjectPatch>& patches, const std::string& directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + directory + ": " + ec.message());
  BankManifest manifest;
  for (std::size_t k = 0; k < patches.size(); ++k) {
    const ObjectPatch& p = patches[k];
    char stem[32];
    std::snprintf(stem, sizeof stem, "%06zu", k);
    BankEntry e;
    e.patch_file = std::string("patch_") + stem + ".png";
    e.mask_file = std::string("mask_") + stem + ".png";
    e.category_id = p.category_id;
    e.source_image_id = p.source_image_id;
    e.source_annotation_id = p.source_annotation_id;
    e.width = p.width();
    e.height = p.height();
    write_png_rgb((fs::path(directory) / e.patch_file).string(), p.pixels);
    write_png_mask((fs::path(directory) / e.mask_file).string(), p.mask);
    manifest.entries.push_back(std::move(e));
  }
  write_text_file((fs::path(directory) / kBankManifestName).string(),
                  manifest_to_json(manifest).dump(2) + "\n");
  return manifest;
}

std::vector<ObjectPatch> load_bank(const std::string& directory) {
  const fs::path manifest_path = fs::path(directory) / kBankManifestName;
  if (!fs::exists(manifest_path)) {
    throw Error(ErrorKind::ManifestMissing, "no bank manifest at " + manifest_path.string());
  }
  Json root;
  try {
    root = Json::parse(read_text_file(manifest_path.string()));
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::CorruptEntry, "unreadable bank manifest: " + std::string(e.what()));
  }
  if (!root.is_object() || !root.contains("entries") || !root["entries"].is_array()) {
    throw Error(ErrorKind::CorruptEntry, "bank manifest has no entries array");
  }
  std::vector<ObjectPatch> bank;
  const Json& entries = root["entries"];
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const std::string where = "bank entry " + std::to_string(k);
    BankEntry e;
    try {
      const Json& j = entries[k];
      e.patch_file = j.at("patch_file").get<std::string>();
      e.mask_file = j.at("mask_file").get<std::string>();
      e.category_id = j.at("category_id").get<std::int64_t>();
      e.source_image_id = j.at("source_image_id").get<std::int64_t>();
      e.source_annotation_id = j.at("source_annotation_id").get<std::int64_t>();
      e.width = j.at("width").get<int>();
      e.height = j.at("height").get<int>();
    } catch (const Json::exception& ex) {
      throw Error(ErrorKind::CorruptEntry, where + ": " + ex.what());
    }
    ObjectPatch p;
    try {
      p.pixels = read_png_rgb((fs::path(directory) / e.patch_file).string());
      p.mask = read_png_mask((fs::path(directory) / e.mask_file).string());
    } catch (const Error& ex) {
      throw Error(ErrorKind::CorruptEntry, where + " (" + e.patch_file + "): " + ex.what());
    }
    if (p.width() != e.width || p.height() != e.height || p.mask.cols() != e.width ||
        p.mask.rows() != e.height) {
      throw Error(ErrorKind::CorruptEntry,
                  where + " (" + e.patch_file + "): dimensions disagree with manifest");
    }
    p.category_id = e.category_id;
    p.source_image_id = e.source_image_id;
    p.source_annotation_id = e.source_annotation_id;
    bank.push_back(std::move(p));
  }
  return bank;
}

}  // namespace courtaug
