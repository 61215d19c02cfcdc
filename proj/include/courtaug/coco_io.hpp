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

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "courtaug/mask_ops.hpp"
#include "courtaug/raster.hpp"

namespace courtaug {

using Json = nlohmann::json;

struct ImageRecord {
  std::int64_t id = 0;
  std::string file_name;
  int width = 0;
  int height = 0;
  Json extra = Json::object();  // unrecognised keys, carried verbatim

  bool operator==(const ImageRecord&) const = default;
};

struct CategoryRecord {
  std::int64_t id = 0;
  std::string name;
  Json extra = Json::object();

  bool operator==(const CategoryRecord&) const = default;
};

// COCO polygon: flat [x0, y0, x1, y1, ...].
using FlatPolygon = std::vector<double>;
using Segmentation = std::variant<std::vector<FlatPolygon>, Rle>;

struct AnnotationRecord {
  std::int64_t id = 0;
  std::int64_t image_id = 0;
  std::int64_t category_id = 0;
  std::array<double, 4> bbox{};  // x, y, w, h
  Segmentation segmentation = Rle{};
  double area = 0.0;
  bool iscrowd = false;
  Json extra = Json::object();

  BoxD box() const { return BoxD::from_xywh(bbox[0], bbox[1], bbox[2], bbox[3]); }

  bool operator==(const AnnotationRecord&) const = default;
};

struct DatasetDoc {
  std::vector<ImageRecord> images;
  std::vector<CategoryRecord> categories;
  std::vector<AnnotationRecord> annotations;
  Json extra = Json::object();  // unknown top-level keys ("info", "licenses", ...)

  bool operator==(const DatasetDoc&) const = default;

  const ImageRecord* find_image(std::int64_t id) const;
  const CategoryRecord* find_category(std::int64_t id) const;
  // First category with this name, or nullptr.
  const CategoryRecord* find_category(std::string_view name) const;
};

// Throws MalformedDocument, BrokenReference or GeometryError.
DatasetDoc parse_dataset(std::string_view raw);
DatasetDoc parse_dataset(const Json& root);
inline DatasetDoc parse_dataset(const std::string& raw) { return parse_dataset(std::string_view(raw)); }
inline DatasetDoc parse_dataset(const char* raw) { return parse_dataset(std::string_view(raw)); }

// Keys are emitted in sorted order, so equal docs give byte-equal output.
std::string serialize_dataset(const DatasetDoc& doc);
Json dataset_to_json(const DatasetDoc& doc);

Json segmentation_to_json(const Segmentation& seg);
// `width`/`height` are used for polygons and string-form RLE without "size".
Segmentation segmentation_from_json(const Json& j, int width, int height);

// Dense mask of an annotation in the frame of its image.
Mask decode_segmentation(const Segmentation& seg, int width, int height);
std::vector<Polygon> to_polygons(const std::vector<FlatPolygon>& flat);

struct Violation {
  std::string record;  // "image", "category" or "annotation"
  std::int64_t record_id = 0;
  std::string rule;
  std::string detail;

  bool operator==(const Violation&) const = default;
};

struct ValidateOptions {
  // Also require bbox == tight box of the decoded mask (pipeline outputs).
  bool require_tight_bbox = false;
};

std::vector<Violation> validate_dataset(const DatasetDoc& doc, ValidateOptions options = {});

// Shifts every image id by `image_id_offset` and every annotation id by
// `annotation_id_offset`; annotations follow their images. Throws IdOverflow.
DatasetDoc reindex(const DatasetDoc& doc, std::int64_t image_id_offset,
                   std::int64_t annotation_id_offset);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace courtaug
