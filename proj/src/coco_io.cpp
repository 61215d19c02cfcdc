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
#include "courtaug/coco_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "courtaug/error.hpp"

namespace courtaug {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedDocument: return "MalformedDocument";
    case ErrorKind::BrokenReference: return "BrokenReference";
    case ErrorKind::GeometryError: return "GeometryError";
    case ErrorKind::IdOverflow: return "IdOverflow";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DegeneratePolygon: return "DegeneratePolygon";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyAfterClip: return "EmptyAfterClip";
    case ErrorKind::SamplingExhausted: return "SamplingExhausted";
    case ErrorKind::EmptyBank: return "EmptyBank";
    case ErrorKind::ImageLoadFailure: return "ImageLoadFailure";
    case ErrorKind::ManifestMissing: return "ManifestMissing";
    case ErrorKind::CorruptEntry: return "CorruptEntry";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::ValidationFailed: return "ValidationFailed";
  }
  return "Unknown";
}

namespace {

constexpr double kBoxTolerance = 1e-6;

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorKind::MalformedDocument, what);
}

const Json& require(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) malformed(where + ": missing \"" + key + "\"");
  return *it;
}

std::int64_t require_int(const Json& obj, const char* key, const std::string& where) {
  const Json& v = require(obj, key, where);
  if (!v.is_number_integer()) malformed(where + ": \"" + key + "\" must be an integer");
  return v.get<std::int64_t>();
}

double require_number(const Json& obj, const char* key, const std::string& where) {
  const Json& v = require(obj, key, where);
  if (!v.is_number()) malformed(where + ": \"" + key + "\" must be a number");
  return v.get<double>();
}

std::string require_string(const Json& obj, const char* key, const std::string& where) {
  const Json& v = require(obj, key, where);
  if (!v.is_string()) malformed(where + ": \"" + key + "\" must be a string");
  return v.get<std::string>();
}

Json extras(const Json& obj, std::initializer_list<const char*> known) {
  Json out = Json::object();
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool is_known = false;
    for (const char* k : known) is_known = is_known || it.key() == k;
    if (!is_known) out[it.key()] = it.value();
  }
  return out;
}

const Json& require_array(const Json& root, const char* key) {
  auto it = root.find(key);
  if (it == root.end() || !it->is_array()) {
    malformed(std::string("top-level \"") + key + "\" array is missing");
  }
  return *it;
}

}  // namespace

const ImageRecord* DatasetDoc::find_image(std::int64_t id) const {
  for (const auto& im : images)
    if (im.id == id) return &im;
  return nullptr;
}

const CategoryRecord* DatasetDoc::find_category(std::int64_t id) const {
  for (const auto& c : categories)
    if (c.id == id) return &c;
  return nullptr;
}

const CategoryRecord* DatasetDoc::find_category(std::string_view name) const {
  for (const auto& c : categories)
    if (c.name == name) return &c;
  return nullptr;
}

Segmentation segmentation_from_json(const Json& j, int width, int height) {
  if (j.is_array()) {
    std::vector<FlatPolygon> polys;
    for (const Json& p : j) {
      if (!p.is_array()) malformed("polygon segmentation must be a list of lists");
      FlatPolygon flat;
      flat.reserve(p.size());
      for (const Json& v : p) {
        if (!v.is_number()) malformed("polygon coordinate must be a number");
        flat.push_back(v.get<double>());
      }
      if (flat.size() % 2 != 0) malformed("polygon has an odd number of coordinates");
      polys.push_back(std::move(flat));
    }
    return polys;
  }
  if (j.is_object()) {
    int h = height, w = width;
    if (auto it = j.find("size"); it != j.end()) {
      if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() ||
          !(*it)[1].is_number_integer()) {
        malformed("RLE \"size\" must be [height, width]");
      }
      h = (*it)[0].get<int>();
      w = (*it)[1].get<int>();
    }
    const Json& counts = require(j, "counts", "RLE segmentation");
    if (counts.is_string()) {
      try {
        return rle_from_string(counts.get<std::string>(), w, h);
      } catch (const Error& e) {
        malformed(std::string("bad compressed RLE: ") + e.what());
      }
    }
    if (!counts.is_array()) malformed("RLE \"counts\" must be a list or a string");
    Rle rle{h, w, {}};
    rle.counts.reserve(counts.size());
    for (const Json& c : counts) {
      if (!c.is_number_unsigned() && !(c.is_number_integer() && c.get<std::int64_t>() >= 0)) {
        malformed("RLE counts must be non-negative integers");
      }
      const auto v = c.get<std::uint64_t>();
      if (v > std::numeric_limits<std::uint32_t>::max()) malformed("RLE count out of range");
      rle.counts.push_back(static_cast<std::uint32_t>(v));
    }
    const std::uint64_t total =
        std::accumulate(rle.counts.begin(), rle.counts.end(), std::uint64_t{0});
    if (h < 0 || w < 0 || total != static_cast<std::uint64_t>(h) * static_cast<std::uint64_t>(w)) {
      malformed("RLE counts do not cover size " + std::to_string(h) + "x" + std::to_string(w));
    }
    return rle;
  }
  malformed("segmentation must be a polygon list or an RLE object");
}

Json segmentation_to_json(const Segmentation& seg) {
  if (const auto* polys = std::get_if<std::vector<FlatPolygon>>(&seg)) {
    Json arr = Json::array();
    for (const auto& p : *polys) arr.push_back(p);
    return arr;
  }
  const Rle& rle = std::get<Rle>(seg);
  return Json{{"size", {rle.height, rle.width}}, {"counts", rle.counts}};
}

std::vector<Polygon> to_polygons(const std::vector<FlatPolygon>& flat) {
  std::vector<Polygon> out;
  out.reserve(flat.size());
  for (const auto& f : flat) {
    Polygon p(2, static_cast<Eigen::Index>(f.size() / 2));
    for (std::size_t k = 0; k + 1 < f.size(); k += 2) {
      p(0, static_cast<Eigen::Index>(k / 2)) = f[k];
      p(1, static_cast<Eigen::Index>(k / 2)) = f[k + 1];
    }
    out.push_back(std::move(p));
  }
  return out;
}

Mask decode_segmentation(const Segmentation& seg, int width, int height) {
  if (const auto* polys = std::get_if<std::vector<FlatPolygon>>(&seg)) {
    const auto p = to_polygons(*polys);
    return rasterize_polygons(p, width, height);
  }
  const Rle& rle = std::get<Rle>(seg);
  if (rle.width != width || rle.height != height) {
    throw Error(ErrorKind::DimensionMismatch,
                "RLE size " + std::to_string(rle.height) + "x" + std::to_string(rle.width) +
                    " does not match image " + std::to_string(height) + "x" +
                    std::to_string(width));
  }
  return rle_decode(rle);
}

DatasetDoc parse_dataset(std::string_view raw) {
  Json root;
  try {
    root = Json::parse(raw.begin(), raw.end());
  } catch (const Json::parse_error& e) {
    malformed(std::string("not a JSON document: ") + e.what());
  }
  return parse_dataset(root);
}

DatasetDoc parse_dataset(const Json& root) {
  if (!root.is_object()) malformed("top level must be a JSON object");
  DatasetDoc doc;
  const Json& images = require_array(root, "images");
  const Json& categories = require_array(root, "categories");
  const Json& annotations = require_array(root, "annotations");
  doc.extra = extras(root, {"images", "categories", "annotations"});

  std::unordered_map<std::int64_t, std::size_t> image_index;
  for (std::size_t k = 0; k < images.size(); ++k) {
    const Json& j = images[k];
    const std::string where = "images[" + std::to_string(k) + "]";
    if (!j.is_object()) malformed(where + " must be an object");
    ImageRecord im;
    im.id = require_int(j, "id", where);
    im.file_name = require_string(j, "file_name", where);
    const std::int64_t w = require_int(j, "width", where);
    const std::int64_t h = require_int(j, "height", where);
    if (w < 1 || h < 1 || w > std::numeric_limits<int>::max() ||
        h > std::numeric_limits<int>::max()) {
      throw Error(ErrorKind::GeometryError, where + ": invalid image size " +
                                                std::to_string(w) + "x" + std::to_string(h));
    }
    im.width = static_cast<int>(w);
    im.height = static_cast<int>(h);
    im.extra = extras(j, {"id", "file_name", "width", "height"});
    if (!image_index.emplace(im.id, doc.images.size()).second) {
      malformed(where + ": duplicate image id " + std::to_string(im.id));
    }
    doc.images.push_back(std::move(im));
  }

  std::unordered_set<std::int64_t> category_ids;
  for (std::size_t k = 0; k < categories.size(); ++k) {
    const Json& j = categories[k];
    const std::string where = "categories[" + std::to_string(k) + "]";
    if (!j.is_object()) malformed(where + " must be an object");
    CategoryRecord c;
    c.id = require_int(j, "id", where);
    c.name = require_string(j, "name", where);
    c.extra = extras(j, {"id", "name"});
    if (!category_ids.insert(c.id).second) {
      malformed(where + ": duplicate category id " + std::to_string(c.id));
    }
    doc.categories.push_back(std::move(c));
  }

  std::unordered_set<std::int64_t> annotation_ids;
  doc.annotations.reserve(annotations.size());
  for (std::size_t k = 0; k < annotations.size(); ++k) {
    const Json& j = annotations[k];
    const std::string where = "annotations[" + std::to_string(k) + "]";
    if (!j.is_object()) malformed(where + " must be an object");
    AnnotationRecord a;
    a.id = require_int(j, "id", where);
    a.image_id = require_int(j, "image_id", where);
    a.category_id = require_int(j, "category_id", where);
    if (!annotation_ids.insert(a.id).second) {
      malformed(where + ": duplicate annotation id " + std::to_string(a.id));
    }
    auto img = image_index.find(a.image_id);
    if (img == image_index.end()) {
      throw Error(ErrorKind::BrokenReference,
                  where + ": image_id " + std::to_string(a.image_id) + " does not exist");
    }
    if (!category_ids.contains(a.category_id)) {
      throw Error(ErrorKind::BrokenReference, where + ": category_id " +
                                                  std::to_string(a.category_id) +
                                                  " does not exist");
    }
    const Json& bbox = require(j, "bbox", where);
    if (!bbox.is_array() || bbox.size() != 4) malformed(where + ": bbox must have 4 numbers");
    for (int i = 0; i < 4; ++i) {
      if (!bbox[i].is_number()) malformed(where + ": bbox must have 4 numbers");
      a.bbox[i] = bbox[i].get<double>();
    }
    if (a.bbox[2] < 0 || a.bbox[3] < 0) {
      throw Error(ErrorKind::GeometryError, where + ": bbox has negative size");
    }
    const ImageRecord& im = doc.images[img->second];
    a.segmentation = segmentation_from_json(require(j, "segmentation", where), im.width,
                                            im.height);
    a.area = require_number(j, "area", where);
    if (auto it = j.find("iscrowd"); it != j.end()) {
      if (it->is_boolean()) {
        a.iscrowd = it->get<bool>();
      } else if (it->is_number_integer() && (*it == 0 || *it == 1)) {
        a.iscrowd = it->get<int>() == 1;
      } else {
        malformed(where + ": iscrowd must be 0 or 1");
      }
    }
    a.extra = extras(j, {"id", "image_id", "category_id", "bbox", "segmentation", "area",
                         "iscrowd"});
    doc.annotations.push_back(std::move(a));
  }
  return doc;
}

Json dataset_to_json(const DatasetDoc& doc) {
  Json root = doc.extra.is_object() ? doc.extra : Json::object();
  Json images = Json::array();
  for (const auto& im : doc.images) {
    Json j = im.extra;
    j["id"] = im.id;
    j["file_name"] = im.file_name;
    j["width"] = im.width;
    j["height"] = im.height;
    images.push_back(std::move(j));
  }
  Json categories = Json::array();
  for (const auto& c : doc.categories) {
    Json j = c.extra;
    j["id"] = c.id;
    j["name"] = c.name;
    categories.push_back(std::move(j));
  }
  Json annotations = Json::array();
  for (const auto& a : doc.annotations) {
    Json j = a.extra;
    j["id"] = a.id;
    j["image_id"] = a.image_id;
    j["category_id"] = a.category_id;
    j["bbox"] = a.bbox;
    j["segmentation"] = segmentation_to_json(a.segmentation);
    j["area"] = a.area;
    j["iscrowd"] = a.iscrowd ? 1 : 0;
    annotations.push_back(std::move(j));
  }
  root["images"] = std::move(images);
  root["categories"] = std::move(categories);
  root["annotations"] = std::move(annotations);
  return root;
}

std::string serialize_dataset(const DatasetDoc& doc) {
  return dataset_to_json(doc).dump() + "\n";
}

std::vector<Violation> validate_dataset(const DatasetDoc& doc, ValidateOptions options) {
  std::vector<Violation> report;
  auto add = [&](const char* record, std::int64_t id, const char* rule, std::string detail) {
    report.push_back({record, id, rule, std::move(detail)});
  };

  std::unordered_map<std::int64_t, const ImageRecord*> images;
  for (const auto& im : doc.images) {
    if (!images.emplace(im.id, &im).second) add("image", im.id, "image.duplicate_id", "");
    if (im.width < 1 || im.height < 1) {
      add("image", im.id, "image.size",
          std::to_string(im.width) + "x" + std::to_string(im.height));
    }
  }
  std::unordered_set<std::int64_t> categories;
  for (const auto& c : doc.categories) {
    if (!categories.insert(c.id).second) add("category", c.id, "category.duplicate_id", "");
  }

  std::unordered_set<std::int64_t> annotation_ids;
  for (const auto& a : doc.annotations) {
    if (!annotation_ids.insert(a.id).second) {
      add("annotation", a.id, "annotation.duplicate_id", "");
    }
    if (!categories.contains(a.category_id)) {
      add("annotation", a.id, "annotation.category_ref",
          "category " + std::to_string(a.category_id));
    }
    auto it = images.find(a.image_id);
    if (it == images.end()) {
      add("annotation", a.id, "annotation.image_ref", "image " + std::to_string(a.image_id));
      continue;
    }
    const ImageRecord& im = *it->second;
    const auto& b = a.bbox;
    if (b[2] < 0 || b[3] < 0) {
      add("annotation", a.id, "annotation.bbox_negative", "");
    } else if (b[0] < -kBoxTolerance || b[1] < -kBoxTolerance ||
               b[0] + b[2] > im.width + kBoxTolerance ||
               b[1] + b[3] > im.height + kBoxTolerance) {
      add("annotation", a.id, "annotation.bbox_bounds",
          "bbox exceeds " + std::to_string(im.width) + "x" + std::to_string(im.height));
    }
    if (!(a.area > 0)) add("annotation", a.id, "annotation.area_positive", "");

    std::int64_t mask_pixels = 0;
    std::optional<BoxI> tight;
    if (const auto* rle = std::get_if<Rle>(&a.segmentation)) {
      if (rle->width != im.width || rle->height != im.height) {
        add("annotation", a.id, "annotation.mask_size", "RLE size differs from image");
        continue;
      }
      const std::uint64_t total =
          std::accumulate(rle->counts.begin(), rle->counts.end(), std::uint64_t{0});
      if (total != static_cast<std::uint64_t>(im.width) * static_cast<std::uint64_t>(im.height)) {
        add("annotation", a.id, "annotation.rle_length", "");
        continue;
      }
      mask_pixels = rle_area(*rle);
      if (options.require_tight_bbox) tight = rle_bbox(*rle);
    } else {
      const auto& flat = std::get<std::vector<FlatPolygon>>(a.segmentation);
      bool degenerate = false;
      for (const auto& p : flat) degenerate = degenerate || p.size() < 6;
      if (degenerate) {
        add("annotation", a.id, "annotation.degenerate_polygon", "");
        continue;
      }
      const Mask m = decode_segmentation(a.segmentation, im.width, im.height);
      mask_pixels = mask_area(m);
      if (options.require_tight_bbox) tight = mask_bbox(m);
    }
    if (a.area > 0 && a.area != static_cast<double>(mask_pixels)) {
      add("annotation", a.id, "annotation.area_mismatch",
          "area " + std::to_string(a.area) + " vs mask " + std::to_string(mask_pixels));
    }
    if (options.require_tight_bbox) {
      const bool ok = tight && std::abs(b[0] - tight->x_min) <= kBoxTolerance &&
                      std::abs(b[1] - tight->y_min) <= kBoxTolerance &&
                      std::abs(b[2] - tight->width()) <= kBoxTolerance &&
                      std::abs(b[3] - tight->height()) <= kBoxTolerance;
      if (!ok) add("annotation", a.id, "annotation.bbox_mask_mismatch", "");
    }
  }
  return report;
}

DatasetDoc reindex(const DatasetDoc& doc, std::int64_t image_id_offset,
                   std::int64_t annotation_id_offset) {
  if (image_id_offset < 0 || annotation_id_offset < 0) {
    throw Error(ErrorKind::InvalidArgument, "reindex offsets must be non-negative");
  }
  constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();
  auto shift = [](std::int64_t id, std::int64_t offset, const char* what) {
    if (id > 0 && id > kMax - offset) {
      throw Error(ErrorKind::IdOverflow, std::string(what) + " id " + std::to_string(id) +
                                             " + " + std::to_string(offset) +
                                             " overflows");
    }
    return id + offset;
  };
  DatasetDoc out = doc;
  for (auto& im : out.images) im.id = shift(im.id, image_id_offset, "image");
  for (auto& a : out.annotations) {
    a.id = shift(a.id, annotation_id_offset, "annotation");
    a.image_id = shift(a.image_id, image_id_offset, "image");
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + path);
}

}  // namespace courtaug
