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
#include "courtaug/mask_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "courtaug/error.hpp"

namespace courtaug {

namespace {

// Smallest column j whose center j + 0.5 is >= x.
int first_center_at_or_after(double x) {
  int j = static_cast<int>(std::ceil(x - 0.5));
  while (j + 0.5 < x) ++j;
  while (j - 0.5 >= x) --j;
  return j;
}

void check_rle_length(std::span<const std::uint32_t> counts, int width, int height) {
  const std::uint64_t total =
      std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (width < 0 || height < 0 ||
      total != static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height)) {
    throw Error(ErrorKind::LengthMismatch,
                "RLE counts sum to " + std::to_string(total) + ", expected " +
                    std::to_string(static_cast<std::int64_t>(width) * height));
  }
}

}  // namespace

Mask rasterize_polygons(std::span<const Polygon> polygons, int width, int height) {
  Mask mask = Mask::Zero(height, width);
  std::vector<double> crossings;
  for (const Polygon& poly : polygons) {
    const Eigen::Index n = poly.cols();
    if (n < 3) {
      throw Error(ErrorKind::DegeneratePolygon,
                  "polygon has " + std::to_string(n) + " vertices, need at least 3");
    }
    const double y_lo = poly.row(1).minCoeff();
    const double y_hi = poly.row(1).maxCoeff();
    const int row_begin = std::max(0, static_cast<int>(std::floor(y_lo - 0.5)));
    const int row_end = std::min(height, static_cast<int>(std::ceil(y_hi + 0.5)));
    for (int i = row_begin; i < row_end; ++i) {
      const double py = i + 0.5;
      crossings.clear();
      for (Eigen::Index a = 0, b = n - 1; a < n; b = a++) {
        const double xa = poly(0, a), ya = poly(1, a);
        const double xb = poly(0, b), yb = poly(1, b);
        if ((ya > py) != (yb > py)) {
          crossings.push_back((xb - xa) * (py - ya) / (yb - ya) + xa);
        }
      }
      std::sort(crossings.begin(), crossings.end());
      for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
        const int j0 = std::max(0, first_center_at_or_after(crossings[k]));
        const int j1 = std::min(width, first_center_at_or_after(crossings[k + 1]));
        for (int j = j0; j < j1; ++j) mask(i, j) = 1;
      }
    }
  }
  return mask;
}

Rle rle_encode(const Mask& mask) {
  Rle rle;
  rle.height = static_cast<int>(mask.rows());
  rle.width = static_cast<int>(mask.cols());
  const std::uint8_t* data = mask.data();
  const Eigen::Index n = mask.size();
  std::uint8_t current = 0;
  std::uint32_t run = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const std::uint8_t v = data[k] != 0 ? 1 : 0;
    if (v != current) {
      rle.counts.push_back(run);
      run = 0;
      current = v;
    }
    ++run;
  }
  rle.counts.push_back(run);
  return rle;
}

Mask rle_decode(std::span<const std::uint32_t> counts, int width, int height) {
  check_rle_length(counts, width, height);
  Mask mask(height, width);
  std::uint8_t* data = mask.data();
  std::uint8_t value = 0;
  for (std::uint32_t run : counts) {
    std::fill_n(data, run, value);
    data += run;
    value ^= 1;
  }
  return mask;
}

Mask rle_decode(const Rle& rle) { return rle_decode(rle.counts, rle.width, rle.height); }

std::int64_t rle_area(const Rle& rle) {
  std::int64_t area = 0;
  for (std::size_t k = 1; k < rle.counts.size(); k += 2) area += rle.counts[k];
  return area;
}

std::int64_t rle_intersection_area(const Rle& a, const Rle& b) {
  if (a.width != b.width || a.height != b.height) {
    throw Error(ErrorKind::DimensionMismatch, "RLE masks differ in size");
  }
  std::size_t ia = 0, ib = 0;
  std::int64_t left_a = a.counts.empty() ? 0 : a.counts[0];
  std::int64_t left_b = b.counts.empty() ? 0 : b.counts[0];
  std::int64_t inter = 0;
  while (ia < a.counts.size() && ib < b.counts.size()) {
    const std::int64_t step = std::min(left_a, left_b);
    if ((ia % 2 == 1) && (ib % 2 == 1)) inter += step;
    left_a -= step;
    left_b -= step;
    while (left_a == 0 && ++ia < a.counts.size()) left_a = a.counts[ia];
    while (left_b == 0 && ++ib < b.counts.size()) left_b = b.counts[ib];
  }
  return inter;
}

double rle_iou(const Rle& a, const Rle& b) {
  const std::int64_t inter = rle_intersection_area(a, b);
  const std::int64_t uni = rle_area(a) + rle_area(b) - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

std::optional<BoxI> rle_bbox(const Rle& rle) {
  std::optional<BoxI> box;
  const std::int64_t h = rle.height;
  std::int64_t pos = 0;
  for (std::size_t k = 0; k < rle.counts.size(); ++k) {
    const std::int64_t len = rle.counts[k];
    if (k % 2 == 1 && len > 0) {
      const std::int64_t first = pos, last = pos + len - 1;
      const int x0 = static_cast<int>(first / h), x1 = static_cast<int>(last / h);
      int y0 = static_cast<int>(first % h), y1 = static_cast<int>(last % h);
      if (x0 != x1) {
        y0 = 0;
        y1 = static_cast<int>(h - 1);
      }
      if (!box) {
        box = BoxI{x0, y0, x1 + 1, y1 + 1};
      } else {
        box->x_min = std::min(box->x_min, x0);
        box->y_min = std::min(box->y_min, y0);
        box->x_max = std::max(box->x_max, x1 + 1);
        box->y_max = std::max(box->y_max, y1 + 1);
      }
    }
    pos += len;
  }
  return box;
}

std::string rle_to_string(const Rle& rle) {
  std::string s;
  const auto& cnts = rle.counts;
  for (std::size_t i = 0; i < cnts.size(); ++i) {
    std::int64_t x = cnts[i];
    if (i > 2) x -= static_cast<std::int64_t>(cnts[i - 2]);
    bool more = true;
    while (more) {
      char c = static_cast<char>(x & 0x1f);
      x >>= 5;
      more = (c & 0x10) ? x != -1 : x != 0;
      if (more) c |= 0x20;
      s.push_back(static_cast<char>(c + 48));
    }
  }
  return s;
}

Rle rle_from_string(const std::string& counts, int width, int height) {
  Rle rle{height, width, {}};
  std::size_t p = 0;
  while (p < counts.size()) {
    std::int64_t x = 0;
    int k = 0;
    bool more = true;
    while (more) {
      if (p >= counts.size()) {
        throw Error(ErrorKind::MalformedDocument, "truncated compressed RLE string");
      }
      const std::int64_t c = static_cast<std::int64_t>(counts[p]) - 48;
      if (c < 0 || c > 63) {
        throw Error(ErrorKind::MalformedDocument, "invalid character in compressed RLE");
      }
      x |= (c & 0x1f) << (5 * k);
      more = (c & 0x20) != 0;
      ++p;
      ++k;
      if (!more && (c & 0x10)) x |= static_cast<std::int64_t>(-1) * (std::int64_t{1} << (5 * k));
    }
    const std::size_t m = rle.counts.size();
    if (m > 2) x += rle.counts[m - 2];
    if (x < 0 || x > std::numeric_limits<std::uint32_t>::max()) {
      throw Error(ErrorKind::MalformedDocument, "compressed RLE run out of range");
    }
    rle.counts.push_back(static_cast<std::uint32_t>(x));
  }
  check_rle_length(rle.counts, width, height);
  return rle;
}

std::optional<BoxI> mask_bbox(const Mask& mask) {
  // One contiguous pass per column (storage is column-major).
  const Eigen::Index h = mask.rows();
  Eigen::Index c0 = -1, c1 = -1, r0 = h, r1 = -1;
  for (Eigen::Index c = 0; c < mask.cols(); ++c) {
    const std::uint8_t* col = mask.data() + c * h;
    const std::uint8_t* end = col + h;
    const std::uint8_t* first = std::find_if(col, end, [](std::uint8_t v) { return v != 0; });
    if (first == end) continue;
    const std::uint8_t* last = end - 1;
    while (*last == 0) --last;
    if (c0 < 0) c0 = c;
    c1 = c;
    r0 = std::min(r0, static_cast<Eigen::Index>(first - col));
    r1 = std::max(r1, static_cast<Eigen::Index>(last - col));
  }
  if (c0 < 0) return std::nullopt;
  BoxI box;
  box.x_min = static_cast<int>(c0);
  box.x_max = static_cast<int>(c1 + 1);
  box.y_min = static_cast<int>(r0);
  box.y_max = static_cast<int>(r1 + 1);
  return box;
}

double mask_iou(const Mask& a, const Mask& b) {
  if (!same_shape(a, b)) {
    throw Error(ErrorKind::DimensionMismatch, "mask_iou on masks of different size");
  }
  const auto fa = (a != 0);
  const auto fb = (b != 0);
  const auto inter = (fa && fb).count();
  const auto uni = (fa || fb).count();
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

namespace {

struct ClipWindow {
  int src_x, src_y, dst_x, dst_y, w, h;
  bool empty() const { return w <= 0 || h <= 0; }
};

ClipWindow clip(const Mask& patch, const Eigen::Vector2i& pos, int width, int height) {
  ClipWindow win;
  const int x0 = std::max(0, pos.x());
  const int y0 = std::max(0, pos.y());
  const int x1 = std::min(width, pos.x() + static_cast<int>(patch.cols()));
  const int y1 = std::min(height, pos.y() + static_cast<int>(patch.rows()));
  win.dst_x = x0;
  win.dst_y = y0;
  win.src_x = x0 - pos.x();
  win.src_y = y0 - pos.y();
  win.w = x1 - x0;
  win.h = y1 - y0;
  return win;
}

}  // namespace

Mask place_patch(const Mask& patch, const Eigen::Vector2i& position, int width, int height) {
  Mask out = Mask::Zero(height, width);
  const ClipWindow win = clip(patch, position, width, height);
  if (!win.empty()) {
    out.block(win.dst_y, win.dst_x, win.h, win.w) =
        (patch.block(win.src_y, win.src_x, win.h, win.w) != 0).cast<std::uint8_t>();
  }
  return out;
}

std::int64_t visible_area(const Mask& patch, const Eigen::Vector2i& position, int width,
                          int height) {
  const ClipWindow win = clip(patch, position, width, height);
  if (win.empty()) return 0;
  return (patch.block(win.src_y, win.src_x, win.h, win.w) != 0).count();
}

Mask composite_paste_inplace(std::vector<Mask>& canvas_masks, const Mask& patch,
                             const Eigen::Vector2i& position, int width, int height,
                             std::vector<std::size_t>& removed) {
  removed.clear();
  const ClipWindow win = clip(patch, position, width, height);
  if (win.empty() || (patch.block(win.src_y, win.src_x, win.h, win.w) != 0).count() == 0) {
    throw Error(ErrorKind::EmptyAfterClip, "pasted patch has no visible pixels at (" +
                                               std::to_string(position.x()) + ", " +
                                               std::to_string(position.y()) + ")");
  }
  Mask pasted = place_patch(patch, position, width, height);
  const auto region = pasted.block(win.dst_y, win.dst_x, win.h, win.w);
  for (std::size_t k = 0; k < canvas_masks.size(); ++k) {
    Mask& m = canvas_masks[k];
    if (m.rows() != height || m.cols() != width) {
      throw Error(ErrorKind::DimensionMismatch, "canvas mask does not match canvas size");
    }
    auto block = m.block(win.dst_y, win.dst_x, win.h, win.w);
    if (!(block != 0).any()) continue;
    block = (block != 0 && region == 0).cast<std::uint8_t>();
    // Only a mask whose overlap block just emptied can have vanished.
    if (!(block != 0).any() && !(m != 0).any()) removed.push_back(k);
  }
  return pasted;
}

PasteResult composite_paste(std::span<const Mask> canvas_masks, const Mask& patch,
                            const Eigen::Vector2i& position, int width, int height) {
  PasteResult result;
  result.masks.assign(canvas_masks.begin(), canvas_masks.end());
  result.pasted = composite_paste_inplace(result.masks, patch, position, width, height,
                                          result.removed);
  return result;
}

}  // namespace courtaug
