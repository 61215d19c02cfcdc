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

#include <Eigen/Core>

namespace courtaug {

// Dense single-channel raster indexed (row = y, col = x). Storage is
// column-major, so the flat data order is the COCO RLE scan order.
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Binary mask: 0 = background, 1 = foreground.
using Mask = Plane<std::uint8_t>;

template <typename Scalar>
struct Rgb {
  std::array<Plane<Scalar>, 3> channels;

  Rgb() = default;
  Rgb(int width, int height) {
    for (auto& c : channels) c.setZero(height, width);
  }

  int width() const { return static_cast<int>(channels[0].cols()); }
  int height() const { return static_cast<int>(channels[0].rows()); }
  bool empty() const { return channels[0].size() == 0; }

  Plane<Scalar>& operator[](int c) { return channels[c]; }
  const Plane<Scalar>& operator[](int c) const { return channels[c]; }

  void fill(Scalar r, Scalar g, Scalar b) {
    channels[0].setConstant(r);
    channels[1].setConstant(g);
    channels[2].setConstant(b);
  }

  template <typename Other>
  Rgb<Other> cast() const {
    Rgb<Other> out;
    for (int c = 0; c < 3; ++c) out.channels[c] = channels[c].template cast<Other>();
    return out;
  }

  bool operator==(const Rgb& other) const {
    for (int c = 0; c < 3; ++c) {
      if (channels[c].rows() != other.channels[c].rows() ||
          channels[c].cols() != other.channels[c].cols() ||
          !(channels[c] == other.channels[c]).all())
        return false;
    }
    return true;
  }
};

using RgbImage = Rgb<std::uint8_t>;

// Axis-aligned box in pixel-boundary coordinates: a single pixel at (x, y)
// is Box{x, y, x + 1, y + 1}.
template <typename Scalar>
struct Box {
  Scalar x_min{};
  Scalar y_min{};
  Scalar x_max{};
  Scalar y_max{};

  Scalar width() const { return x_max - x_min; }
  Scalar height() const { return y_max - y_min; }
  Scalar area() const { return width() * height(); }

  template <typename Other>
  Box<Other> cast() const {
    return {static_cast<Other>(x_min), static_cast<Other>(y_min),
            static_cast<Other>(x_max), static_cast<Other>(y_max)};
  }

  static Box from_xywh(Scalar x, Scalar y, Scalar w, Scalar h) {
    return {x, y, x + w, y + h};
  }

  bool operator==(const Box&) const = default;
};

using BoxI = Box<int>;
using BoxD = Box<double>;

inline bool same_shape(const Mask& a, const Mask& b) {
  return a.rows() == b.rows() && a.cols() == b.cols();
}

}  // namespace courtaug
