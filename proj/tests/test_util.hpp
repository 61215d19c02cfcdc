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
// Shared fixtures for the unit tests and the acceptance suite.
#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "courtaug/mask_ops.hpp"
#include "courtaug/raster.hpp"

namespace testing_util {

// A scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("courtaug_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }
  std::string operator/(const std::string& leaf) const { return (path_ / leaf).string(); }

 private:
  std::filesystem::path path_;
};

inline courtaug::Mask random_mask(std::mt19937_64& gen, int width, int height,
                                  double density) {
  std::bernoulli_distribution on(density);
  courtaug::Mask m(height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) m(y, x) = on(gen) ? 1 : 0;
  return m;
}

inline courtaug::Mask rect_mask(int width, int height, int x0, int y0, int x1, int y1) {
  courtaug::Mask m = courtaug::Mask::Zero(height, width);
  for (int y = std::max(0, y0); y < std::min(height, y1); ++y)
    for (int x = std::max(0, x0); x < std::min(width, x1); ++x) m(y, x) = 1;
  return m;
}

inline courtaug::Polygon square(double x0, double y0, double x1, double y1) {
  courtaug::Polygon p(2, 4);
  p << x0, x1, x1, x0,
       y0, y0, y1, y1;
  return p;
}

}  // namespace testing_util
