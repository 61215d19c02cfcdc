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

#include <string>

#include "courtaug/raster.hpp"

namespace courtaug {

// Lossless PNG storage. Readers throw ImageLoadFailure; writers IoFailure.
RgbImage read_png_rgb(const std::string& path);
void write_png_rgb(const std::string& path, const RgbImage& image);

// Masks are written as 1-bit grayscale; any nonzero gray reads back as 1.
Mask read_png_mask(const std::string& path);
void write_png_mask(const std::string& path, const Mask& mask);

}  // namespace courtaug
