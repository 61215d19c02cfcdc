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
#include "courtaug/image_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <vector>

#include "courtaug/error.hpp"

namespace courtaug {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// Reads any PNG into 8-bit samples of the requested simplified-API format.
std::vector<png_byte> read_png(const std::string& path, png_uint_32 format, int& width,
                               int& height) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw Error(ErrorKind::ImageLoadFailure, "cannot read image " + path + ": " + image.message);
  }
  image.format = format;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    png_image_free(&image);
    throw Error(ErrorKind::ImageLoadFailure, "cannot decode image " + path + ": " + image.message);
  }
  width = static_cast<int>(image.width);
  height = static_cast<int>(image.height);
  return buffer;
}

// Classic libpng writer: `rows[y]` points at one packed scanline.
void write_png(const std::string& path, int width, int height, int bit_depth, int color_type,
               const std::vector<png_bytep>& rows) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw Error(ErrorKind::IoFailure, "cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::IoFailure, "libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::IoFailure, "PNG encoding failed for " + path);
  }
  png_init_io(png, fp.get());
  png_set_compression_level(png, 3);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, const_cast<png_bytepp>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(fp.get()) != 0) throw Error(ErrorKind::IoFailure, "write failed for " + path);
}

}  // namespace

RgbImage read_png_rgb(const std::string& path) {
  int w = 0, h = 0;
  const auto buf = read_png(path, PNG_FORMAT_RGB, w, h);
  RgbImage img(w, h);
  for (int y = 0; y < h; ++y) {
    const png_byte* row = buf.data() + static_cast<std::size_t>(y) * w * 3;
    for (int x = 0; x < w; ++x) {
      img[0](y, x) = row[3 * x];
      img[1](y, x) = row[3 * x + 1];
      img[2](y, x) = row[3 * x + 2];
    }
  }
  return img;
}

void write_png_rgb(const std::string& path, const RgbImage& image) {
  const int w = image.width(), h = image.height();
  if (w < 1 || h < 1) throw Error(ErrorKind::IoFailure, "refusing to write empty image " + path);
  std::vector<png_byte> buf(static_cast<std::size_t>(w) * h * 3);
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y) {
    png_byte* row = buf.data() + static_cast<std::size_t>(y) * w * 3;
    rows[y] = row;
    for (int x = 0; x < w; ++x) {
      row[3 * x] = image[0](y, x);
      row[3 * x + 1] = image[1](y, x);
      row[3 * x + 2] = image[2](y, x);
    }
  }
  write_png(path, w, h, 8, PNG_COLOR_TYPE_RGB, rows);
}

Mask read_png_mask(const std::string& path) {
  int w = 0, h = 0;
  const auto buf = read_png(path, PNG_FORMAT_GRAY, w, h);
  Mask mask(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      mask(y, x) = buf[static_cast<std::size_t>(y) * w + x] != 0 ? 1 : 0;
  return mask;
}

void write_png_mask(const std::string& path, const Mask& mask) {
  const int w = static_cast<int>(mask.cols()), h = static_cast<int>(mask.rows());
  if (w < 1 || h < 1) throw Error(ErrorKind::IoFailure, "refusing to write empty mask " + path);
  const std::size_t stride = (static_cast<std::size_t>(w) + 7) / 8;
  std::vector<png_byte> buf(stride * h, 0);
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y) {
    png_byte* row = buf.data() + stride * y;
    rows[y] = row;
    for (int x = 0; x < w; ++x)
      if (mask(y, x)) row[x / 8] |= static_cast<png_byte>(0x80 >> (x % 8));
  }
  write_png(path, w, h, 1, PNG_COLOR_TYPE_GRAY, rows);
}

}  // namespace courtaug
