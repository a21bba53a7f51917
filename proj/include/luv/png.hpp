// Copyright 2026 The LUV Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// 8-bit RGB and grayscale PNG codec over libpng's simplified API.

#include <png.h>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "luv/core.hpp"

namespace luv {

using Bytes = std::vector<std::uint8_t>;

namespace detail {

inline Bytes png_encode(const std::uint8_t* pixels, int w, int h, png_uint_32 format) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(w);
  img.height = static_cast<png_uint_32>(h);
  img.format = format;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&img, nullptr, &size, 0, pixels, 0, nullptr)) {
    throw IoError(std::string("png encode: ") + img.message);
  }
  Bytes out(size);
  if (!png_image_write_to_memory(&img, out.data(), &size, 0, pixels, 0, nullptr)) {
    throw IoError(std::string("png encode: ") + img.message);
  }
  out.resize(size);
  return out;
}

/// Decodes into the requested format; libpng converts other layouts.
inline Bytes png_decode(const Bytes& data, png_uint_32 format, int& w, int& h) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, data.data(), data.size())) {
    throw IoError(std::string("png decode: ") + img.message);
  }
  img.format = format;
  Bytes pixels(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, pixels.data(), 0, nullptr)) {
    png_image_free(&img);
    throw IoError(std::string("png decode: ") + img.message);
  }
  w = static_cast<int>(img.width);
  h = static_cast<int>(img.height);
  return pixels;
}

}  // namespace detail

inline Bytes encode_png(const ImageRGB& img) {
  return detail::png_encode(img.bytes().data(), img.width(), img.height(), PNG_FORMAT_RGB);
}

inline Bytes encode_png(const Plane<std::uint8_t>& gray) {
  return detail::png_encode(gray.data().data(), gray.width(), gray.height(), PNG_FORMAT_GRAY);
}

inline ImageRGB decode_png_rgb(const Bytes& data) {
  int w = 0, h = 0;
  Bytes px = detail::png_decode(data, PNG_FORMAT_RGB, w, h);
  return ImageRGB(w, h, std::move(px));
}

inline Plane<std::uint8_t> decode_png_gray(const Bytes& data) {
  int w = 0, h = 0;
  Bytes px = detail::png_decode(data, PNG_FORMAT_GRAY, w, h);
  return Plane<std::uint8_t>(w, h, std::move(px));
}

inline Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline ImageRGB read_png_rgb(const std::string& path) { return decode_png_rgb(read_file(path)); }
inline Plane<std::uint8_t> read_png_gray(const std::string& path) { return decode_png_gray(read_file(path)); }

}  // namespace luv
