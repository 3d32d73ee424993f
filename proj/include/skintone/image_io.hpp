/*
 * Copyright 2026 The Skintone Audit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// 8-bit PNG / JPEG decoding and PNG encoding (libpng, libjpeg).

#ifndef SKINTONE_IMAGE_IO_HPP_
#define SKINTONE_IMAGE_IO_HPP_

#include <png.h>
#include <jpeglib.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "skintone/csv.hpp"
#include "skintone/error.hpp"
#include "skintone/image.hpp"

namespace skintone {

namespace image_io_internal {

enum class Format { kPng, kJpeg, kUnknown };

inline Format sniff(const std::string& bytes) {
  if (bytes.size() >= 8 &&
      std::memcmp(bytes.data(), "\x89PNG\r\n\x1a\n", 8) == 0) {
    return Format::kPng;
  }
  if (bytes.size() >= 3 &&
      std::memcmp(bytes.data(), "\xFF\xD8\xFF", 3) == 0) {
    return Format::kJpeg;
  }
  return Format::kUnknown;
}

// channels: 3 for RGB, 1 for gray.
inline std::vector<std::uint8_t> decode_png(const std::string& bytes,
                                            int channels, std::size_t& width,
                                            std::size_t& height,
                                            const std::string& name) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::kDecode, name + ": " + image.message);
  }
  image.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::kDecode, name + ": " + message);
  }
  width = image.width;
  height = image.height;
  return pixels;
}

struct JpegErrorManager {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

extern "C" inline void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

// Corrupt-data warnings (truncation, bad markers) would otherwise be covered
// over with gray fill; treat them as fatal. Trace messages are dropped.
extern "C" inline void jpeg_emit_message(j_common_ptr cinfo, int level) {
  if (level < 0) jpeg_error_exit(cinfo);
}

// Only trivially destructible locals live in this frame, so longjmp out of
// libjpeg is safe. Returns false and fills `message` on failure.
inline bool decode_jpeg_raw(const unsigned char* data, unsigned long size,
                            int channels, std::vector<std::uint8_t>& out,
                            std::size_t& width, std::size_t& height,
                            char* message) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  err.pub.emit_message = jpeg_emit_message;
  if (setjmp(err.jump)) {
    std::memcpy(message, err.message, JMSG_LENGTH_MAX);
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, data, size);
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = channels == 3 ? JCS_RGB : JCS_GRAYSCALE;
  jpeg_start_decompress(&cinfo);
  width = cinfo.output_width;
  height = cinfo.output_height;
  const std::size_t stride = width * static_cast<std::size_t>(channels);
  out.resize(stride * height);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out.data() + stride * cinfo.output_scanline;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

inline std::vector<std::uint8_t> decode(const std::filesystem::path& path,
                                        int channels, std::size_t& width,
                                        std::size_t& height) {
  const std::string bytes = read_text_file(path);
  const std::string name = path.string();
  switch (sniff(bytes)) {
    case Format::kPng:
      return decode_png(bytes, channels, width, height, name);
    case Format::kJpeg: {
      std::vector<std::uint8_t> out;
      char message[JMSG_LENGTH_MAX] = {0};
      if (!decode_jpeg_raw(reinterpret_cast<const unsigned char*>(bytes.data()),
                           static_cast<unsigned long>(bytes.size()), channels,
                           out, width, height, message)) {
        throw Error(ErrorCode::kDecode, name + ": " + message);
      }
      return out;
    }
    case Format::kUnknown:
      break;
  }
  throw Error(ErrorCode::kDecode, name + ": not a PNG or JPEG file");
}

}  // namespace image_io_internal

inline RgbImage read_rgb_image(const std::filesystem::path& path) {
  std::size_t w = 0;
  std::size_t h = 0;
  const auto raw = image_io_internal::decode(path, 3, w, h);
  std::vector<RgbPixel> pixels(w * h);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    pixels[i] = RgbPixel{raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]};
  }
  return RgbImage(w, h, std::move(pixels));
}

inline GrayImage read_gray_image(const std::filesystem::path& path) {
  std::size_t w = 0;
  std::size_t h = 0;
  auto raw = image_io_internal::decode(path, 1, w, h);
  return GrayImage(w, h, std::move(raw));
}

inline ExclusionMask read_mask(const std::filesystem::path& path,
                               int threshold, MaskPolarity polarity) {
  return ExclusionMask::from_gray(read_gray_image(path), threshold, polarity);
}

namespace image_io_internal {

inline void write_png(const std::filesystem::path& path, const void* pixels,
                      std::size_t width, std::size_t height, bool rgb) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = rgb ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, pixels, 0,
                               nullptr)) {
    throw Error(ErrorCode::kIo, path.string() + ": " + image.message);
  }
}

}  // namespace image_io_internal

inline void write_png(const std::filesystem::path& path,
                      const RgbImage& image) {
  static_assert(sizeof(RgbPixel) == 3);
  image_io_internal::write_png(path, image.pixels().data(), image.width(),
                               image.height(), true);
}

inline void write_png(const std::filesystem::path& path,
                      const GrayImage& image) {
  image_io_internal::write_png(path, image.pixels().data(), image.width(),
                               image.height(), false);
}

}  // namespace skintone

#endif  // SKINTONE_IMAGE_IO_HPP_
