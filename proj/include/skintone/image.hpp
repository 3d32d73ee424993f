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

#ifndef SKINTONE_IMAGE_HPP_
#define SKINTONE_IMAGE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "skintone/colorimetry.hpp"
#include "skintone/error.hpp"

namespace skintone {

// Row-major 2-D buffer.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t width, std::size_t height, T fill = T{})
      : width_(width), height_(height), data_(width * height, fill) {}
  Grid(std::size_t width, std::size_t height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != width_ * height_) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "grid data size does not match " + std::to_string(width_) +
                      "x" + std::to_string(height_));
    }
  }

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& at(std::size_t x, std::size_t y) { return data_[y * width_ + x]; }
  const T& at(std::size_t x, std::size_t y) const {
    return data_[y * width_ + x];
  }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> pixels() { return data_; }
  std::span<const T> pixels() const { return data_; }

  bool same_shape(std::size_t w, std::size_t h) const {
    return width_ == w && height_ == h;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<T> data_;
};

using RgbImage = Grid<RgbPixel>;
using GrayImage = Grid<std::uint8_t>;

enum class MaskPolarity { kWhiteExcluded, kBlackExcluded };

// Per-pixel exclusion flags: true marks diseased skin, shadow or artifact;
// false marks the non-diseased skin that ITA is computed over.
class ExclusionMask {
 public:
  ExclusionMask() = default;
  ExclusionMask(std::size_t width, std::size_t height, bool excluded = false)
      : bits_(width, height, excluded ? 1 : 0) {}

  // Thresholds an 8-bit mask image. Under kWhiteExcluded a value >= threshold
  // is excluded; under kBlackExcluded a value < threshold is excluded.
  static ExclusionMask from_gray(const GrayImage& gray, int threshold,
                                 MaskPolarity polarity) {
    ExclusionMask mask(gray.width(), gray.height());
    for (std::size_t i = 0; i < gray.size(); ++i) {
      const bool high = gray[i] >= threshold;
      mask.set(i, polarity == MaskPolarity::kWhiteExcluded ? high : !high);
    }
    return mask;
  }

  // Renders as 0/255 with 255 meaning excluded.
  GrayImage to_gray() const {
    GrayImage out(width(), height());
    for (std::size_t i = 0; i < size(); ++i) out[i] = excluded(i) ? 255 : 0;
    return out;
  }

  std::size_t width() const { return bits_.width(); }
  std::size_t height() const { return bits_.height(); }
  std::size_t size() const { return bits_.size(); }

  bool excluded(std::size_t i) const { return bits_[i] != 0; }
  bool excluded(std::size_t x, std::size_t y) const {
    return bits_.at(x, y) != 0;
  }
  void set(std::size_t i, bool excluded) { bits_[i] = excluded ? 1 : 0; }
  void set(std::size_t x, std::size_t y, bool excluded) {
    bits_.at(x, y) = excluded ? 1 : 0;
  }

  std::size_t count_excluded() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < size(); ++i) n += bits_[i];
    return n;
  }

  friend bool operator==(const ExclusionMask&, const ExclusionMask&) = default;

 private:
  Grid<std::uint8_t> bits_;
};

template <typename A, typename B>
void require_same_shape(const A& a, const B& b, std::string_view what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + ": " + std::to_string(a.width()) + "x" +
                    std::to_string(a.height()) + " vs " +
                    std::to_string(b.width()) + "x" +
                    std::to_string(b.height()));
  }
}

}  // namespace skintone

#endif  // SKINTONE_IMAGE_HPP_
