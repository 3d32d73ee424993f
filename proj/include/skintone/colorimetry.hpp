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

// sRGB <-> CIELab conversion and grayscale luma.
//
// Pipeline: IEC 61966-2-1 sRGB decode (piecewise, 2.4 exponent, 0.04045
// threshold), linear RGB -> XYZ with the sRGB/D65 primaries matrix, then CIE
// Lab relative to the D65 white (0.95047, 1.0, 1.08883) with delta = 6/29.
// All arithmetic is double precision.

#ifndef SKINTONE_COLORIMETRY_HPP_
#define SKINTONE_COLORIMETRY_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace skintone {

// 8-bit sRGB pixel. The channel type enforces the [0, 255] range.
struct RgbPixel {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const RgbPixel&, const RgbPixel&) = default;
};

struct PixelLab {
  double l = 0.0;  // [0, 100]
  double a = 0.0;
  double b = 0.0;
};

enum class GrayMode { kRec601, kChannelMean };

inline constexpr std::string_view kColorPipelineId =
    "srgb-iec61966-2-1/d65/cielab";

namespace colorimetry_internal {

inline constexpr double kWhiteX = 0.95047;
inline constexpr double kWhiteY = 1.0;
inline constexpr double kWhiteZ = 1.08883;
inline constexpr double kDelta = 6.0 / 29.0;

inline constexpr double kRgbToXyz[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};
inline constexpr double kXyzToRgb[3][3] = {
    {3.2404542, -1.5371385, -0.4985314},
    {-0.9692660, 1.8760108, 0.0415560},
    {0.0556434, -0.2040259, 1.0572252},
};

inline double lab_f(double t) {
  constexpr double kDelta3 = kDelta * kDelta * kDelta;
  return t > kDelta3 ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

inline double lab_f_inverse(double f) {
  return f > kDelta ? f * f * f : 3.0 * kDelta * kDelta * (f - 4.0 / 29.0);
}

inline const std::array<double, 256>& decode_table() {
  static const std::array<double, 256> table = [] {
    std::array<double, 256> t{};
    for (int v = 0; v < 256; ++v) {
      const double c = v / 255.0;
      t[v] = c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
    }
    return t;
  }();
  return table;
}

}  // namespace colorimetry_internal

// sRGB transfer function inverse: 8-bit code value -> linear light in [0, 1].
inline double srgb_decode(std::uint8_t v) {
  return colorimetry_internal::decode_table()[v];
}

// Linear light -> nonlinear sRGB in [0, 1] (unclamped).
inline double srgb_encode(double linear) {
  if (linear <= 0.0031308) return 12.92 * linear;
  return 1.055 * std::pow(linear, 1.0 / 2.4) - 0.055;
}

inline PixelLab srgb_to_lab(RgbPixel p) {
  using namespace colorimetry_internal;
  const double rgb[3] = {srgb_decode(p.r), srgb_decode(p.g), srgb_decode(p.b)};
  double xyz[3];
  for (int i = 0; i < 3; ++i) {
    xyz[i] = kRgbToXyz[i][0] * rgb[0] + kRgbToXyz[i][1] * rgb[1] +
             kRgbToXyz[i][2] * rgb[2];
  }
  const double fx = lab_f(xyz[0] / kWhiteX);
  const double fy = lab_f(xyz[1] / kWhiteY);
  const double fz = lab_f(xyz[2] / kWhiteZ);
  // The matrix row for Y sums to 1 + 1e-7, which pushes white a hair above 100.
  const double l = std::clamp(116.0 * fy - 16.0, 0.0, 100.0);
  return PixelLab{l, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

// Lab -> sRGB channel values on the [0, 255] scale, unrounded and unclamped.
struct RgbReal {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
};

inline RgbReal lab_to_srgb(const PixelLab& lab) {
  using namespace colorimetry_internal;
  const double fy = (lab.l + 16.0) / 116.0;
  const double fx = fy + lab.a / 500.0;
  const double fz = fy - lab.b / 200.0;
  const double xyz[3] = {kWhiteX * lab_f_inverse(fx),
                         kWhiteY * lab_f_inverse(fy),
                         kWhiteZ * lab_f_inverse(fz)};
  double out[3];
  for (int i = 0; i < 3; ++i) {
    const double linear = kXyzToRgb[i][0] * xyz[0] + kXyzToRgb[i][1] * xyz[1] +
                          kXyzToRgb[i][2] * xyz[2];
    out[i] = 255.0 * srgb_encode(linear);
  }
  return RgbReal{out[0], out[1], out[2]};
}

struct QuantizedRgb {
  RgbPixel pixel;
  bool clamped = false;  // at least one channel fell outside [0, 255]
};

// Lab -> nearest 8-bit sRGB, clamping out-of-gamut channels.
inline QuantizedRgb lab_to_rgb8(const PixelLab& lab) {
  const RgbReal real = lab_to_srgb(lab);
  bool clamped = false;
  auto quantize = [&clamped](double v) {
    const double rounded = std::round(v);
    if (!(rounded >= 0.0 && rounded <= 255.0)) clamped = true;
    return static_cast<std::uint8_t>(std::clamp(rounded, 0.0, 255.0));
  };
  const std::uint8_t r = quantize(real.r);
  const std::uint8_t g = quantize(real.g);
  const std::uint8_t b = quantize(real.b);
  return QuantizedRgb{RgbPixel{r, g, b}, clamped};
}

inline double grayscale(RgbPixel p, GrayMode mode = GrayMode::kRec601) {
  if (mode == GrayMode::kChannelMean) return (p.r + p.g + p.b) / 3.0;
  return 0.299 * p.r + 0.587 * p.g + 0.114 * p.b;
}

}  // namespace skintone

#endif  // SKINTONE_COLORIMETRY_HPP_
