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

// Individual Typology Angle (ITA) estimation and skin-tone categorization.

#ifndef SKINTONE_ITA_HPP_
#define SKINTONE_ITA_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skintone/colorimetry.hpp"
#include "skintone/error.hpp"
#include "skintone/image.hpp"

namespace skintone {

// The eight ITA bins, lightest first. Each bin is the half-open interval
// (lower, upper] in degrees.
enum class SkinToneCategory {
  kVeryLight,
  kLight2,
  kLight1,
  kIntermediate2,
  kIntermediate1,
  kTanned2,
  kTanned1,
  kDark,
};

inline constexpr std::size_t kNumCategories = 8;

inline constexpr std::array<SkinToneCategory, kNumCategories> kAllCategories = {
    SkinToneCategory::kVeryLight,     SkinToneCategory::kLight2,
    SkinToneCategory::kLight1,        SkinToneCategory::kIntermediate2,
    SkinToneCategory::kIntermediate1, SkinToneCategory::kTanned2,
    SkinToneCategory::kTanned1,       SkinToneCategory::kDark,
};

inline constexpr std::size_t index_of(SkinToneCategory c) {
  return static_cast<std::size_t>(c);
}

inline constexpr std::string_view abbreviation(SkinToneCategory c) {
  constexpr std::array<std::string_view, kNumCategories> kNames = {
      "very_lt", "lt2", "lt1", "int2", "int1", "tan2", "tan1", "dark"};
  return kNames[index_of(c)];
}

inline constexpr std::string_view display_name(SkinToneCategory c) {
  constexpr std::array<std::string_view, kNumCategories> kNames = {
      "Very Light",     "Light 2",  "Light 1",  "Intermediate 2",
      "Intermediate 1", "Tanned 2", "Tanned 1", "Dark"};
  return kNames[index_of(c)];
}

inline std::optional<SkinToneCategory> category_from_abbreviation(
    std::string_view name) {
  for (SkinToneCategory c : kAllCategories) {
    if (abbreviation(c) == name) return c;
  }
  return std::nullopt;
}

// Lower bounds (exclusive) of each bin; the upper bound of bin i is the lower
// bound of bin i-1.
inline constexpr std::array<double, kNumCategories - 1> kCategoryLowerBounds = {
    55.0, 48.0, 41.0, 34.5, 28.0, 19.0, 10.0};

struct ItaRange {
  double lower;  // exclusive, -inf for the darkest bin
  double upper;  // inclusive, +inf for the lightest bin
};

inline ItaRange ita_range(SkinToneCategory c) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const std::size_t i = index_of(c);
  const double lower = i < kCategoryLowerBounds.size() ? kCategoryLowerBounds[i]
                                                       : -kInf;
  const double upper = i == 0 ? kInf : kCategoryLowerBounds[i - 1];
  return {lower, upper};
}

inline SkinToneCategory categorize(double ita_degrees) {
  if (std::isnan(ita_degrees)) {
    throw Error(ErrorCode::kUsage, "cannot categorize a NaN ITA value");
  }
  for (std::size_t i = 0; i < kCategoryLowerBounds.size(); ++i) {
    if (ita_degrees > kCategoryLowerBounds[i]) return kAllCategories[i];
  }
  return SkinToneCategory::kDark;
}

// ITA in degrees via the two-argument arctangent of (L - 50, b), so that
// b <= 0 is handled. Result lies in (-180, 180].
inline double ita_from_lab(double l, double b) {
  if (l == 50.0 && b == 0.0) {
    throw Error(ErrorCode::kDegeneratePoint,
                "ITA is undefined at L = 50, b = 0");
  }
  const double degrees = std::atan2(l - 50.0, b) * (180.0 / std::numbers::pi);
  return degrees == -180.0 ? 180.0 : degrees;
}

enum class TrimMode { kMeanOfMeans, kMeanOfPixelItas };

inline std::string_view trim_mode_name(TrimMode m) {
  return m == TrimMode::kMeanOfMeans ? "mean_of_means" : "mean_of_pixel_itas";
}

inline std::optional<TrimMode> parse_trim_mode(std::string_view s) {
  if (s == "mean_of_means") return TrimMode::kMeanOfMeans;
  if (s == "mean_of_pixel_itas") return TrimMode::kMeanOfPixelItas;
  return std::nullopt;
}

inline std::string_view mask_polarity_name(MaskPolarity p) {
  return p == MaskPolarity::kWhiteExcluded ? "white_excluded"
                                           : "black_excluded";
}

inline std::optional<MaskPolarity> parse_mask_polarity(std::string_view s) {
  if (s == "white_excluded") return MaskPolarity::kWhiteExcluded;
  if (s == "black_excluded") return MaskPolarity::kBlackExcluded;
  return std::nullopt;
}

inline std::string_view gray_mode_name(GrayMode m) {
  return m == GrayMode::kRec601 ? "rec601" : "channel_mean";
}

inline std::optional<GrayMode> parse_gray_mode(std::string_view s) {
  if (s == "rec601") return GrayMode::kRec601;
  if (s == "channel_mean") return GrayMode::kChannelMean;
  return std::nullopt;
}

struct ItaConfig {
  TrimMode trim_mode = TrimMode::kMeanOfMeans;
  double trim_sigma = 1.0;
  int mask_threshold = 128;
  MaskPolarity mask_polarity = MaskPolarity::kWhiteExcluded;
  GrayMode gray_mode = GrayMode::kRec601;

  void validate() const {
    if (!(trim_sigma > 0.0) || !std::isfinite(trim_sigma)) {
      throw Error(ErrorCode::kUsage, "trim_sigma must be a positive number");
    }
    if (mask_threshold < 0 || mask_threshold > 255) {
      throw Error(ErrorCode::kUsage, "mask_threshold must lie in [0, 255]");
    }
  }
};

struct ItaEstimate {
  double ita_degrees = 0.0;
  SkinToneCategory category = SkinToneCategory::kDark;
  std::size_t n_total = 0;     // non-excluded pixels
  std::size_t n_retained = 0;  // after trimming
  // CIELab statistics over all non-excluded pixels (population std).
  double mean_l = 0.0;
  double mean_b = 0.0;
  double std_l = 0.0;
  double std_b = 0.0;
  // Grayscale statistics over all non-excluded pixels, untrimmed.
  double mean_gray = 0.0;
  double median_gray = 0.0;
  // Joint trimming rejected every pixel; the untrimmed set was used instead.
  bool trim_fallback = false;
};

namespace ita_internal {

// Mean computed relative to the first element, exact for constant input.
template <typename Values>
double shifted_mean(const Values& values) {
  const double origin = values[0];
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) sum += values[i] - origin;
  return origin + sum / static_cast<double>(values.size());
}

template <typename Values>
double population_std(const Values& values, double mean) {
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - mean;
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(values.size()));
}

inline double median(std::vector<double> values) {
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

// Absolute slack on the inclusive boundary test; absorbs rounding in the
// mean and standard deviation so that exact-boundary points are kept.
inline double boundary_slack(double mean) {
  return 1e-12 * (1.0 + std::abs(mean));
}

}  // namespace ita_internal

struct TrimResult {
  std::vector<bool> retained;  // parallel to the input
  std::size_t n_retained = 0;
  bool fallback = false;
};

// Joint one-sigma rule: keep pixel i iff |L_i - mean_L| <= sigma * std_L and
// |b_i - mean_b| <= sigma * std_b, with population standard deviations over
// the whole input. A zero deviation makes its condition vacuous. If the joint
// rule rejects everything, all pixels are kept and `fallback` is set.
inline TrimResult trim_membership(std::span<const PixelLab> lab,
                                  double sigma) {
  if (lab.empty()) {
    throw Error(ErrorCode::kEmptyRegion, "cannot trim an empty pixel set");
  }
  std::vector<double> ls(lab.size());
  std::vector<double> bs(lab.size());
  for (std::size_t i = 0; i < lab.size(); ++i) {
    ls[i] = lab[i].l;
    bs[i] = lab[i].b;
  }
  const double mean_l = ita_internal::shifted_mean(ls);
  const double mean_b = ita_internal::shifted_mean(bs);
  const double limit_l = sigma * ita_internal::population_std(ls, mean_l) +
                         ita_internal::boundary_slack(mean_l);
  const double limit_b = sigma * ita_internal::population_std(bs, mean_b) +
                         ita_internal::boundary_slack(mean_b);

  TrimResult result;
  result.retained.resize(lab.size());
  for (std::size_t i = 0; i < lab.size(); ++i) {
    const bool keep = std::abs(ls[i] - mean_l) <= limit_l &&
                      std::abs(bs[i] - mean_b) <= limit_b;
    result.retained[i] = keep;
    result.n_retained += keep ? 1 : 0;
  }
  if (result.n_retained == 0) {
    result.retained.assign(lab.size(), true);
    result.n_retained = lab.size();
    result.fallback = true;
  }
  return result;
}

inline std::vector<PixelLab> trim_one_sigma(std::span<const PixelLab> lab,
                                            double sigma) {
  const TrimResult trim = trim_membership(lab, sigma);
  std::vector<PixelLab> out;
  out.reserve(trim.n_retained);
  for (std::size_t i = 0; i < lab.size(); ++i) {
    if (trim.retained[i]) out.push_back(lab[i]);
  }
  return out;
}

// Non-excluded pixels in row-major order.
inline std::vector<RgbPixel> extract_nondiseased(const RgbImage& image,
                                                 const ExclusionMask& mask) {
  require_same_shape(image, mask, "image and mask dimensions differ");
  std::vector<RgbPixel> out;
  out.reserve(mask.size() - mask.count_excluded());
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (!mask.excluded(i)) out.push_back(image[i]);
  }
  if (out.empty()) {
    throw Error(ErrorCode::kEmptyRegion, "mask excludes every pixel");
  }
  return out;
}

// ITA estimate over an already-extracted pixel set. `trim_out`, when given,
// receives the trimming membership over `pixels`.
inline ItaEstimate compute_ita_from_pixels(std::span<const RgbPixel> pixels,
                                           const ItaConfig& cfg,
                                           TrimResult* trim_out = nullptr) {
  cfg.validate();
  if (pixels.empty()) {
    throw Error(ErrorCode::kEmptyRegion, "no non-excluded pixels");
  }
  const std::size_t n = pixels.size();
  std::vector<PixelLab> lab(n);
  std::vector<double> ls(n);
  std::vector<double> bs(n);
  std::vector<double> grays(n);
  for (std::size_t i = 0; i < n; ++i) {
    lab[i] = srgb_to_lab(pixels[i]);
    ls[i] = lab[i].l;
    bs[i] = lab[i].b;
    grays[i] = grayscale(pixels[i], cfg.gray_mode);
  }

  ItaEstimate est;
  est.n_total = n;
  est.mean_l = ita_internal::shifted_mean(ls);
  est.mean_b = ita_internal::shifted_mean(bs);
  est.std_l = ita_internal::population_std(ls, est.mean_l);
  est.std_b = ita_internal::population_std(bs, est.mean_b);
  est.mean_gray = ita_internal::shifted_mean(grays);
  est.median_gray = ita_internal::median(std::move(grays));

  TrimResult trim = trim_membership(lab, cfg.trim_sigma);
  est.n_retained = trim.n_retained;
  est.trim_fallback = trim.fallback;

  std::vector<double> kept_l;
  std::vector<double> kept_b;
  kept_l.reserve(trim.n_retained);
  kept_b.reserve(trim.n_retained);
  for (std::size_t i = 0; i < n; ++i) {
    if (!trim.retained[i]) continue;
    kept_l.push_back(ls[i]);
    kept_b.push_back(bs[i]);
  }

  if (cfg.trim_mode == TrimMode::kMeanOfMeans) {
    est.ita_degrees = ita_from_lab(ita_internal::shifted_mean(kept_l),
                                   ita_internal::shifted_mean(kept_b));
  } else {
    std::vector<double> itas(kept_l.size());
    for (std::size_t i = 0; i < kept_l.size(); ++i) {
      itas[i] = ita_from_lab(kept_l[i], kept_b[i]);
    }
    est.ita_degrees = ita_internal::shifted_mean(itas);
  }
  est.category = categorize(est.ita_degrees);
  if (trim_out != nullptr) *trim_out = std::move(trim);
  return est;
}

inline ItaEstimate compute_ita(const RgbImage& image, const ExclusionMask& mask,
                               const ItaConfig& cfg,
                               TrimResult* trim_out = nullptr) {
  const std::vector<RgbPixel> pixels = extract_nondiseased(image, mask);
  return compute_ita_from_pixels(pixels, cfg, trim_out);
}

}  // namespace skintone

#endif  // SKINTONE_ITA_HPP_
