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

#include "skintone/ita.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracle.hpp"

namespace skintone {
namespace {

RgbImage uniform_image(std::size_t w, std::size_t h, RgbPixel c) {
  return RgbImage(w, h, c);
}

TEST(ItaFromLab, KnownAngles) {
  EXPECT_NEAR(ita_from_lab(50, 10), 0.0, 1e-9);
  EXPECT_NEAR(ita_from_lab(60, 10), 45.0, 1e-9);
  EXPECT_NEAR(ita_from_lab(70, 0), 90.0, 1e-9);
  EXPECT_NEAR(ita_from_lab(30, 0), -90.0, 1e-9);
  EXPECT_NEAR(ita_from_lab(50, -10), 180.0, 1e-9);
}

TEST(ItaFromLab, MatchesOneArgumentFormWhenBPositive) {
  for (double l = 0; l <= 100; l += 7.5) {
    for (double b = 0.5; b < 60; b += 4.25) {
      EXPECT_NEAR(ita_from_lab(l, b),
                  std::atan((l - 50) / b) * 180.0 / std::numbers::pi, 1e-9);
    }
  }
}

TEST(ItaFromLab, FortyFiveDegreeDiagonal) {
  for (double k = 0.01; k < 50; k *= 1.7) {
    EXPECT_NEAR(ita_from_lab(50 + k, k), 45.0, 1e-9) << k;
  }
}

TEST(ItaFromLab, DegeneratePointIsAnError) {
  try {
    ita_from_lab(50.0, 0.0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegeneratePoint);
  }
}

TEST(Categorize, BoundaryValues) {
  EXPECT_EQ(categorize(56.0), SkinToneCategory::kVeryLight);
  EXPECT_EQ(categorize(55.0), SkinToneCategory::kLight2);
  EXPECT_EQ(categorize(48.0), SkinToneCategory::kLight1);
  EXPECT_EQ(categorize(41.0), SkinToneCategory::kIntermediate2);
  EXPECT_EQ(categorize(34.5), SkinToneCategory::kIntermediate1);
  EXPECT_EQ(categorize(28.0), SkinToneCategory::kTanned2);
  EXPECT_EQ(categorize(19.0), SkinToneCategory::kTanned1);
  EXPECT_EQ(categorize(10.0), SkinToneCategory::kDark);
  EXPECT_EQ(categorize(-5.0), SkinToneCategory::kDark);
  EXPECT_EQ(categorize(180.0), SkinToneCategory::kVeryLight);
  EXPECT_EQ(categorize(std::nextafter(55.0, 100.0)),
            SkinToneCategory::kVeryLight);
}

TEST(Categorize, BinsPartitionTheLine) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(-200.0, 200.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = angle(rng);
    int hits = 0;
    for (SkinToneCategory c : kAllCategories) {
      const ItaRange r = ita_range(c);
      if (a > r.lower && a <= r.upper) {
        ++hits;
        EXPECT_EQ(categorize(a), c);
      }
    }
    EXPECT_EQ(hits, 1) << a;
  }
}

TEST(Categorize, AbbreviationsRoundTrip) {
  for (SkinToneCategory c : kAllCategories) {
    EXPECT_EQ(category_from_abbreviation(abbreviation(c)), c);
  }
  EXPECT_FALSE(category_from_abbreviation("medium").has_value());
}

TEST(ExtractNondiseased, AllIncluded) {
  RgbImage img(2, 2);
  img.at(0, 0) = {1, 1, 1};
  img.at(1, 0) = {2, 2, 2};
  img.at(0, 1) = {3, 3, 3};
  img.at(1, 1) = {4, 4, 4};
  const auto px = extract_nondiseased(img, ExclusionMask(2, 2));
  ASSERT_EQ(px.size(), 4u);
  EXPECT_EQ(px[0].r, 1);
  EXPECT_EQ(px[3].r, 4);
}

TEST(ExtractNondiseased, TopRowExcluded) {
  RgbImage img(2, 2);
  img.at(0, 0) = {1, 1, 1};
  img.at(1, 0) = {2, 2, 2};
  img.at(0, 1) = {3, 3, 3};
  img.at(1, 1) = {4, 4, 4};
  ExclusionMask mask(2, 2);
  mask.set(0, 0, true);
  mask.set(1, 0, true);
  const auto px = extract_nondiseased(img, mask);
  ASSERT_EQ(px.size(), 2u);
  EXPECT_EQ(px[0], (RgbPixel{3, 3, 3}));
  EXPECT_EQ(px[1], (RgbPixel{4, 4, 4}));
}

TEST(ExtractNondiseased, Errors) {
  RgbImage img(2, 2);
  try {
    extract_nondiseased(img, ExclusionMask(2, 2, true));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyRegion);
  }
  try {
    extract_nondiseased(img, ExclusionMask(3, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(TrimOneSigma, IdenticalPixelsAllRetained) {
  std::vector<PixelLab> lab(17, PixelLab{61.3, 9.1, 14.7});
  EXPECT_EQ(trim_one_sigma(lab, 1.0).size(), 17u);
}

TEST(TrimOneSigma, SingleOutlierRemoved) {
  // mean 95, population sd 135; |500 - 95| = 405 > 135, |50 - 95| = 45.
  std::vector<PixelLab> lab(9, PixelLab{50, 0, 10});
  lab.push_back({500, 0, 10});
  const auto kept = trim_one_sigma(lab, 1.0);
  ASSERT_EQ(kept.size(), 9u);
  for (const auto& p : kept) EXPECT_EQ(p.l, 50);
}

TEST(TrimOneSigma, TwoPointsSitExactlyOnBoundary) {
  for (double l1 : {10.0, 33.3, 61.7}) {
    for (double l2 : {12.1, 47.9, 99.0}) {
      std::vector<PixelLab> lab = {{l1, 0, 7.3}, {l2, 0, 7.3}};
      EXPECT_EQ(trim_one_sigma(lab, 1.0).size(), 2u) << l1 << " " << l2;
    }
  }
}

TEST(TrimOneSigma, JointRuleFallsBackWhenNothingSurvives) {
  // Each point fails either the L or the b condition.
  std::vector<PixelLab> lab = {
      {51, 0, 10}, {49, 0, 10}, {50, 0, 11}, {50, 0, 9}};
  const TrimResult t = trim_membership(lab, 1.0);
  EXPECT_TRUE(t.fallback);
  EXPECT_EQ(t.n_retained, 4u);
}

TEST(TrimOneSigma, NarrowerSigmaKeepsFewer) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<PixelLab> lab;
  for (int i = 0; i < 500; ++i) lab.push_back({60 + n(rng), 0, 15 + n(rng)});
  EXPECT_LT(trim_one_sigma(lab, 0.5).size(), trim_one_sigma(lab, 1.0).size());
  EXPECT_LT(trim_one_sigma(lab, 1.0).size(), trim_one_sigma(lab, 2.0).size());
}

TEST(ComputeIta, UniformImageBothModes) {
  const RgbPixel c{201, 160, 140};
  const PixelLab lab = srgb_to_lab(c);
  const double expected = ita_from_lab(lab.l, lab.b);
  const RgbImage img = uniform_image(9, 7, c);
  for (TrimMode mode : {TrimMode::kMeanOfMeans, TrimMode::kMeanOfPixelItas}) {
    ItaConfig cfg;
    cfg.trim_mode = mode;
    const ItaEstimate e = compute_ita(img, ExclusionMask(9, 7), cfg);
    EXPECT_EQ(e.ita_degrees, expected);
    EXPECT_EQ(e.n_total, 63u);
    EXPECT_EQ(e.n_retained, 63u);
    EXPECT_EQ(e.std_l, 0.0);
    EXPECT_EQ(e.category, categorize(expected));
  }
}

TEST(ComputeIta, ExclusionRemovesLesionBlob) {
  const RgbPixel skin{224, 180, 160};
  const RgbPixel lesion{90, 50, 40};
  RgbImage img = uniform_image(20, 20, skin);
  ExclusionMask mask(20, 20);
  for (std::size_t y = 5; y < 12; ++y) {
    for (std::size_t x = 6; x < 15; ++x) {
      img.at(x, y) = lesion;
      mask.set(x, y, true);
    }
  }
  const PixelLab lab = srgb_to_lab(skin);
  const ItaEstimate e = compute_ita(img, mask, ItaConfig{});
  const ItaEstimate clean =
      compute_ita(uniform_image(20, 20, skin), ExclusionMask(20, 20), ItaConfig{});
  EXPECT_EQ(e.ita_degrees, clean.ita_degrees);
  EXPECT_NEAR(e.ita_degrees, ita_from_lab(lab.l, lab.b), 1e-12);
  EXPECT_EQ(e.n_total, 400u - 63u);
}

TEST(ComputeIta, GrayscaleStatisticsUseUntrimmedPixels) {
  RgbImage img(4, 1);
  img[0] = {10, 10, 10};
  img[1] = {20, 20, 20};
  img[2] = {30, 30, 30};
  img[3] = {250, 250, 250};
  const ItaEstimate e = compute_ita(img, ExclusionMask(4, 1), ItaConfig{});
  EXPECT_NEAR(e.mean_gray, (10 + 20 + 30 + 250) / 4.0, 1e-9);
  EXPECT_NEAR(e.median_gray, 25.0, 1e-9);
  EXPECT_LT(e.n_retained, e.n_total);
}

TEST(ComputeIta, RejectsBadConfig) {
  ItaConfig cfg;
  cfg.trim_sigma = 0.0;
  try {
    compute_ita(RgbImage(2, 2), ExclusionMask(2, 2), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUsage);
  }
}

// Random image with a small palette so that ties and exact trimming
// boundaries occur often.
struct RandomCase {
  RgbImage image;
  ExclusionMask mask;
};

RandomCase random_case(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> side(1, 8);
  std::uniform_int_distribution<int> channel(0, 255);
  std::uniform_int_distribution<int> palette_size(1, 4);
  const std::size_t w = side(rng);
  const std::size_t h = side(rng);
  std::vector<RgbPixel> palette(palette_size(rng));
  for (auto& p : palette) {
    p = {static_cast<std::uint8_t>(channel(rng)),
         static_cast<std::uint8_t>(channel(rng)),
         static_cast<std::uint8_t>(channel(rng))};
  }
  const bool use_palette = rng() % 2 == 0;
  RandomCase c{RgbImage(w, h), ExclusionMask(w, h)};
  std::uniform_int_distribution<std::size_t> pick(0, palette.size() - 1);
  for (std::size_t i = 0; i < c.image.size(); ++i) {
    c.image[i] = use_palette ? palette[pick(rng)]
                             : RgbPixel{static_cast<std::uint8_t>(channel(rng)),
                                        static_cast<std::uint8_t>(channel(rng)),
                                        static_cast<std::uint8_t>(channel(rng))};
    c.mask.set(i, rng() % 3 == 0);
  }
  c.mask.set(rng() % c.image.size(), false);
  return c;
}

TEST(ComputeIta, MatchesIndependentOracle) {
  std::mt19937_64 rng(20200611);
  for (int trial = 0; trial < 300; ++trial) {
    const RandomCase c = random_case(rng);
    std::vector<std::array<int, 3>> pixels;
    std::vector<bool> excluded;
    for (std::size_t i = 0; i < c.image.size(); ++i) {
      pixels.push_back({c.image[i].r, c.image[i].g, c.image[i].b});
      excluded.push_back(c.mask.excluded(i));
    }
    const oracle::Result ref = oracle::run(pixels, excluded, 1.0);
    for (TrimMode mode : {TrimMode::kMeanOfMeans, TrimMode::kMeanOfPixelItas}) {
      ItaConfig cfg;
      cfg.trim_mode = mode;
      TrimResult trim;
      const ItaEstimate e = compute_ita(c.image, c.mask, cfg, &trim);
      ASSERT_EQ(trim.retained, ref.kept) << "trial " << trial;
      ASSERT_EQ(trim.fallback, ref.fallback);
      const double expected = mode == TrimMode::kMeanOfMeans
                                  ? ref.ita_mean_of_means
                                  : ref.ita_mean_of_pixel_itas;
      ASSERT_NEAR(e.ita_degrees, expected, 1e-9) << "trial " << trial;
    }
  }
}

TEST(ComputeIta, InvariantToPermutationOfIncludedPixels) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    RandomCase c = random_case(rng);
    const ItaEstimate before = compute_ita(c.image, c.mask, ItaConfig{});
    // Shuffle pixel/mask pairs together.
    std::vector<std::size_t> order(c.image.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    RandomCase p{RgbImage(c.image.width(), c.image.height()),
                 ExclusionMask(c.image.width(), c.image.height())};
    for (std::size_t i = 0; i < order.size(); ++i) {
      p.image[i] = c.image[order[i]];
      p.mask.set(i, c.mask.excluded(order[i]));
    }
    const ItaEstimate after = compute_ita(p.image, p.mask, ItaConfig{});
    EXPECT_NEAR(after.ita_degrees, before.ita_degrees, 1e-9);
    EXPECT_EQ(after.n_retained, before.n_retained);
  }
}

TEST(ComputeIta, ExcludedPixelsNeverMatter) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> channel(0, 255);
  for (int trial = 0; trial < 50; ++trial) {
    RandomCase c = random_case(rng);
    const ItaEstimate before = compute_ita(c.image, c.mask, ItaConfig{});
    for (std::size_t i = 0; i < c.image.size(); ++i) {
      if (c.mask.excluded(i)) {
        c.image[i] = {static_cast<std::uint8_t>(channel(rng)),
                      static_cast<std::uint8_t>(channel(rng)),
                      static_cast<std::uint8_t>(channel(rng))};
      }
    }
    const ItaEstimate after = compute_ita(c.image, c.mask, ItaConfig{});
    EXPECT_EQ(after.ita_degrees, before.ita_degrees);
    EXPECT_EQ(after.category, categorize(after.ita_degrees));
  }
}

}  // namespace
}  // namespace skintone
