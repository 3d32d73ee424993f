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

#include "skintone/seg_eval.hpp"

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracle.hpp"

namespace skintone {
namespace {

ExclusionMask from_bits(std::size_t w, std::size_t h,
                        const std::vector<int>& bits) {
  ExclusionMask m(w, h);
  for (std::size_t i = 0; i < bits.size(); ++i) m.set(i, bits[i] != 0);
  return m;
}

ExclusionMask random_mask(std::mt19937_64& rng, std::size_t w, std::size_t h,
                          double p) {
  std::bernoulli_distribution coin(p);
  ExclusionMask m(w, h);
  for (std::size_t i = 0; i < m.size(); ++i) m.set(i, coin(rng));
  return m;
}

ExclusionMask complement(const ExclusionMask& m) {
  ExclusionMask out(m.width(), m.height());
  for (std::size_t i = 0; i < m.size(); ++i) out.set(i, !m.excluded(i));
  return out;
}

TEST(MaskMetrics, IdenticalMasks) {
  std::mt19937_64 rng(1);
  const ExclusionMask m = random_mask(rng, 17, 9, 0.3);
  const MaskMetrics r = mask_pixel_metrics(m, m);
  EXPECT_DOUBLE_EQ(r.accuracy, 1.0);
  EXPECT_DOUBLE_EQ(r.false_negative_rate, 0.0);
}

TEST(MaskMetrics, ComplementMask) {
  std::mt19937_64 rng(2);
  const ExclusionMask gt = random_mask(rng, 12, 12, 0.4);
  ASSERT_GT(gt.count_excluded(), 0u);
  const MaskMetrics r = mask_pixel_metrics(complement(gt), gt);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.0);
  EXPECT_DOUBLE_EQ(r.false_negative_rate, 1.0);
}

TEST(MaskMetrics, FourByFourCase) {
  // Lesion is the centre 2x2 block; the prediction finds only two of them.
  const ExclusionMask gt = from_bits(4, 4, {0, 0, 0, 0,  //
                                            0, 1, 1, 0,  //
                                            0, 1, 1, 0,  //
                                            0, 0, 0, 0});
  const ExclusionMask pred = from_bits(4, 4, {0, 0, 0, 0,  //
                                              0, 1, 1, 0,  //
                                              0, 0, 0, 0,  //
                                              0, 0, 0, 0});
  const MaskMetrics r = mask_pixel_metrics(pred, gt);
  EXPECT_DOUBLE_EQ(r.accuracy, 14.0 / 16.0);
  EXPECT_DOUBLE_EQ(r.false_negative_rate, 0.5);
  EXPECT_EQ(r.tp, 2u);
  EXPECT_EQ(r.fn, 2u);
  EXPECT_EQ(r.fp, 0u);
  EXPECT_EQ(r.tn, 12u);
}

TEST(MaskMetrics, NoPositivesGivesZeroFnr) {
  const ExclusionMask gt(5, 5, false);
  ExclusionMask pred(5, 5, false);
  pred.set(0, true);
  const MaskMetrics r = mask_pixel_metrics(pred, gt);
  EXPECT_DOUBLE_EQ(r.false_negative_rate, 0.0);
  EXPECT_DOUBLE_EQ(r.accuracy, 24.0 / 25.0);
}

TEST(MaskMetrics, ShapeMismatch) {
  try {
    mask_pixel_metrics(ExclusionMask(3, 4), ExclusionMask(4, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(MaskMetrics, AccuracyIsSymmetric) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const ExclusionMask a = random_mask(rng, 8 + t % 5, 7, 0.5);
    const ExclusionMask b = random_mask(rng, 8 + t % 5, 7, 0.2);
    EXPECT_DOUBLE_EQ(mask_pixel_metrics(a, b).accuracy,
                     mask_pixel_metrics(b, a).accuracy);
  }
}

TEST(MaskMetrics, DroppingFalsePositivesNeverHurts) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 50; ++t) {
    const ExclusionMask gt = random_mask(rng, 10, 10, 0.3);
    ExclusionMask pred = random_mask(rng, 10, 10, 0.5);
    const MaskMetrics before = mask_pixel_metrics(pred, gt);
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (pred.excluded(i) && !gt.excluded(i) && rng() % 2 == 0) {
        pred.set(i, false);
      }
    }
    const MaskMetrics after = mask_pixel_metrics(pred, gt);
    EXPECT_GE(after.accuracy, before.accuracy);
    EXPECT_DOUBLE_EQ(after.false_negative_rate, before.false_negative_rate);
  }
}

TEST(MaskMetrics, DroppingTruePositivesRaisesFnr) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const ExclusionMask gt = random_mask(rng, 10, 10, 0.3);
    ExclusionMask pred = gt;
    const MaskMetrics before = mask_pixel_metrics(pred, gt);
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (pred.excluded(i)) {
        pred.set(i, false);
        break;
      }
    }
    const MaskMetrics after = mask_pixel_metrics(pred, gt);
    EXPECT_GT(after.false_negative_rate, before.false_negative_rate);
    EXPECT_LT(after.accuracy, before.accuracy);
  }
}

struct Fixture {
  RgbImage image;
  ExclusionMask gt;
  ExclusionMask pred;
};

// Skin with a dark circular lesion; the prediction under-segments the lesion.
Fixture two_tone(std::size_t n, RgbPixel skin, RgbPixel lesion, double r_gt,
                 double r_pred) {
  Fixture f{RgbImage(n, n, skin), ExclusionMask(n, n), ExclusionMask(n, n)};
  const double c = (static_cast<double>(n) - 1) / 2;
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      const double d = std::hypot(x - c, y - c);
      if (d <= r_gt) {
        f.image.at(x, y) = lesion;
        f.gt.set(x, y, true);
      }
      if (d <= r_pred) f.pred.set(x, y, true);
    }
  }
  return f;
}

// Lesion whose colour fades into the surrounding skin towards its border, so
// that an under-segmented rim survives the one-sigma trim.
Fixture graded(std::size_t n, RgbPixel skin, RgbPixel lesion, double r_gt,
               double r_pred) {
  Fixture f = two_tone(n, skin, lesion, r_gt, r_pred);
  const double c = (static_cast<double>(n) - 1) / 2;
  auto mix = [](std::uint8_t a, std::uint8_t b, double t) {
    return static_cast<std::uint8_t>(std::lround(a + (b - a) * t));
  };
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      const double d = std::hypot(x - c, y - c);
      if (d > r_gt) continue;
      const double t = (d / r_gt) * (d / r_gt);
      f.image.at(x, y) = {mix(lesion.r, skin.r, t), mix(lesion.g, skin.g, t),
                          mix(lesion.b, skin.b, t)};
    }
  }
  return f;
}

double oracle_ita(const RgbImage& img, const ExclusionMask& m, bool pixelwise) {
  std::vector<std::array<int, 3>> px;
  std::vector<bool> ex;
  for (std::size_t i = 0; i < img.size(); ++i) {
    px.push_back({img[i].r, img[i].g, img[i].b});
    ex.push_back(m.excluded(i));
  }
  const oracle::Result r = oracle::run(px, ex, 1.0);
  return pixelwise ? r.ita_mean_of_pixel_itas : r.ita_mean_of_means;
}

TEST(SegmentationReport, PerfectMaskHasZeroItaError) {
  const Fixture f = two_tone(40, {220, 180, 150}, {90, 50, 40}, 10, 10);
  const SegSample s{"img", &f.image, &f.gt, &f.gt};
  const SegQualityReport r =
      evaluate_segmentation(std::span<const SegSample>(&s, 1), ItaConfig{});
  EXPECT_DOUBLE_EQ(r.pixel_accuracy, 1.0);
  EXPECT_DOUBLE_EQ(r.false_negative_rate, 0.0);
  ASSERT_TRUE(r.ita_mae_degrees.has_value());
  EXPECT_DOUBLE_EQ(*r.ita_mae_degrees, 0.0);
}

TEST(SegmentationReport, UniformImageAnyMaskHasZeroItaError) {
  std::mt19937_64 rng(6);
  const RgbImage img(20, 20, RgbPixel{200, 160, 130});
  for (int t = 0; t < 10; ++t) {
    const ExclusionMask gt = random_mask(rng, 20, 20, 0.3);
    const ExclusionMask pred = random_mask(rng, 20, 20, 0.6);
    const SegSample s{"u", &img, &pred, &gt};
    EXPECT_EQ(ita_mae(std::span<const SegSample>(&s, 1), ItaConfig{}), 0.0);
  }
}

TEST(SegmentationReport, LeakyMaskMatchesOracle) {
  for (TrimMode mode : {TrimMode::kMeanOfMeans, TrimMode::kMeanOfPixelItas}) {
    ItaConfig cfg;
    cfg.trim_mode = mode;
    const Fixture f = graded(60, {225, 185, 155}, {110, 60, 45}, 20, 8);
    const SegSample s{"leaky", &f.image, &f.pred, &f.gt};
    const SegImageResult r = evaluate_sample(s, cfg);
    const bool pix = mode == TrimMode::kMeanOfPixelItas;
    const double want =
        std::abs(oracle_ita(f.image, f.pred, pix) - oracle_ita(f.image, f.gt, pix));
    ASSERT_TRUE(r.abs_delta_ita.has_value());
    EXPECT_NEAR(*r.abs_delta_ita, want, 1e-9);
    EXPECT_GT(*r.abs_delta_ita, 0.0);
  }
}

TEST(SegmentationReport, UnweightedMeanOverImages) {
  const Fixture a = two_tone(10, {200, 160, 130}, {90, 50, 40}, 3, 3);
  const Fixture b = two_tone(30, {200, 160, 130}, {90, 50, 40}, 8, 4);
  const std::vector<SegSample> samples = {{"a", &a.image, &a.pred, &a.gt},
                                          {"b", &b.image, &b.pred, &b.gt}};
  const SegQualityReport r = evaluate_segmentation(samples, ItaConfig{});
  const double acc_b = mask_pixel_metrics(b.pred, b.gt).accuracy;
  EXPECT_NEAR(r.pixel_accuracy, (1.0 + acc_b) / 2, 1e-15);
  EXPECT_EQ(r.n_images, 2u);
  ASSERT_EQ(r.per_image.size(), 2u);
  EXPECT_EQ(r.per_image[1].image_id, "b");
}

TEST(SegmentationReport, FullyExcludedGroundTruthSkipsItaTerm) {
  const RgbImage img(8, 8, RgbPixel{200, 160, 130});
  const ExclusionMask gt(8, 8, true);
  const ExclusionMask pred(8, 8, false);
  const Fixture other = two_tone(10, {200, 160, 130}, {90, 50, 40}, 3, 3);
  const std::vector<SegSample> samples = {
      {"all_lesion", &img, &pred, &gt},
      {"ok", &other.image, &other.pred, &other.gt}};
  const SegQualityReport r = evaluate_segmentation(samples, ItaConfig{});
  EXPECT_EQ(r.n_images, 2u);
  EXPECT_EQ(r.n_ita_images, 1u);
  EXPECT_FALSE(r.per_image[0].abs_delta_ita.has_value());
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_NE(r.warnings[0].find("all_lesion"), std::string::npos);
}

TEST(SegmentationReport, FullyExcludedPredictionIsFatal) {
  const RgbImage img(8, 8, RgbPixel{200, 160, 130});
  const ExclusionMask gt(8, 8, false);
  const ExclusionMask pred(8, 8, true);
  const SegSample s{"bad_pred", &img, &pred, &gt};
  try {
    evaluate_sample(s, ItaConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyRegion);
    EXPECT_NE(std::string(e.what()).find("bad_pred"), std::string::npos);
  }
}

TEST(SegmentationReport, EmptyInputIsAnError) {
  try {
    evaluate_segmentation(std::span<const SegSample>(), ItaConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoEvaluablePairs);
  }
}

}  // namespace
}  // namespace skintone
