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

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <jpeglib.h>

#include <gtest/gtest.h>

#include "skintone/audit.hpp"
#include "skintone/image_io.hpp"
#include "skintone/parallel.hpp"
#include "skintone/svg.hpp"
#include "temp_dir.hpp"

namespace skintone {
namespace {

namespace fs = std::filesystem;

void write_jpeg(const fs::path& path, const RgbImage& img, int quality) {
  FILE* f = std::fopen(path.string().c_str(), "wb");
  ASSERT_NE(f, nullptr);
  jpeg_compress_struct cinfo;
  jpeg_error_mgr jerr;
  cinfo.err = jpeg_std_error(&jerr);
  jpeg_create_compress(&cinfo);
  jpeg_stdio_dest(&cinfo, f);
  cinfo.image_width = static_cast<JDIMENSION>(img.width());
  cinfo.image_height = static_cast<JDIMENSION>(img.height());
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  std::vector<JSAMPLE> row(img.width() * 3);
  while (cinfo.next_scanline < cinfo.image_height) {
    for (std::size_t x = 0; x < img.width(); ++x) {
      const RgbPixel& p = img.at(x, cinfo.next_scanline);
      row[3 * x] = p.r;
      row[3 * x + 1] = p.g;
      row[3 * x + 2] = p.b;
    }
    JSAMPROW ptr = row.data();
    jpeg_write_scanlines(&cinfo, &ptr, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  std::fclose(f);
}

RgbImage random_image(std::mt19937_64& rng, std::size_t w, std::size_t h) {
  RgbImage img(w, h);
  for (auto& p : img.pixels()) {
    p = {static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng()),
         static_cast<std::uint8_t>(rng())};
  }
  return img;
}

GrayImage disc_mask(std::size_t n, double r) {
  GrayImage g(n, n);
  const double c = (static_cast<double>(n) - 1) / 2;
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      g.at(x, y) = std::hypot(x - c, y - c) <= r ? 255 : 0;
    }
  }
  return g;
}

TEST(ImageIo, PngRoundTripIsExact) {
  testing_util::TempDir dir;
  std::mt19937_64 rng(1);
  const RgbImage img = random_image(rng, 13, 7);
  write_png(dir / "sub/x.png", img);
  EXPECT_EQ(read_rgb_image(dir / "sub/x.png"), img);
  const GrayImage g = disc_mask(9, 3);
  write_png(dir / "m.png", g);
  EXPECT_EQ(read_gray_image(dir / "m.png"), g);
}

TEST(ImageIo, GrayPngReadsAsNeutralRgb) {
  testing_util::TempDir dir;
  GrayImage g(3, 1);
  g[0] = 0;
  g[1] = 119;
  g[2] = 255;
  write_png(dir / "g.png", g);
  const RgbImage rgb = read_rgb_image(dir / "g.png");
  EXPECT_EQ(rgb[1], (RgbPixel{119, 119, 119}));
  EXPECT_EQ(rgb[2], (RgbPixel{255, 255, 255}));
}

TEST(ImageIo, JpegDecodes) {
  testing_util::TempDir dir;
  const RgbImage img(32, 24, RgbPixel{200, 150, 120});
  write_jpeg(dir / "a.jpg", img, 100);
  const RgbImage back = read_rgb_image(dir / "a.jpg");
  ASSERT_EQ(back.width(), 32u);
  ASSERT_EQ(back.height(), 24u);
  for (const auto& p : back.pixels()) {
    EXPECT_NEAR(p.r, 200, 2);
    EXPECT_NEAR(p.g, 150, 2);
    EXPECT_NEAR(p.b, 120, 2);
  }
  // Format is sniffed from content, not from the extension.
  fs::copy_file(dir / "a.jpg", dir / "a.png");
  EXPECT_EQ(read_rgb_image(dir / "a.png"), back);
}

TEST(ImageIo, CorruptFilesAreDecodeErrors) {
  testing_util::TempDir dir;
  write_text_file(dir / "junk.png", "definitely not an image");
  write_text_file(dir / "trunc.jpg", std::string("\xFF\xD8\xFF\xE0", 4));
  write_text_file(dir / "trunc.png", std::string("\x89PNG\r\n\x1a\n", 8));
  std::mt19937_64 rng(2);
  write_jpeg(dir / "full.jpg", random_image(rng, 64, 64), 90);
  const std::string bytes = read_text_file(dir / "full.jpg");
  write_text_file(dir / "half.jpg", bytes.substr(0, bytes.size() / 2));
  for (const char* name : {"junk.png", "trunc.jpg", "trunc.png", "half.jpg"}) {
    try {
      read_rgb_image(dir / name);
      ADD_FAILURE() << name;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kDecode) << name;
    }
  }
}

TEST(ImageIo, MaskPolarityAndThreshold) {
  testing_util::TempDir dir;
  GrayImage g(4, 1);
  g[0] = 0;
  g[1] = 127;
  g[2] = 128;
  g[3] = 255;
  write_png(dir / "m.png", g);
  const ExclusionMask w = read_mask(dir / "m.png", 128, MaskPolarity::kWhiteExcluded);
  EXPECT_FALSE(w.excluded(1));
  EXPECT_TRUE(w.excluded(2));
  const ExclusionMask b = read_mask(dir / "m.png", 128, MaskPolarity::kBlackExcluded);
  EXPECT_TRUE(b.excluded(1));
  EXPECT_FALSE(b.excluded(2));
}

// Writes three uniform images and their lesion masks into `dir`.
std::vector<ManifestEntry> uniform_set(const testing_util::TempDir& dir) {
  const RgbPixel tones[] = {{236, 208, 190}, {198, 140, 105}, {95, 60, 45}};
  std::vector<ManifestEntry> m;
  for (int i = 0; i < 3; ++i) {
    const std::string id = "u" + std::to_string(i);
    RgbImage img(24, 24, tones[i]);
    const GrayImage mask = disc_mask(24, 6);
    for (std::size_t k = 0; k < img.size(); ++k) {
      if (mask[k] != 0) img[k] = {60, 30, 30};
    }
    write_png(dir / (id + ".png"), img);
    write_png(dir / (id + "_mask.png"), mask);
    m.push_back({id, dir / (id + ".png"), dir / (id + "_mask.png"),
                 std::nullopt, std::nullopt});
  }
  return m;
}

TEST(Audit, UniformImagesLandInExpectedBins) {
  testing_util::TempDir dir;
  const auto manifest = uniform_set(dir);
  const AuditResult r = run_audit(manifest, ItaConfig{});
  ASSERT_EQ(r.images.size(), 3u);
  const RgbPixel tones[] = {{236, 208, 190}, {198, 140, 105}, {95, 60, 45}};
  for (int i = 0; i < 3; ++i) {
    ASSERT_TRUE(r.images[i].estimate.has_value());
    const PixelLab lab = srgb_to_lab(tones[i]);
    EXPECT_NEAR(r.images[i].estimate->ita_degrees, ita_from_lab(lab.l, lab.b),
                1e-9);
    EXPECT_TRUE(r.images[i].flags.empty());
  }
  EXPECT_EQ(r.report.total, 3u);
  EXPECT_EQ(r.report.evaluated(), 3u);
  std::size_t sum = 0;
  for (std::size_t c : r.report.counts) sum += c;
  EXPECT_EQ(sum, 3u);
}

TEST(Audit, MaskFallbacksAndSkips) {
  testing_util::TempDir dir;
  auto manifest = uniform_set(dir);
  manifest[0].gt_mask_path = manifest[0].mask_path;
  manifest[0].mask_path.reset();
  manifest[1].mask_path.reset();
  manifest[2].image_path = dir / "missing.png";
  write_text_file(dir / "bad.png", "garbage");
  manifest.push_back({"bad", dir / "bad.png", std::nullopt, std::nullopt,
                      std::nullopt});
  const AuditResult r = run_audit(manifest, ItaConfig{});
  EXPECT_EQ(r.images[0].flags, (std::vector<std::string>{"gt_mask"}));
  EXPECT_EQ(r.images[1].flags, (std::vector<std::string>{"no_mask"}));
  EXPECT_FALSE(r.images[2].estimate.has_value());
  EXPECT_NE(r.images[2].skip_reason.find("io"), std::string::npos);
  EXPECT_NE(r.images[3].skip_reason.find("decode"), std::string::npos);
  EXPECT_EQ(r.report.skipped.size(), 2u);
  EXPECT_EQ(r.report.flagged_no_mask, 1u);
  EXPECT_EQ(r.report.evaluated(), 2u);
  const std::string csv = ita_results_csv(r.images);
  EXPECT_TRUE(csv.starts_with(std::string(kItaCsvHeader) + "\n"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST(Audit, EmptyManifest) {
  const AuditResult r = run_audit(std::span<const ManifestEntry>(), ItaConfig{});
  EXPECT_EQ(r.report.total, 0u);
  for (SkinToneCategory c : kAllCategories) {
    EXPECT_EQ(r.report.fraction(c), 0.0);
  }
  const std::string svg = histogram_svg(r.report, config_echo(RunConfig{}));
  EXPECT_NE(svg.find("data-category=\"dark\""), std::string::npos);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
}

TEST(Audit, ResultsIndependentOfWorkerCount) {
  testing_util::TempDir dir;
  std::mt19937_64 rng(3);
  std::vector<ManifestEntry> manifest;
  for (int i = 0; i < 12; ++i) {
    const std::string id = "r" + std::to_string(i);
    write_png(dir / (id + ".png"), random_image(rng, 16, 16));
    manifest.push_back({id, dir / (id + ".png"), std::nullopt, std::nullopt,
                        std::nullopt});
  }
  manifest.push_back({"gone", dir / "gone.png", std::nullopt, std::nullopt,
                      std::nullopt});
  const AuditResult one = run_audit(manifest, ItaConfig{}, 1);
  const AuditResult four = run_audit(manifest, ItaConfig{}, 4);
  EXPECT_EQ(ita_results_csv(one.images), ita_results_csv(four.images));
  const RunConfig cfg;
  EXPECT_EQ(dump_json(distribution_json(one.report, cfg)),
            dump_json(distribution_json(four.report, cfg)));
}

TEST(Parallel, RethrowsLowestIndexFailure) {
  std::vector<int> seen(100, 0);
  try {
    parallel_for(100, 4, [&](std::size_t i) {
      seen[i] = 1;
      if (i == 37 || i == 80) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "37");
  }
  EXPECT_EQ(std::count(seen.begin(), seen.end(), 1), 100);
}

TEST(Histogram, SingleBarIsFullHeightAndOutputIsStable) {
  DistributionReport report;
  report.total = 5;
  report.counts[index_of(SkinToneCategory::kTanned1)] = 5;
  const OrderedJson meta = config_echo(RunConfig{});
  const std::string svg = histogram_svg(report, meta);
  EXPECT_EQ(svg, histogram_svg(report, meta));
  EXPECT_NE(svg.find("<metadata>"), std::string::npos);
  EXPECT_NE(svg.find("mean_of_means"), std::string::npos);
  // Plot height is 300 px; only the tan1 bar reaches it.
  EXPECT_NE(svg.find("data-category=\"tan1\" x=\"") , std::string::npos);
  const auto pos = svg.find("data-category=\"tan1\"");
  const auto tag_end = svg.find("/>", pos);
  EXPECT_NE(svg.substr(pos, tag_end - pos).find("height=\"300.00\""),
            std::string::npos);
  EXPECT_EQ(std::count(svg.begin(), svg.end(), '\n') > 0, true);
  EXPECT_EQ(svg.find("height=\"300.00\"", tag_end), std::string::npos);
}

TEST(Correlation, Examples) {
  const std::vector<double> ita = {10, 20, 30, 40};
  const std::vector<double> up = {1, 2, 3, 4};
  const std::vector<double> down = {8, 6, 4, 2};
  const CorrelationReport r = correlation_report(ita, up, down);
  EXPECT_NEAR(r.r_mean, 1.0, 1e-15);
  EXPECT_NEAR(r.r_median, -1.0, 1e-15);
  const std::vector<double> one = {1};
  try {
    correlation_report(one, one, one);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientPoints);
  }
  const std::vector<double> flat = {5, 5, 5, 5};
  try {
    correlation_report(ita, flat, up);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroVariance);
  }
}

TEST(SegmentationManifest, SkipsIncompletePairs) {
  testing_util::TempDir dir;
  auto manifest = uniform_set(dir);
  manifest[0].gt_mask_path = manifest[0].mask_path;
  manifest[1].gt_mask_path = manifest[1].mask_path;
  write_png(dir / "small.png", GrayImage(5, 5));
  manifest[1].mask_path = dir / "small.png";
  const SegQualityReport r = evaluate_segmentation_manifest(manifest, ItaConfig{});
  EXPECT_EQ(r.n_images, 1u);
  EXPECT_DOUBLE_EQ(r.pixel_accuracy, 1.0);
  ASSERT_EQ(r.warnings.size(), 2u);
  EXPECT_NE(r.warnings[0].find("u1"), std::string::npos);
  EXPECT_NE(r.warnings[1].find("u2"), std::string::npos);
  const std::string csv = segmentation_csv(r);
  EXPECT_TRUE(csv.starts_with(
      "image_id,accuracy,false_negative_rate,abs_delta_ita,ita_pred,ita_gt\n"));
}

}  // namespace
}  // namespace skintone
