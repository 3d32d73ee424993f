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

// Synthetic skin images, exclusion masks and classifier predictions with
// planted ground truth.
//
// Randomness: std::mt19937_64 seeded per (seed, stream, index) through a
// splitmix64 mix, uniform doubles from the top 53 bits, normals by
// Box-Muller. The generator is fully specified here so output bytes do not
// depend on the standard library's distribution implementations.

#ifndef SKINTONE_SYNTH_HPP_
#define SKINTONE_SYNTH_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "skintone/audit.hpp"
#include "skintone/colorimetry.hpp"
#include "skintone/config.hpp"
#include "skintone/csv.hpp"
#include "skintone/error.hpp"
#include "skintone/fairness.hpp"
#include "skintone/fairness_io.hpp"
#include "skintone/image.hpp"
#include "skintone/image_io.hpp"
#include "skintone/ita.hpp"

namespace skintone {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) {
    const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

enum class BaseSampler { kFixed, kCategoryMixture };

struct AccuracyModel {
  enum class Kind { kPerBin, kLinear };
  Kind kind = Kind::kPerBin;
  std::array<double, kNumCategories> per_bin = {1, 1, 1, 1, 1, 1, 1, 1};
  double slope = 0.0;      // per degree
  double intercept = 1.0;  // at 0 degrees

  // Probability of a correct prediction, clamped to [0, 1].
  double probability(double ita_degrees) const {
    const double p = kind == Kind::kPerBin
                         ? per_bin[index_of(categorize(ita_degrees))]
                         : intercept + slope * ita_degrees;
    return std::clamp(p, 0.0, 1.0);
  }
};

inline std::vector<std::string> default_labels() {
  return {"AKIEC", "BCC", "BKL", "DF", "MEL", "NV", "VASC"};
}

struct SynthSpec {
  std::size_t n_images = 10;
  std::size_t width = 64;
  std::size_t height = 64;

  BaseSampler sampler = BaseSampler::kCategoryMixture;
  double base_l = 65.0;  // fixed sampler
  double base_b = 15.0;  // fixed sampler
  double base_a = 10.0;
  std::array<double, kNumCategories> category_weights = {1, 1, 1, 1,
                                                         1, 1, 1, 1};
  bool stratified = false;  // cycle through weighted bins instead of drawing
  double b_min = 12.0;
  double b_max = 18.0;
  double bin_margin = 1.5;  // keeps sampled ITA away from bin boundaries
  // Sampling range of the open-ended bins.
  double very_light_max = 62.0;
  double dark_min = 0.0;

  double noise_sigma = 0.0;  // per-channel Gaussian, Lab units

  bool lesion = true;
  double lesion_axis_min = 0.15;  // semi-axis as a fraction of the image side
  double lesion_axis_max = 0.35;
  PixelLab lesion_color{35.0, 20.0, 20.0};
  double pred_leak = 0.0;  // fraction of lesion pixels a predicted mask misses

  AccuracyModel accuracy;
  std::size_t n_splits = 0;
  std::vector<std::string> labels = default_labels();

  std::uint64_t seed = 0;

  void validate() const {
    auto fail = [](const std::string& m) { throw Error(ErrorCode::kUsage, m); };
    if (n_images < 1) fail("n_images must be at least 1");
    if (width < 1 || height < 1) fail("width and height must be positive");
    if (!(b_min > 0.0) || !(b_max >= b_min)) fail("need 0 < b_min <= b_max");
    if (!(noise_sigma >= 0.0)) fail("noise_sigma must be >= 0");
    if (!(lesion_axis_min > 0.0) || !(lesion_axis_max >= lesion_axis_min)) {
      fail("need 0 < lesion_axis_min <= lesion_axis_max");
    }
    if (!(pred_leak >= 0.0 && pred_leak <= 1.0)) {
      fail("pred_leak must lie in [0, 1]");
    }
    if (!(bin_margin >= 0.0)) fail("bin_margin must be >= 0");
    if (!(very_light_max > 55.0) || !(dark_min < 10.0)) {
      fail("open-ended bin ranges must overlap their bins");
    }
    double total = 0.0;
    for (double w : category_weights) {
      if (!(w >= 0.0)) fail("category weights must be >= 0");
      total += w;
    }
    if (!(total > 0.0)) fail("at least one category weight must be positive");
    if (labels.size() < 2) fail("need at least two labels");
  }
};

// Sampling interval of a bin after applying the margin.
inline std::pair<double, double> sampling_range(const SynthSpec& spec,
                                                SkinToneCategory c) {
  ItaRange r = ita_range(c);
  double lo = std::isinf(r.lower) ? spec.dark_min : r.lower;
  double hi = std::isinf(r.upper) ? spec.very_light_max : r.upper;
  const double margin = std::min(spec.bin_margin, 0.49 * (hi - lo));
  return {lo + margin, hi - margin};
}

struct GroundTruthRow {
  std::string image_id;
  SkinToneCategory category = SkinToneCategory::kDark;
  PixelLab base;
  double ita_true = 0.0;      // of the base Lab color
  double ita_realized = 0.0;  // of the base color after 8-bit quantization
  std::string label;
};

namespace synth_internal {

enum Stream : std::uint64_t {
  kBaseStream = 1,
  kPixelStream = 2,
  kPredictionStream = 3,
};

inline void require_in_gamut(const PixelLab& lab, const std::string& id) {
  const RgbReal rgb = lab_to_srgb(lab);
  for (double v : {rgb.r, rgb.g, rgb.b}) {
    if (!(v >= -0.5 && v <= 255.5)) {
      throw Error(ErrorCode::kUnrepresentableColor,
                  id + ": Lab (" + format_fixed(lab.l, 3) + ", " +
                      format_fixed(lab.a, 3) + ", " + format_fixed(lab.b, 3) +
                      ") lies outside the sRGB gamut");
    }
  }
}

inline std::string image_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "synth_%05zu", i);
  return buf;
}

}  // namespace synth_internal

// Base color, true ITA and label per image.
inline std::vector<GroundTruthRow> sample_ground_truth(const SynthSpec& spec) {
  spec.validate();
  std::vector<SkinToneCategory> active;
  double total = 0.0;
  for (SkinToneCategory c : kAllCategories) {
    if (spec.category_weights[index_of(c)] > 0.0) active.push_back(c);
    total += spec.category_weights[index_of(c)];
  }

  std::vector<GroundTruthRow> rows;
  rows.reserve(spec.n_images);
  for (std::size_t i = 0; i < spec.n_images; ++i) {
    Rng rng(derive_seed(spec.seed, synth_internal::kBaseStream, i));
    GroundTruthRow row;
    row.image_id = synth_internal::image_id(i);
    if (spec.sampler == BaseSampler::kFixed) {
      row.base = {spec.base_l, spec.base_a, spec.base_b};
    } else {
      SkinToneCategory category = active[i % active.size()];
      if (!spec.stratified) {
        double u = rng.uniform() * total;
        category = active.back();
        for (SkinToneCategory c : active) {
          u -= spec.category_weights[index_of(c)];
          if (u < 0.0) {
            category = c;
            break;
          }
        }
      }
      const auto [lo, hi] = sampling_range(spec, category);
      const double ita = rng.uniform(lo, hi);
      const double b = rng.uniform(spec.b_min, spec.b_max);
      row.base = {50.0 + b * std::tan(ita * std::numbers::pi / 180.0),
                  spec.base_a, b};
    }
    synth_internal::require_in_gamut(row.base, row.image_id);
    row.ita_true = ita_from_lab(row.base.l, row.base.b);
    row.category = categorize(row.ita_true);
    const PixelLab realized = srgb_to_lab(lab_to_rgb8(row.base).pixel);
    row.ita_realized = ita_from_lab(realized.l, realized.b);
    row.label = spec.labels[rng.index(spec.labels.size())];
    rows.push_back(std::move(row));
  }
  return rows;
}

struct SynthImage {
  RgbImage image;
  ExclusionMask gt_mask;    // exactly the lesion ellipse
  ExclusionMask pred_mask;  // gt with `pred_leak` of lesion pixels dropped
  std::size_t clamped_pixels = 0;
};

inline SynthImage render_image(const SynthSpec& spec, const GroundTruthRow& row,
                               std::size_t index) {
  Rng rng(derive_seed(spec.seed, synth_internal::kPixelStream, index));
  const std::size_t w = spec.width;
  const std::size_t h = spec.height;
  SynthImage out{RgbImage(w, h), ExclusionMask(w, h), ExclusionMask(w, h), 0};

  const double cx = rng.uniform(0.35, 0.65) * static_cast<double>(w);
  const double cy = rng.uniform(0.35, 0.65) * static_cast<double>(h);
  const double ax =
      rng.uniform(spec.lesion_axis_min, spec.lesion_axis_max) *
      static_cast<double>(w);
  const double ay =
      rng.uniform(spec.lesion_axis_min, spec.lesion_axis_max) *
      static_cast<double>(h);
  const double theta = rng.uniform(0.0, std::numbers::pi);
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);

  const QuantizedRgb base_rgb = lab_to_rgb8(row.base);
  const QuantizedRgb lesion_rgb = lab_to_rgb8(spec.lesion_color);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double dx = (static_cast<double>(x) + 0.5) - cx;
      const double dy = (static_cast<double>(y) + 0.5) - cy;
      const double u = (dx * cos_t + dy * sin_t) / ax;
      const double v = (-dx * sin_t + dy * cos_t) / ay;
      const bool in_lesion = spec.lesion && u * u + v * v <= 1.0;
      const PixelLab& color = in_lesion ? spec.lesion_color : row.base;
      QuantizedRgb q = in_lesion ? lesion_rgb : base_rgb;
      if (spec.noise_sigma > 0.0) {
        const double nl = rng.normal() * spec.noise_sigma;
        const double na = rng.normal() * spec.noise_sigma;
        const double nb = rng.normal() * spec.noise_sigma;
        q = lab_to_rgb8({color.l + nl, color.a + na, color.b + nb});
      }
      out.image.at(x, y) = q.pixel;
      out.clamped_pixels += q.clamped ? 1 : 0;
      if (in_lesion) {
        out.gt_mask.set(x, y, true);
        const bool leaked = spec.pred_leak > 0.0 && rng.uniform() < spec.pred_leak;
        out.pred_mask.set(x, y, !leaked);
      }
    }
  }
  return out;
}

// Each image and split gets a correct prediction with probability p(true
// ITA), otherwise a uniformly drawn wrong label.
inline std::vector<PredictionRecord> generate_predictions(
    std::span<const GroundTruthRow> truth, const AccuracyModel& model,
    std::span<const std::string> labels, std::size_t n_splits,
    std::uint64_t seed) {
  if (n_splits < 1) throw Error(ErrorCode::kUsage, "n_splits must be >= 1");
  if (labels.size() < 2) throw Error(ErrorCode::kUsage, "need >= 2 labels");
  std::vector<PredictionRecord> out;
  out.reserve(truth.size() * n_splits);
  for (std::size_t s = 0; s < n_splits; ++s) {
    // One stream per split, consumed in image order.
    Rng rng(derive_seed(seed, synth_internal::kPredictionStream, s));
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const GroundTruthRow& row = truth[i];
      PredictionRecord rec{row.image_id, std::to_string(s), row.label,
                           row.label};
      if (rng.uniform() >= model.probability(row.ita_true)) {
        std::size_t pick = rng.index(labels.size() - 1);
        std::size_t seen = 0;
        for (const auto& l : labels) {
          if (l == row.label) continue;
          if (seen++ == pick) {
            rec.predicted_label = l;
            break;
          }
        }
      }
      out.push_back(std::move(rec));
    }
  }
  return out;
}

inline std::string ground_truth_csv(std::span<const GroundTruthRow> rows) {
  std::string out =
      "image_id,category,base_l,base_a,base_b,ita_true,ita_realized,label\n";
  for (const auto& r : rows) {
    out += csv_row({r.image_id, std::string(abbreviation(r.category)),
                    format_fixed(r.base.l), format_fixed(r.base.a),
                    format_fixed(r.base.b), format_fixed(r.ita_true),
                    format_fixed(r.ita_realized), r.label});
  }
  return out;
}

inline SynthSpec parse_synth_spec(const std::vector<KeyValue>& entries,
                                  std::string_view source) {
  SynthSpec spec;
  for (const auto& kv : entries) {
    const std::string where =
        std::string(source) + ":" + std::to_string(kv.line) + ": " + kv.key;
    auto number = [&] {
      try {
        return parse_double(kv.value, where);
      } catch (const Error& e) {
        throw Error(ErrorCode::kUsage, e.what());
      }
    };
    auto count = [&] {
      const double v = number();
      if (v < 0 || v != std::floor(v)) {
        throw Error(ErrorCode::kUsage, where + ": expected a count");
      }
      return static_cast<std::size_t>(v);
    };
    const std::string_view key = kv.key;
    if (key == "n_images") {
      spec.n_images = count();
    } else if (key == "width") {
      spec.width = count();
    } else if (key == "height") {
      spec.height = count();
    } else if (key == "sampler") {
      if (kv.value == "fixed") {
        spec.sampler = BaseSampler::kFixed;
      } else if (kv.value == "category_mixture") {
        spec.sampler = BaseSampler::kCategoryMixture;
      } else {
        throw Error(ErrorCode::kUsage,
                    where + ": expected fixed or category_mixture");
      }
    } else if (key == "base_l") {
      spec.base_l = number();
    } else if (key == "base_a") {
      spec.base_a = number();
    } else if (key == "base_b") {
      spec.base_b = number();
    } else if (key == "category_weights") {
      const auto items = split_list(kv.value);
      if (items.size() != kNumCategories) {
        throw Error(ErrorCode::kUsage, where + ": expected 8 weights");
      }
      for (std::size_t i = 0; i < kNumCategories; ++i) {
        spec.category_weights[i] = parse_double(items[i], where);
      }
    } else if (key == "stratified") {
      spec.stratified = parse_bool(kv.value, where);
    } else if (key == "b_min") {
      spec.b_min = number();
    } else if (key == "b_max") {
      spec.b_max = number();
    } else if (key == "bin_margin") {
      spec.bin_margin = number();
    } else if (key == "very_light_max") {
      spec.very_light_max = number();
    } else if (key == "dark_min") {
      spec.dark_min = number();
    } else if (key == "noise_sigma") {
      spec.noise_sigma = number();
    } else if (key == "lesion") {
      spec.lesion = parse_bool(kv.value, where);
    } else if (key == "lesion_axis_min") {
      spec.lesion_axis_min = number();
    } else if (key == "lesion_axis_max") {
      spec.lesion_axis_max = number();
    } else if (key == "lesion_l") {
      spec.lesion_color.l = number();
    } else if (key == "lesion_a") {
      spec.lesion_color.a = number();
    } else if (key == "lesion_b") {
      spec.lesion_color.b = number();
    } else if (key == "pred_leak") {
      spec.pred_leak = number();
    } else if (key == "accuracy_model") {
      if (kv.value == "per_bin") {
        spec.accuracy.kind = AccuracyModel::Kind::kPerBin;
      } else if (kv.value == "linear") {
        spec.accuracy.kind = AccuracyModel::Kind::kLinear;
      } else {
        throw Error(ErrorCode::kUsage, where + ": expected per_bin or linear");
      }
    } else if (key == "accuracy_per_bin") {
      const auto items = split_list(kv.value);
      if (items.size() != kNumCategories) {
        throw Error(ErrorCode::kUsage, where + ": expected 8 probabilities");
      }
      for (std::size_t i = 0; i < kNumCategories; ++i) {
        spec.accuracy.per_bin[i] = parse_double(items[i], where);
      }
    } else if (key == "accuracy_slope") {
      spec.accuracy.slope = number();
    } else if (key == "accuracy_intercept") {
      spec.accuracy.intercept = number();
    } else if (key == "n_splits") {
      spec.n_splits = count();
    } else if (key == "labels") {
      spec.labels = split_list(kv.value);
    } else if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(parse_integer(kv.value, where));
    } else {
      throw Error(ErrorCode::kUsage,
                  std::string(source) + ": unknown synth key '" + kv.key + "'");
    }
  }
  spec.validate();
  return spec;
}

inline OrderedJson synth_spec_json(const SynthSpec& s) {
  OrderedJson j;
  j["tool"] = std::string(kToolName);
  j["version"] = std::string(kToolVersion);
  j["rng"] = "mt19937_64/splitmix64-substreams/box-muller";
  j["n_images"] = s.n_images;
  j["width"] = s.width;
  j["height"] = s.height;
  j["sampler"] =
      s.sampler == BaseSampler::kFixed ? "fixed" : "category_mixture";
  j["base_l"] = s.base_l;
  j["base_a"] = s.base_a;
  j["base_b"] = s.base_b;
  j["category_weights"] = s.category_weights;
  j["stratified"] = s.stratified;
  j["b_min"] = s.b_min;
  j["b_max"] = s.b_max;
  j["bin_margin"] = s.bin_margin;
  j["very_light_max"] = s.very_light_max;
  j["dark_min"] = s.dark_min;
  j["noise_sigma"] = s.noise_sigma;
  j["lesion"] = s.lesion;
  j["lesion_axis_min"] = s.lesion_axis_min;
  j["lesion_axis_max"] = s.lesion_axis_max;
  j["lesion_lab"] = {s.lesion_color.l, s.lesion_color.a, s.lesion_color.b};
  j["pred_leak"] = s.pred_leak;
  j["accuracy_model"] =
      s.accuracy.kind == AccuracyModel::Kind::kPerBin ? "per_bin" : "linear";
  j["accuracy_per_bin"] = s.accuracy.per_bin;
  j["accuracy_slope"] = s.accuracy.slope;
  j["accuracy_intercept"] = s.accuracy.intercept;
  j["n_splits"] = s.n_splits;
  j["labels"] = s.labels;
  j["seed"] = s.seed;
  return j;
}

struct SynthDataset {
  std::vector<GroundTruthRow> truth;
  std::vector<ManifestEntry> manifest;
  std::vector<PredictionRecord> predictions;
  std::size_t clamped_pixels = 0;
};

// Writes images/, masks/ (ground truth), pred_masks/ (when pred_leak > 0),
// manifest.csv, ground_truth.csv, predictions.csv (when n_splits > 0) and
// synth_spec.json under `out_dir`.
inline SynthDataset generate_dataset(const SynthSpec& spec,
                                     const std::filesystem::path& out_dir,
                                     int workers = 1) {
  SynthDataset ds;
  ds.truth = sample_ground_truth(spec);
  ds.manifest.resize(ds.truth.size());
  std::vector<std::size_t> clamped(ds.truth.size(), 0);
  std::filesystem::create_directories(out_dir / "images");
  std::filesystem::create_directories(out_dir / "masks");
  if (spec.pred_leak > 0.0) {
    std::filesystem::create_directories(out_dir / "pred_masks");
  }
  parallel_for(ds.truth.size(), workers, [&](std::size_t i) {
    const GroundTruthRow& row = ds.truth[i];
    const SynthImage img = render_image(spec, row, i);
    ManifestEntry& e = ds.manifest[i];
    e.image_id = row.image_id;
    e.image_path = out_dir / "images" / (row.image_id + ".png");
    e.gt_mask_path = out_dir / "masks" / (row.image_id + ".png");
    e.label = row.label;
    write_png(e.image_path, img.image);
    write_png(*e.gt_mask_path, img.gt_mask.to_gray());
    if (spec.pred_leak > 0.0) {
      e.mask_path = out_dir / "pred_masks" / (row.image_id + ".png");
      write_png(*e.mask_path, img.pred_mask.to_gray());
    } else {
      e.mask_path = e.gt_mask_path;
    }
    clamped[i] = img.clamped_pixels;
  });
  for (std::size_t c : clamped) ds.clamped_pixels += c;
  write_text_file(out_dir / "manifest.csv", manifest_csv(ds.manifest, out_dir));
  write_text_file(out_dir / "ground_truth.csv", ground_truth_csv(ds.truth));
  if (spec.n_splits > 0) {
    ds.predictions = generate_predictions(ds.truth, spec.accuracy, spec.labels,
                                          spec.n_splits, spec.seed);
    write_text_file(out_dir / "predictions.csv",
                    predictions_csv(ds.predictions));
  }
  OrderedJson meta = synth_spec_json(spec);
  meta["clamped_pixels"] = ds.clamped_pixels;
  write_text_file(out_dir / "synth_spec.json", dump_json(meta));
  return ds;
}

}  // namespace skintone

#endif  // SKINTONE_SYNTH_HPP_
