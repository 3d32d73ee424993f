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

// Segmentation-mask quality: pixel accuracy, false negative rate and the
// error the predicted mask induces in the ITA estimate.
//
// The positive class is "excluded" (diseased / artifact). Aggregates are
// unweighted means over images, not pixel-pooled.

#ifndef SKINTONE_SEG_EVAL_HPP_
#define SKINTONE_SEG_EVAL_HPP_

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skintone/error.hpp"
#include "skintone/image.hpp"
#include "skintone/ita.hpp"

namespace skintone {

struct MaskMetrics {
  double accuracy = 0.0;
  double false_negative_rate = 0.0;
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

// Argument order matters: fnr = FN / (FN + TP) where FN counts pixels
// excluded in `gt` but not in `pred`. fnr is 0 when `gt` excludes nothing.
inline MaskMetrics mask_pixel_metrics(const ExclusionMask& pred,
                                      const ExclusionMask& gt) {
  require_same_shape(pred, gt, "predicted and ground-truth mask dimensions");
  MaskMetrics m;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const bool p = pred.excluded(i);
    const bool g = gt.excluded(i);
    if (p && g) {
      ++m.tp;
    } else if (!p && !g) {
      ++m.tn;
    } else if (p) {
      ++m.fp;
    } else {
      ++m.fn;
    }
  }
  const std::size_t total = m.tp + m.tn + m.fp + m.fn;
  m.accuracy = total == 0 ? 1.0
                          : static_cast<double>(m.tp + m.tn) /
                                static_cast<double>(total);
  m.false_negative_rate =
      m.tp + m.fn == 0
          ? 0.0
          : static_cast<double>(m.fn) / static_cast<double>(m.tp + m.fn);
  return m;
}

// One image with a predicted and a ground-truth exclusion mask. Non-owning.
struct SegSample {
  std::string_view image_id;
  const RgbImage* image = nullptr;
  const ExclusionMask* pred = nullptr;
  const ExclusionMask* gt = nullptr;
};

struct SegImageResult {
  std::string image_id;
  double accuracy = 0.0;
  double false_negative_rate = 0.0;
  std::optional<double> abs_delta_ita;  // unset when gt excludes everything
  std::optional<double> ita_pred;
  std::optional<double> ita_gt;
};

struct SegQualityReport {
  double pixel_accuracy = 0.0;
  double false_negative_rate = 0.0;
  std::optional<double> ita_mae_degrees;
  std::size_t n_images = 0;
  std::size_t n_ita_images = 0;  // images contributing to ita_mae
  std::vector<SegImageResult> per_image;
  std::vector<std::string> warnings;
};

// Scores one sample. Throws kEmptyRegion naming the image when the predicted
// mask leaves no pixel; a fully excluded ground truth only drops the ITA term.
inline SegImageResult evaluate_sample(const SegSample& s,
                                      const ItaConfig& cfg) {
  SegImageResult r;
  r.image_id = std::string(s.image_id);
  const MaskMetrics m = mask_pixel_metrics(*s.pred, *s.gt);
  r.accuracy = m.accuracy;
  r.false_negative_rate = m.false_negative_rate;
  if (s.gt->count_excluded() == s.gt->size()) return r;
  try {
    r.ita_pred = compute_ita(*s.image, *s.pred, cfg).ita_degrees;
  } catch (const Error& e) {
    throw Error(e.code(), "image '" + r.image_id + "': predicted mask: " +
                              e.what());
  }
  try {
    r.ita_gt = compute_ita(*s.image, *s.gt, cfg).ita_degrees;
  } catch (const Error& e) {
    throw Error(e.code(),
                "image '" + r.image_id + "': ground-truth mask: " + e.what());
  }
  r.abs_delta_ita = std::abs(*r.ita_pred - *r.ita_gt);
  return r;
}

// Folds per-image results (already in a fixed order) into the report.
inline SegQualityReport aggregate_segmentation(
    std::vector<SegImageResult> per_image) {
  SegQualityReport report;
  report.n_images = per_image.size();
  if (per_image.empty()) {
    throw Error(ErrorCode::kNoEvaluablePairs, "no evaluable pairs");
  }
  double acc = 0.0;
  double fnr = 0.0;
  double mae = 0.0;
  for (const auto& r : per_image) {
    acc += r.accuracy;
    fnr += r.false_negative_rate;
    if (r.abs_delta_ita) {
      mae += *r.abs_delta_ita;
      ++report.n_ita_images;
    } else {
      report.warnings.push_back("image '" + r.image_id +
                                "': ground-truth mask excludes every pixel; "
                                "skipped in ITA error");
    }
  }
  const double n = static_cast<double>(per_image.size());
  report.pixel_accuracy = acc / n;
  report.false_negative_rate = fnr / n;
  if (report.n_ita_images > 0) {
    report.ita_mae_degrees = mae / static_cast<double>(report.n_ita_images);
  }
  report.per_image = std::move(per_image);
  return report;
}

inline SegQualityReport evaluate_segmentation(
    std::span<const SegSample> samples, const ItaConfig& cfg) {
  std::vector<SegImageResult> per_image;
  per_image.reserve(samples.size());
  for (const auto& s : samples) per_image.push_back(evaluate_sample(s, cfg));
  return aggregate_segmentation(std::move(per_image));
}

// Mean over images of |ITA(image, pred) - ITA(image, gt)|.
inline double ita_mae(std::span<const SegSample> samples,
                      const ItaConfig& cfg) {
  const SegQualityReport report = evaluate_segmentation(samples, cfg);
  if (!report.ita_mae_degrees) {
    throw Error(ErrorCode::kNoEvaluablePairs,
                "no image has a ground-truth mask with included pixels");
  }
  return *report.ita_mae_degrees;
}

}  // namespace skintone

#endif  // SKINTONE_SEG_EVAL_HPP_
