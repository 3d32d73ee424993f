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

// Classifier performance overall and per skin-tone bin, plus the trend of
// per-bin accuracy against bin-midpoint ITA.

#ifndef SKINTONE_FAIRNESS_HPP_
#define SKINTONE_FAIRNESS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "skintone/error.hpp"
#include "skintone/ita.hpp"
#include "skintone/stats.hpp"

namespace skintone {

struct PredictionRecord {
  std::string image_id;
  std::string split_id;
  std::string true_label;
  std::string predicted_label;

  bool correct() const { return true_label == predicted_label; }
};

inline double overall_accuracy(std::span<const PredictionRecord> preds) {
  if (preds.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no prediction records");
  }
  std::size_t correct = 0;
  for (const auto& p : preds) correct += p.correct() ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(preds.size());
}

struct BalancedAccuracy {
  double value = 0.0;
  // Declared classes with no records; left out of the mean.
  std::vector<std::string> absent_classes;
};

// Mean of per-class recall over the classes of `label_set` that occur as
// true labels.
inline BalancedAccuracy balanced_accuracy(
    std::span<const PredictionRecord> preds,
    std::span<const std::string> label_set) {
  if (preds.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no prediction records");
  }
  std::map<std::string, std::pair<std::size_t, std::size_t>> per_class;
  for (const auto& label : label_set) per_class[label] = {0, 0};
  for (const auto& p : preds) {
    auto it = per_class.find(p.true_label);
    if (it == per_class.end()) {
      throw Error(ErrorCode::kUnknownLabel,
                  "true label '" + p.true_label + "' of image '" + p.image_id +
                      "' is not in the label set");
    }
    if (!per_class.contains(p.predicted_label)) {
      throw Error(ErrorCode::kUnknownLabel,
                  "predicted label '" + p.predicted_label + "' of image '" +
                      p.image_id + "' is not in the label set");
    }
    it->second.first += p.correct() ? 1 : 0;
    it->second.second += 1;
  }
  BalancedAccuracy result;
  double recall_sum = 0.0;
  std::size_t n_classes = 0;
  for (const auto& label : label_set) {
    const auto& [correct, total] = per_class[label];
    if (total == 0) {
      result.absent_classes.push_back(label);
      continue;
    }
    recall_sum += static_cast<double>(correct) / static_cast<double>(total);
    ++n_classes;
  }
  result.value = recall_sum / static_cast<double>(n_classes);
  return result;
}

// Labels occurring as true or predicted labels, sorted.
inline std::vector<std::string> observed_labels(
    std::span<const PredictionRecord> preds) {
  std::set<std::string> labels;
  for (const auto& p : preds) {
    labels.insert(p.true_label);
    labels.insert(p.predicted_label);
  }
  return {labels.begin(), labels.end()};
}

// Bin midpoints used as the x coordinate of the trend line. The open-ended
// bins extend their neighbour's width: very_lt 55..62 and dark 0..10.
class BinMidpoints {
 public:
  double operator[](SkinToneCategory c) const { return values_[index_of(c)]; }
  void set(SkinToneCategory c, double degrees) {
    values_[index_of(c)] = degrees;
  }
  const std::array<double, kNumCategories>& values() const { return values_; }

 private:
  std::array<double, kNumCategories> values_ = {58.5, 51.5,  44.5, 37.75,
                                                31.25, 23.5, 14.5, 5.0};
};

struct SplitAccuracy {
  std::string split_id;
  double accuracy = 0.0;
  std::size_t n = 0;
};

struct PerBinAccuracy {
  SkinToneCategory category = SkinToneCategory::kDark;
  std::size_t n = 0;  // records over all splits
  std::optional<double> mean_accuracy;  // unweighted mean over splits
  std::optional<double> std_error;      // sample std over splits / sqrt(k)
  std::vector<SplitAccuracy> per_split;  // splits with n = 0 are omitted
};

namespace fairness_internal {

inline void check_unique(std::span<const PredictionRecord> preds) {
  std::set<std::pair<std::string_view, std::string_view>> seen;
  for (const auto& p : preds) {
    if (!seen.emplace(p.image_id, p.split_id).second) {
      throw Error(ErrorCode::kDuplicateRecord,
                  "duplicate prediction for image '" + p.image_id +
                      "' in split '" + p.split_id + "'");
    }
  }
}

// Split ids in order of first appearance.
inline std::vector<std::string> split_order(
    std::span<const PredictionRecord> preds) {
  std::vector<std::string> order;
  std::set<std::string_view> seen;
  for (const auto& p : preds) {
    if (seen.insert(p.split_id).second) order.push_back(p.split_id);
  }
  return order;
}

struct Tally {
  std::size_t correct = 0;
  std::size_t total = 0;
};

}  // namespace fairness_internal

// Plain accuracy of each split, in order of first appearance.
inline std::vector<SplitAccuracy> split_accuracies(
    std::span<const PredictionRecord> preds) {
  if (preds.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no prediction records");
  }
  std::map<std::string, fairness_internal::Tally, std::less<>> tally;
  for (const auto& p : preds) {
    auto& t = tally[p.split_id];
    t.correct += p.correct() ? 1 : 0;
    t.total += 1;
  }
  std::vector<SplitAccuracy> out;
  for (const auto& split : fairness_internal::split_order(preds)) {
    const auto& t = tally.find(split)->second;
    out.push_back({split,
                   static_cast<double>(t.correct) /
                       static_cast<double>(t.total),
                   t.total});
  }
  return out;
}

// Groups records by the category of their image's ITA, then by split.
// Returns all eight bins in lightest-first order.
inline std::vector<PerBinAccuracy> per_bin_accuracy(
    std::span<const PredictionRecord> preds,
    const std::map<std::string, double, std::less<>>& ita_by_image) {
  fairness_internal::check_unique(preds);
  std::set<std::string> missing;
  for (const auto& p : preds) {
    if (!ita_by_image.contains(p.image_id)) missing.insert(p.image_id);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw Error(ErrorCode::kMissingIta,
                "no ITA result for image ids: " + list);
  }

  const std::vector<std::string> splits = fairness_internal::split_order(preds);
  std::array<std::map<std::string, fairness_internal::Tally, std::less<>>,
             kNumCategories>
      tally;
  for (const auto& p : preds) {
    const auto bin = categorize(ita_by_image.find(p.image_id)->second);
    auto& t = tally[index_of(bin)][p.split_id];
    t.correct += p.correct() ? 1 : 0;
    t.total += 1;
  }

  std::vector<PerBinAccuracy> out;
  for (SkinToneCategory c : kAllCategories) {
    PerBinAccuracy bin;
    bin.category = c;
    const auto& by_split = tally[index_of(c)];
    std::vector<double> accuracies;
    for (const auto& split : splits) {
      auto it = by_split.find(split);
      if (it == by_split.end()) continue;
      const double acc = static_cast<double>(it->second.correct) /
                         static_cast<double>(it->second.total);
      bin.per_split.push_back({split, acc, it->second.total});
      bin.n += it->second.total;
      accuracies.push_back(acc);
    }
    if (!accuracies.empty()) {
      bin.mean_accuracy = stats::mean(accuracies);
      bin.std_error = stats::sample_std(accuracies) /
                      std::sqrt(static_cast<double>(accuracies.size()));
    }
    out.push_back(std::move(bin));
  }
  return out;
}

struct TrendPoint {
  double midpoint = 0.0;
  double mean_accuracy = 0.0;
  double weight = 1.0;  // only read by the weighted fit
};

struct TrendFit {
  double slope = 0.0;      // accuracy per degree
  double intercept = 0.0;  // accuracy at 0 degrees
  double slope_se = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
  std::size_t n_points = 0;
  std::vector<double> midpoints_used;
  bool weighted = false;
};

// Least-squares slope of mean accuracy against midpoint ITA with a two-sided
// 95% t interval on n - 2 degrees of freedom.
inline TrendFit trend_fit(std::span<const TrendPoint> points,
                          bool weighted = false) {
  if (points.size() < 3) {
    throw Error(ErrorCode::kInsufficientPoints,
                "trend fit needs at least 3 bins with data, got " +
                    std::to_string(points.size()));
  }
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> w;
  for (const auto& p : points) {
    x.push_back(p.midpoint);
    y.push_back(p.mean_accuracy);
    w.push_back(p.weight);
  }
  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::kDegenerateX, "trend fit midpoints must be distinct");
  }
  const stats::LinearFit fit =
      stats::least_squares(x, y, weighted ? std::span<const double>(w)
                                          : std::span<const double>());
  const double t = stats::student_t_quantile(
      0.975, static_cast<double>(points.size() - 2));
  TrendFit out;
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.slope_se = fit.slope_se;
  out.ci95_low = fit.slope - t * fit.slope_se;
  out.ci95_high = fit.slope + t * fit.slope_se;
  out.n_points = points.size();
  out.midpoints_used = std::move(x);
  out.weighted = weighted;
  return out;
}

// Trend over the bins that have data; weights are bin sample counts.
inline TrendFit trend_from_bins(std::span<const PerBinAccuracy> bins,
                                const BinMidpoints& midpoints,
                                bool weighted = false) {
  std::vector<TrendPoint> points;
  for (const auto& bin : bins) {
    if (!bin.mean_accuracy) continue;
    points.push_back({midpoints[bin.category], *bin.mean_accuracy,
                      static_cast<double>(bin.n)});
  }
  return trend_fit(points, weighted);
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
  return stats::pearson(x, y);
}

}  // namespace skintone

#endif  // SKINTONE_FAIRNESS_HPP_
