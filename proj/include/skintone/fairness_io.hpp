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

// File formats of the classifier-fairness workflow: predictions CSV in,
// per-bin CSV and trend JSON out.

#ifndef SKINTONE_FAIRNESS_IO_HPP_
#define SKINTONE_FAIRNESS_IO_HPP_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skintone/config.hpp"
#include "skintone/csv.hpp"
#include "skintone/fairness.hpp"

namespace skintone {

inline constexpr std::string_view kPredictionsHeader =
    "image_id,split_id,true_label,predicted_label";

inline std::vector<PredictionRecord> parse_predictions(const CsvTable& table) {
  const std::size_t id = table.require_column("image_id");
  const std::size_t split = table.require_column("split_id");
  const std::size_t truth = table.require_column("true_label");
  const std::size_t pred = table.require_column("predicted_label");
  std::vector<PredictionRecord> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row[id].empty() || row[truth].empty() || row[pred].empty()) {
      throw Error(ErrorCode::kParse, table.source + " row " +
                                         std::to_string(r + 1) +
                                         ": empty required field");
    }
    out.push_back({row[id], row[split], row[truth], row[pred]});
  }
  return out;
}

inline std::vector<PredictionRecord> read_predictions(
    const std::filesystem::path& path) {
  return parse_predictions(read_csv_file(path));
}

inline std::string predictions_csv(std::span<const PredictionRecord> records) {
  std::string out = std::string(kPredictionsHeader) + "\n";
  for (const auto& r : records) {
    out += csv_row({r.image_id, r.split_id, r.true_label, r.predicted_label});
  }
  return out;
}

inline std::string per_bin_csv(std::span<const PerBinAccuracy> bins,
                               const BinMidpoints& midpoints) {
  std::string out =
      "category,midpoint_ita,n,n_splits,mean_accuracy,std_error\n";
  for (const auto& b : bins) {
    out += csv_row({std::string(abbreviation(b.category)),
                    format_fixed(midpoints[b.category]), std::to_string(b.n),
                    std::to_string(b.per_split.size()),
                    b.mean_accuracy ? format_fixed(*b.mean_accuracy) : "",
                    b.std_error ? format_fixed(*b.std_error) : ""});
  }
  return out;
}

inline OrderedJson trend_json(const TrendFit& t) {
  OrderedJson j;
  j["slope_per_degree"] = t.slope;
  j["intercept"] = t.intercept;
  j["slope_std_error"] = t.slope_se;
  j["ci95_low"] = t.ci95_low;
  j["ci95_high"] = t.ci95_high;
  j["n_points"] = t.n_points;
  j["midpoints_used"] = t.midpoints_used;
  j["weighted"] = t.weighted;
  return j;
}

struct FairnessSummary {
  std::size_t n_records = 0;
  double overall_accuracy = 0.0;
  BalancedAccuracy balanced;
  std::vector<std::string> labels;
  std::vector<SplitAccuracy> per_split;
  std::vector<PerBinAccuracy> bins;
  std::optional<TrendFit> trend;
  std::string trend_error;
};

inline OrderedJson fairness_json(const FairnessSummary& s,
                                 const RunConfig& cfg) {
  OrderedJson j;
  j["n_records"] = s.n_records;
  j["overall_accuracy"] = s.overall_accuracy;
  j["balanced_accuracy"] = s.balanced.value;
  j["absent_classes"] = s.balanced.absent_classes;
  j["labels"] = s.labels;
  OrderedJson splits = OrderedJson::array();
  for (const auto& sp : s.per_split) {
    OrderedJson e;
    e["split_id"] = sp.split_id;
    e["accuracy"] = sp.accuracy;
    e["n"] = sp.n;
    splits.push_back(std::move(e));
  }
  j["per_split"] = std::move(splits);
  OrderedJson bins = OrderedJson::array();
  for (const auto& b : s.bins) {
    OrderedJson e;
    e["category"] = std::string(abbreviation(b.category));
    e["midpoint_ita"] = cfg.midpoints[b.category];
    e["n"] = b.n;
    e["mean_accuracy"] =
        b.mean_accuracy ? OrderedJson(*b.mean_accuracy) : OrderedJson();
    e["std_error"] = b.std_error ? OrderedJson(*b.std_error) : OrderedJson();
    bins.push_back(std::move(e));
  }
  j["per_bin"] = std::move(bins);
  j["trend"] = s.trend ? trend_json(*s.trend) : OrderedJson();
  if (!s.trend_error.empty()) j["trend_error"] = s.trend_error;
  j["config"] = config_echo(cfg);
  return j;
}

// Everything the fairness command reports, from in-memory tables.
inline FairnessSummary summarize_fairness(
    std::span<const PredictionRecord> preds,
    const std::map<std::string, double, std::less<>>& ita_by_image,
    const RunConfig& cfg) {
  FairnessSummary s;
  s.n_records = preds.size();
  s.overall_accuracy = overall_accuracy(preds);
  s.labels = cfg.labels.empty() ? observed_labels(preds) : cfg.labels;
  s.balanced = balanced_accuracy(preds, s.labels);
  s.per_split = split_accuracies(preds);
  s.bins = per_bin_accuracy(preds, ita_by_image);
  try {
    s.trend = trend_from_bins(s.bins, cfg.midpoints, cfg.weighted_trend);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInsufficientPoints &&
        e.code() != ErrorCode::kDegenerateX) {
      throw;
    }
    s.trend_error = e.what();
  }
  return s;
}

}  // namespace skintone

#endif  // SKINTONE_FAIRNESS_IO_HPP_
