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

// Dataset-level driver: manifest ingestion, batch ITA estimation, the skin
// tone distribution report, ITA results CSV and grayscale correlation.

#ifndef SKINTONE_AUDIT_HPP_
#define SKINTONE_AUDIT_HPP_

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "skintone/config.hpp"
#include "skintone/csv.hpp"
#include "skintone/error.hpp"
#include "skintone/fairness.hpp"
#include "skintone/image_io.hpp"
#include "skintone/ita.hpp"
#include "skintone/parallel.hpp"
#include "skintone/seg_eval.hpp"
#include "skintone/stats.hpp"

namespace skintone {

namespace fs = std::filesystem;

struct ManifestEntry {
  std::string image_id;
  fs::path image_path;
  std::optional<fs::path> mask_path;
  std::optional<fs::path> gt_mask_path;
  std::optional<std::string> label;
};

inline constexpr std::string_view kManifestHeader =
    "image_id,image_path,mask_path,gt_mask_path,label";

// Relative paths are resolved against the manifest's directory.
inline std::vector<ManifestEntry> parse_manifest(const CsvTable& table,
                                                 const fs::path& base_dir) {
  const std::size_t id_col = table.require_column("image_id");
  const std::size_t image_col = table.require_column("image_path");
  const auto mask_col = table.column("mask_path");
  const auto gt_col = table.column("gt_mask_path");
  const auto label_col = table.column("label");

  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  auto optional_path =
      [&](const std::vector<std::string>& row,
          std::optional<std::size_t> col) -> std::optional<fs::path> {
    if (!col || row[*col].empty()) return std::nullopt;
    return resolve(row[*col]);
  };

  std::vector<ManifestEntry> entries;
  std::set<std::string> ids;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = table.source + " row " + std::to_string(r + 1);
    if (row[id_col].empty()) {
      throw Error(ErrorCode::kParse, where + ": empty image_id");
    }
    if (row[image_col].empty()) {
      throw Error(ErrorCode::kParse, where + ": empty image_path");
    }
    if (!ids.insert(row[id_col]).second) {
      throw Error(ErrorCode::kDuplicateRecord,
                  where + ": duplicate image_id '" + row[id_col] + "'");
    }
    ManifestEntry e;
    e.image_id = row[id_col];
    e.image_path = resolve(row[image_col]);
    e.mask_path = optional_path(row, mask_col);
    e.gt_mask_path = optional_path(row, gt_col);
    if (label_col && !row[*label_col].empty()) e.label = row[*label_col];
    entries.push_back(std::move(e));
  }
  return entries;
}

inline std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  return parse_manifest(read_csv_file(path), path.parent_path());
}

// Paths are written relative to `base_dir` when they lie beneath it.
inline std::string manifest_csv(std::span<const ManifestEntry> entries,
                                const fs::path& base_dir) {
  auto rel = [&](const fs::path& p) {
    const fs::path r = p.lexically_relative(base_dir);
    return (r.empty() || *r.begin() == "..") ? p.generic_string()
                                             : r.generic_string();
  };
  std::string out = std::string(kManifestHeader) + "\n";
  for (const auto& e : entries) {
    out += csv_row({e.image_id, rel(e.image_path),
                    e.mask_path ? rel(*e.mask_path) : "",
                    e.gt_mask_path ? rel(*e.gt_mask_path) : "",
                    e.label.value_or("")});
  }
  return out;
}

struct ImageResult {
  std::string image_id;
  std::optional<ItaEstimate> estimate;  // unset when skipped
  std::vector<std::string> flags;
  std::string skip_reason;
};

struct SkippedImage {
  std::string image_id;
  std::string reason;
};

struct DistributionReport {
  std::array<std::size_t, kNumCategories> counts{};
  std::size_t total = 0;  // manifest entries
  std::size_t flagged_no_mask = 0;
  std::vector<SkippedImage> skipped;

  std::size_t evaluated() const { return total - skipped.size(); }

  double fraction(SkinToneCategory c) const {
    const std::size_t n = evaluated();
    return n == 0 ? 0.0
                  : static_cast<double>(counts[index_of(c)]) /
                        static_cast<double>(n);
  }
};

struct AuditResult {
  std::vector<ImageResult> images;  // manifest order
  DistributionReport report;
};

// Mask choice: mask_path, else gt_mask_path, else the whole image is skin
// (flagged `no_mask`).
inline ImageResult audit_one(const ManifestEntry& entry, const ItaConfig& cfg) {
  ImageResult result;
  result.image_id = entry.image_id;
  try {
    const RgbImage image = read_rgb_image(entry.image_path);
    ExclusionMask mask;
    if (entry.mask_path) {
      mask = read_mask(*entry.mask_path, cfg.mask_threshold, cfg.mask_polarity);
    } else if (entry.gt_mask_path) {
      mask = read_mask(*entry.gt_mask_path, cfg.mask_threshold,
                       cfg.mask_polarity);
      result.flags.emplace_back("gt_mask");
    } else {
      mask = ExclusionMask(image.width(), image.height());
      result.flags.emplace_back("no_mask");
    }
    result.estimate = compute_ita(image, mask, cfg);
    if (result.estimate->trim_fallback) {
      result.flags.emplace_back("trim_fallback");
    }
  } catch (const Error& e) {
    result.estimate.reset();
    result.skip_reason =
        std::string(error_code_name(e.code())) + ": " + e.what();
  } catch (const std::exception& e) {
    result.estimate.reset();
    result.skip_reason = std::string("error: ") + e.what();
  }
  return result;
}

inline DistributionReport summarize(std::span<const ImageResult> images) {
  DistributionReport report;
  report.total = images.size();
  for (const auto& r : images) {
    if (!r.estimate) {
      report.skipped.push_back({r.image_id, r.skip_reason});
      continue;
    }
    ++report.counts[index_of(r.estimate->category)];
    for (const auto& f : r.flags) {
      if (f == "no_mask") ++report.flagged_no_mask;
    }
  }
  return report;
}

// Per-image failures become skips; nothing here aborts the batch.
inline AuditResult run_audit(std::span<const ManifestEntry> manifest,
                             const ItaConfig& cfg, int workers = 1) {
  cfg.validate();
  AuditResult out;
  out.images.resize(manifest.size());
  parallel_for(manifest.size(), workers, [&](std::size_t i) {
    out.images[i] = audit_one(manifest[i], cfg);
  });
  out.report = summarize(out.images);
  return out;
}

inline constexpr std::string_view kItaCsvHeader =
    "image_id,ita_degrees,category,n_total,n_retained,mean_l,mean_b,std_l,"
    "std_b,mean_gray,median_gray,flags";

// One row per evaluated image; skipped images are omitted.
inline std::string ita_results_csv(std::span<const ImageResult> images) {
  std::string out = std::string(kItaCsvHeader) + "\n";
  for (const auto& r : images) {
    if (!r.estimate) continue;
    const ItaEstimate& e = *r.estimate;
    std::string flags;
    for (const auto& f : r.flags) flags += (flags.empty() ? "" : ";") + f;
    out += csv_row({r.image_id, format_fixed(e.ita_degrees),
                    std::string(abbreviation(e.category)),
                    std::to_string(e.n_total), std::to_string(e.n_retained),
                    format_fixed(e.mean_l), format_fixed(e.mean_b),
                    format_fixed(e.std_l), format_fixed(e.std_b),
                    format_fixed(e.mean_gray), format_fixed(e.median_gray),
                    flags});
  }
  return out;
}

struct ItaRow {
  std::string image_id;
  double ita_degrees = 0.0;
  double mean_gray = 0.0;
  double median_gray = 0.0;
};

inline std::vector<ItaRow> read_ita_results(const fs::path& path) {
  const CsvTable table = read_csv_file(path);
  const std::size_t id = table.require_column("image_id");
  const std::size_t ita = table.require_column("ita_degrees");
  const auto mean_gray = table.column("mean_gray");
  const auto median_gray = table.column("median_gray");
  std::vector<ItaRow> rows;
  std::set<std::string> seen;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = table.source + " row " + std::to_string(r + 1);
    if (!seen.insert(row[id]).second) {
      throw Error(ErrorCode::kDuplicateRecord,
                  where + ": duplicate image_id '" + row[id] + "'");
    }
    ItaRow out;
    out.image_id = row[id];
    out.ita_degrees = parse_double(row[ita], where);
    if (mean_gray) out.mean_gray = parse_double(row[*mean_gray], where);
    if (median_gray) out.median_gray = parse_double(row[*median_gray], where);
    rows.push_back(std::move(out));
  }
  return rows;
}

inline std::map<std::string, double, std::less<>> ita_lookup(
    std::span<const ItaRow> rows) {
  std::map<std::string, double, std::less<>> out;
  for (const auto& r : rows) out.emplace(r.image_id, r.ita_degrees);
  return out;
}

inline OrderedJson distribution_json(const DistributionReport& report,
                                     const RunConfig& cfg) {
  OrderedJson j;
  j["total_images"] = report.total;
  j["evaluated_images"] = report.evaluated();
  j["skipped_images"] = report.skipped.size();
  j["images_without_mask"] = report.flagged_no_mask;
  OrderedJson cats = OrderedJson::array();
  for (SkinToneCategory c : kAllCategories) {
    OrderedJson entry;
    entry["category"] = std::string(abbreviation(c));
    entry["name"] = std::string(display_name(c));
    const ItaRange range = ita_range(c);
    entry["ita_lower_exclusive"] =
        std::isinf(range.lower) ? OrderedJson() : OrderedJson(range.lower);
    entry["ita_upper_inclusive"] =
        std::isinf(range.upper) ? OrderedJson() : OrderedJson(range.upper);
    entry["count"] = report.counts[index_of(c)];
    entry["fraction"] = report.fraction(c);
    cats.push_back(std::move(entry));
  }
  j["categories"] = std::move(cats);
  OrderedJson skipped = OrderedJson::array();
  for (const auto& s : report.skipped) {
    OrderedJson entry;
    entry["image_id"] = s.image_id;
    entry["reason"] = s.reason;
    skipped.push_back(std::move(entry));
  }
  j["skipped"] = std::move(skipped);
  j["config"] = config_echo(cfg);
  return j;
}

struct CorrelationReport {
  double r_mean = 0.0;
  double r_median = 0.0;
  std::size_t n = 0;
};

// Pearson r of ITA against mean and median grayscale, across images.
inline CorrelationReport correlation_report(std::span<const double> ita,
                                            std::span<const double> mean_gray,
                                            std::span<const double> median_gray) {
  if (ita.size() < 2) {
    throw Error(ErrorCode::kInsufficientPoints,
                "correlation needs at least two images");
  }
  return {stats::pearson(ita, mean_gray), stats::pearson(ita, median_gray),
          ita.size()};
}

inline CorrelationReport correlation_report(
    std::span<const ItaEstimate> estimates) {
  std::vector<double> ita;
  std::vector<double> mean_gray;
  std::vector<double> median_gray;
  for (const auto& e : estimates) {
    ita.push_back(e.ita_degrees);
    mean_gray.push_back(e.mean_gray);
    median_gray.push_back(e.median_gray);
  }
  return correlation_report(ita, mean_gray, median_gray);
}

inline OrderedJson correlation_json(const CorrelationReport& c,
                                    const RunConfig& cfg) {
  OrderedJson j;
  j["n_images"] = c.n;
  j["r_mean_gray"] = c.r_mean;
  j["r_median_gray"] = c.r_median;
  j["config"] = config_echo(cfg);
  return j;
}

// Segmentation quality over manifest entries that carry both mask_path
// (prediction) and gt_mask_path. Entries lacking a pair, or whose files fail
// to load, are skipped with a warning.
inline SegQualityReport evaluate_segmentation_manifest(
    std::span<const ManifestEntry> manifest, const ItaConfig& cfg,
    int workers = 1) {
  cfg.validate();
  std::vector<std::optional<SegImageResult>> slots(manifest.size());
  std::vector<std::string> skip_reasons(manifest.size());
  parallel_for(manifest.size(), workers, [&](std::size_t i) {
    const ManifestEntry& e = manifest[i];
    if (!e.mask_path || !e.gt_mask_path) {
      skip_reasons[i] = "image '" + e.image_id +
                        "': needs both mask_path and gt_mask_path";
      return;
    }
    RgbImage image;
    ExclusionMask pred;
    ExclusionMask gt;
    try {
      image = read_rgb_image(e.image_path);
      pred = read_mask(*e.mask_path, cfg.mask_threshold, cfg.mask_polarity);
      gt = read_mask(*e.gt_mask_path, cfg.mask_threshold, cfg.mask_polarity);
      require_same_shape(image, pred, "image and predicted mask");
      require_same_shape(image, gt, "image and ground-truth mask");
    } catch (const Error& err) {
      skip_reasons[i] = "image '" + e.image_id + "': " + err.what();
      return;
    }
    slots[i] = evaluate_sample(SegSample{e.image_id, &image, &pred, &gt}, cfg);
  });
  std::vector<SegImageResult> results;
  std::vector<std::string> warnings;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    if (slots[i]) {
      results.push_back(std::move(*slots[i]));
    } else {
      warnings.push_back(skip_reasons[i]);
    }
  }
  SegQualityReport report = aggregate_segmentation(std::move(results));
  warnings.insert(warnings.end(), report.warnings.begin(),
                  report.warnings.end());
  report.warnings = std::move(warnings);
  return report;
}

inline OrderedJson segmentation_json(const SegQualityReport& r,
                                     const RunConfig& cfg) {
  OrderedJson j;
  j["pixel_accuracy"] = r.pixel_accuracy;
  j["false_negative_rate"] = r.false_negative_rate;
  j["ita_mae_degrees"] =
      r.ita_mae_degrees ? OrderedJson(*r.ita_mae_degrees) : OrderedJson();
  j["n_images"] = r.n_images;
  j["n_ita_images"] = r.n_ita_images;
  j["positive_class"] = "excluded";
  j["warnings"] = r.warnings;
  j["config"] = config_echo(cfg);
  return j;
}

inline std::string segmentation_csv(const SegQualityReport& r) {
  std::string out =
      "image_id,accuracy,false_negative_rate,abs_delta_ita,ita_pred,ita_gt\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? format_fixed(*v) : std::string();
  };
  for (const auto& p : r.per_image) {
    out += csv_row({p.image_id, format_fixed(p.accuracy),
                    format_fixed(p.false_negative_rate), opt(p.abs_delta_ita),
                    opt(p.ita_pred), opt(p.ita_gt)});
  }
  return out;
}

}  // namespace skintone

#endif  // SKINTONE_AUDIT_HPP_
