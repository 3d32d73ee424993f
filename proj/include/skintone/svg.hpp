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

// Deterministic SVG charts: the skin-tone histogram and accuracy vs. ITA.

#ifndef SKINTONE_SVG_HPP_
#define SKINTONE_SVG_HPP_

#include <algorithm>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "skintone/audit.hpp"
#include "skintone/config.hpp"
#include "skintone/csv.hpp"
#include "skintone/fairness.hpp"

namespace skintone {

namespace svg_internal {

inline std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string num(double v) { return format_fixed(v, 2); }

inline std::string header(int width, int height, std::string_view title,
                          const OrderedJson& metadata) {
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
       std::to_string(width) + "\" height=\"" + std::to_string(height) +
       "\" viewBox=\"0 0 " + std::to_string(width) + " " +
       std::to_string(height) + "\" font-family=\"sans-serif\">\n";
  s += "<title>" + escape_xml(title) + "</title>\n";
  s += "<metadata>" + escape_xml(metadata.dump()) + "</metadata>\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width) +
       "\" height=\"" + std::to_string(height) + "\" fill=\"white\"/>\n";
  return s;
}

inline std::string text(double x, double y, std::string_view body,
                        std::string_view anchor = "middle", int size = 12) {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" +
         std::to_string(size) + "\" text-anchor=\"" + std::string(anchor) +
         "\">" + escape_xml(body) + "</text>\n";
}

inline std::string line(double x1, double y1, double x2, double y2,
                        std::string_view stroke = "black",
                        std::string_view extra = "") {
  std::string s = "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) +
                  "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
                  "\" stroke=\"" + std::string(stroke) + "\"";
  if (!extra.empty()) s += " " + std::string(extra);
  return s + "/>\n";
}

}  // namespace svg_internal

// Eight bars in lightest-first order, scaled to the largest count.
inline std::string histogram_svg(const DistributionReport& report,
                                 const OrderedJson& metadata) {
  using namespace svg_internal;
  constexpr int kWidth = 640;
  constexpr int kHeight = 400;
  constexpr double kLeft = 60.0;
  constexpr double kRight = 20.0;
  constexpr double kTop = 40.0;
  constexpr double kBottom = 60.0;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const double slot = plot_w / static_cast<double>(kNumCategories);
  const double bar_w = slot * 0.7;
  const std::size_t max_count =
      *std::max_element(report.counts.begin(), report.counts.end());

  std::string s = header(kWidth, kHeight, "ITA skin tone distribution",
                         metadata);
  s += text(kWidth / 2.0, 24.0, "ITA skin tone distribution", "middle", 16);
  s += line(kLeft, kTop + plot_h, kLeft + plot_w, kTop + plot_h);
  s += line(kLeft, kTop, kLeft, kTop + plot_h);
  s += text(kLeft - 8.0, kTop + plot_h + 4.0, "0", "end");
  s += text(kLeft - 8.0, kTop + 4.0, std::to_string(max_count), "end");
  for (std::size_t i = 0; i < kNumCategories; ++i) {
    const SkinToneCategory c = kAllCategories[i];
    const std::size_t count = report.counts[i];
    const double h = max_count == 0 ? 0.0
                                    : plot_h * static_cast<double>(count) /
                                          static_cast<double>(max_count);
    const double x = kLeft + slot * static_cast<double>(i) + (slot - bar_w) / 2;
    s += "<rect class=\"bar\" data-category=\"" +
         std::string(abbreviation(c)) + "\" x=\"" + num(x) + "\" y=\"" +
         num(kTop + plot_h - h) + "\" width=\"" + num(bar_w) +
         "\" height=\"" + num(h) + "\" fill=\"#8c6d5a\"/>\n";
    s += text(x + bar_w / 2, kTop + plot_h - h - 4.0, std::to_string(count));
    s += text(x + bar_w / 2, kTop + plot_h + 18.0, abbreviation(c));
  }
  s += text(kWidth / 2.0, kHeight - 12.0, "skin tone category");
  s += "</svg>\n";
  return s;
}

// Per-bin mean accuracy with standard-error bars and the fitted trend line.
inline std::string accuracy_plot_svg(std::span<const PerBinAccuracy> bins,
                                     const BinMidpoints& midpoints,
                                     const std::optional<TrendFit>& trend,
                                     const OrderedJson& metadata) {
  using namespace svg_internal;
  constexpr int kWidth = 640;
  constexpr int kHeight = 400;
  constexpr double kLeft = 60.0;
  constexpr double kRight = 20.0;
  constexpr double kTop = 40.0;
  constexpr double kBottom = 60.0;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto& mids = midpoints.values();
  const double x_min = *std::min_element(mids.begin(), mids.end()) - 5.0;
  const double x_max = *std::max_element(mids.begin(), mids.end()) + 5.0;
  auto px = [&](double ita) {
    return kLeft + plot_w * (ita - x_min) / (x_max - x_min);
  };
  auto py = [&](double acc) {
    return kTop + plot_h * (1.0 - std::clamp(acc, 0.0, 1.0));
  };

  std::string s =
      header(kWidth, kHeight, "Classification accuracy versus ITA", metadata);
  s += text(kWidth / 2.0, 24.0, "Classification accuracy versus ITA", "middle",
            16);
  s += line(kLeft, kTop + plot_h, kLeft + plot_w, kTop + plot_h);
  s += line(kLeft, kTop, kLeft, kTop + plot_h);
  for (int tick = 0; tick <= 4; ++tick) {
    const double acc = tick / 4.0;
    s += text(kLeft - 8.0, py(acc) + 4.0, format_fixed(acc, 2), "end");
  }
  for (const auto& bin : bins) {
    const double x = px(midpoints[bin.category]);
    s += text(x, kTop + plot_h + 18.0, abbreviation(bin.category));
    if (!bin.mean_accuracy) continue;
    const double mean = *bin.mean_accuracy;
    const double se = bin.std_error.value_or(0.0);
    s += line(x, py(mean - se), x, py(mean + se), "#444444");
    s += "<circle class=\"point\" data-category=\"" +
         std::string(abbreviation(bin.category)) + "\" cx=\"" + num(x) +
         "\" cy=\"" + num(py(mean)) + "\" r=\"4\" fill=\"#1f5f8b\"/>\n";
  }
  if (trend) {
    s += line(px(x_min), py(trend->intercept + trend->slope * x_min),
              px(x_max), py(trend->intercept + trend->slope * x_max),
              "#c0392b", "stroke-dasharray=\"6,4\" class=\"trend\"");
    s += text(kLeft + plot_w, kTop - 8.0,
              "slope " + format_fixed(trend->slope, 4) + "/deg, 95% CI (" +
                  format_fixed(trend->ci95_low, 4) + ", " +
                  format_fixed(trend->ci95_high, 4) + ")",
              "end", 11);
  }
  s += text(kWidth / 2.0, kHeight - 12.0, "ITA (degrees, bin midpoint)");
  s += "</svg>\n";
  return s;
}

inline void emit_histogram_svg(const DistributionReport& report,
                               const OrderedJson& metadata,
                               const std::filesystem::path& path) {
  write_text_file(path, histogram_svg(report, metadata));
}

}  // namespace skintone

#endif  // SKINTONE_SVG_HPP_
