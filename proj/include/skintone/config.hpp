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

// Run configuration: flat `key = value` files with `#` comments, and the
// effective-config echo embedded in every JSON and SVG artifact.

#ifndef SKINTONE_CONFIG_HPP_
#define SKINTONE_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "skintone/csv.hpp"
#include "skintone/error.hpp"
#include "skintone/fairness.hpp"
#include "skintone/ita.hpp"
#include "skintone/version.hpp"

namespace skintone {

using OrderedJson = nlohmann::ordered_json;

struct KeyValue {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

inline std::string_view trim_whitespace(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// `key = value` per line; `#` starts a comment anywhere on a line.
inline std::vector<KeyValue> parse_key_values(std::string_view text,
                                              std::string_view source) {
  std::vector<KeyValue> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{}
                                         : text.substr(eol + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim_whitespace(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kUsage, std::string(source) + ":" +
                                         std::to_string(line_no) +
                                         ": expected 'key = value'");
    }
    KeyValue kv{std::string(trim_whitespace(line.substr(0, eq))),
                std::string(trim_whitespace(line.substr(eq + 1))), line_no};
    if (kv.key.empty()) {
      throw Error(ErrorCode::kUsage, std::string(source) + ":" +
                                         std::to_string(line_no) +
                                         ": empty key");
    }
    out.push_back(std::move(kv));
  }
  return out;
}

inline std::vector<KeyValue> read_key_value_file(
    const std::filesystem::path& path) {
  return parse_key_values(read_text_file(path), path.string());
}

inline bool parse_bool(std::string_view v, std::string_view context) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorCode::kUsage,
              std::string(context) + ": expected a boolean, got '" +
                  std::string(v) + "'");
}

inline std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    const auto item = trim_whitespace(v.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

struct RunConfig {
  ItaConfig ita;
  BinMidpoints midpoints;
  bool weighted_trend = false;
  std::vector<std::string> labels;  // empty: taken from the predictions
  std::string out_dir = "out";
  int workers = 1;  // 0 = hardware concurrency
  std::optional<std::uint64_t> seed;  // overrides the synth spec seed

  // Applies one setting; unknown keys and malformed values are usage errors.
  void set(std::string_view key, std::string_view value,
           std::string_view context = "config") {
    const std::string where = std::string(context) + ": " + std::string(key);
    auto usage = [&](std::string_view expected) {
      return Error(ErrorCode::kUsage, where + ": expected " +
                                          std::string(expected) + ", got '" +
                                          std::string(value) + "'");
    };
    auto as_double = [&] {
      try {
        return parse_double(value, where);
      } catch (const Error&) {
        throw usage("a number");
      }
    };
    auto as_integer = [&] {
      try {
        return parse_integer(value, where);
      } catch (const Error&) {
        throw usage("an integer");
      }
    };

    if (key == "trim_mode") {
      auto m = parse_trim_mode(value);
      if (!m) throw usage("mean_of_means or mean_of_pixel_itas");
      ita.trim_mode = *m;
    } else if (key == "trim_sigma") {
      ita.trim_sigma = as_double();
    } else if (key == "mask_threshold") {
      ita.mask_threshold = static_cast<int>(as_integer());
    } else if (key == "mask_polarity") {
      auto p = parse_mask_polarity(value);
      if (!p) throw usage("white_excluded or black_excluded");
      ita.mask_polarity = *p;
    } else if (key == "grayscale_mode") {
      auto g = parse_gray_mode(value);
      if (!g) throw usage("rec601 or channel_mean");
      ita.gray_mode = *g;
    } else if (key.starts_with("midpoint_")) {
      auto c = category_from_abbreviation(key.substr(9));
      if (!c) throw Error(ErrorCode::kUsage, where + ": unknown bin");
      midpoints.set(*c, as_double());
    } else if (key == "weighted_trend") {
      weighted_trend = parse_bool(value, where);
    } else if (key == "labels") {
      labels = split_list(value);
    } else if (key == "out_dir") {
      out_dir = std::string(value);
    } else if (key == "workers") {
      const long long w = as_integer();
      if (w < 0) throw usage("a non-negative integer");
      workers = static_cast<int>(w);
    } else if (key == "seed") {
      const long long s = as_integer();
      seed = static_cast<std::uint64_t>(s);
    } else {
      throw Error(ErrorCode::kUsage, std::string(context) +
                                         ": unknown config key '" +
                                         std::string(key) + "'");
    }
  }

  void apply(const std::vector<KeyValue>& entries, std::string_view source) {
    for (const auto& kv : entries) {
      set(kv.key, kv.value, std::string(source) + ":" + std::to_string(kv.line));
    }
  }

  void validate() const { ita.validate(); }
};

// Settings that influence results. Output location and worker count are
// left out so artifacts do not depend on them.
inline OrderedJson config_echo(const RunConfig& cfg) {
  OrderedJson j;
  j["tool"] = std::string(kToolName);
  j["version"] = std::string(kToolVersion);
  j["color_pipeline"] = std::string(kColorPipelineId);
  j["trim_mode"] = std::string(trim_mode_name(cfg.ita.trim_mode));
  j["trim_sigma"] = cfg.ita.trim_sigma;
  j["trim_rule"] = "joint_l_and_b/inclusive/population_std";
  j["mask_threshold"] = cfg.ita.mask_threshold;
  j["mask_polarity"] = std::string(mask_polarity_name(cfg.ita.mask_polarity));
  j["grayscale_mode"] = std::string(gray_mode_name(cfg.ita.gray_mode));
  OrderedJson mids = OrderedJson::object();
  for (SkinToneCategory c : kAllCategories) {
    mids[std::string(abbreviation(c))] = cfg.midpoints[c];
  }
  j["midpoints"] = std::move(mids);
  j["weighted_trend"] = cfg.weighted_trend;
  j["aggregation"] = "unweighted_mean_per_image";
  return j;
}

// JSON text with a trailing newline.
inline std::string dump_json(const OrderedJson& j) { return j.dump(2) + "\n"; }

}  // namespace skintone

#endif  // SKINTONE_CONFIG_HPP_
