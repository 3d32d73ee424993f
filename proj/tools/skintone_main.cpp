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

// skintone: command-line front end.
//
//   skintone synth     --spec S --out-dir D
//   skintone ita       --manifest M --out-dir D
//   skintone segeval   --manifest M --out-dir D
//   skintone fairness  --predictions P --ita-results R --out-dir D
//   skintone correlate (--ita-results R | --manifest M) --out-dir D
//
// Exit codes: 0 success (possibly with warnings), 1 usage error, 2 data
// error, 3 internal error. Fatal errors are reported as one JSON object on
// stderr.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <string_view>

#include "CLI11.hpp"
#include "skintone/skintone.hpp"

namespace {

namespace fs = std::filesystem;
using skintone::Error;
using skintone::ErrorCode;
using skintone::OrderedJson;
using skintone::RunConfig;

struct CommonFlags {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<int> workers;
  std::optional<std::string> trim_mode;
  std::optional<std::string> mask_polarity;
  std::optional<long long> seed;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "key = value config file");
  cmd->add_option("--out-dir", f.out_dir, "output directory");
  cmd->add_option("--workers", f.workers, "worker threads (0 = all cores)");
  cmd->add_option("--trim-mode", f.trim_mode,
                  "mean_of_means | mean_of_pixel_itas");
  cmd->add_option("--mask-polarity", f.mask_polarity,
                  "white_excluded | black_excluded");
  cmd->add_option("--seed", f.seed, "random seed (synth)");
}

// Defaults, then the config file, then flags.
RunConfig resolve_config(const CommonFlags& f) {
  RunConfig cfg;
  if (!f.config_path.empty()) {
    cfg.apply(skintone::read_key_value_file(f.config_path), f.config_path);
  }
  if (f.out_dir) cfg.out_dir = *f.out_dir;
  if (f.workers) cfg.set("workers", std::to_string(*f.workers), "--workers");
  if (f.trim_mode) cfg.set("trim_mode", *f.trim_mode, "--trim-mode");
  if (f.mask_polarity) {
    cfg.set("mask_polarity", *f.mask_polarity, "--mask-polarity");
  }
  if (f.seed) cfg.set("seed", std::to_string(*f.seed), "--seed");
  cfg.validate();
  return cfg;
}

// The CSV headers are fixed, so CSV outputs rely on this sidecar for the
// config echo.
void write_run_config(const fs::path& out, std::string_view command,
                      const RunConfig& cfg) {
  OrderedJson j;
  j["command"] = std::string(command);
  j["config"] = skintone::config_echo(cfg);
  skintone::write_text_file(out / "run_config.json", skintone::dump_json(j));
}

void warn(const std::string& message) {
  std::cerr << "warning: " << message << "\n";
}

int run_ita(const fs::path& manifest_path, const RunConfig& cfg) {
  const auto manifest = skintone::read_manifest(manifest_path);
  const auto result = skintone::run_audit(manifest, cfg.ita, cfg.workers);
  const fs::path out(cfg.out_dir);
  write_run_config(out, "ita", cfg);
  skintone::write_text_file(out / "ita_results.csv",
                            skintone::ita_results_csv(result.images));
  skintone::write_text_file(
      out / "distribution.json",
      skintone::dump_json(skintone::distribution_json(result.report, cfg)));
  skintone::emit_histogram_svg(result.report, skintone::config_echo(cfg),
                               out / "histogram.svg");
  for (const auto& s : result.report.skipped) {
    warn("skipped '" + s.image_id + "': " + s.reason);
  }
  std::cout << "evaluated " << result.report.evaluated() << " of "
            << result.report.total << " images; results in " << out.string()
            << "\n";
  return 0;
}

int run_segeval(const fs::path& manifest_path, const RunConfig& cfg) {
  const auto manifest = skintone::read_manifest(manifest_path);
  const auto report = skintone::evaluate_segmentation_manifest(
      manifest, cfg.ita, cfg.workers);
  const fs::path out(cfg.out_dir);
  write_run_config(out, "segeval", cfg);
  skintone::write_text_file(
      out / "seg_quality.json",
      skintone::dump_json(skintone::segmentation_json(report, cfg)));
  skintone::write_text_file(out / "seg_per_image.csv",
                            skintone::segmentation_csv(report));
  for (const auto& w : report.warnings) warn(w);
  std::cout << "accuracy " << skintone::format_fixed(report.pixel_accuracy, 3)
            << ", false negative rate "
            << skintone::format_fixed(report.false_negative_rate, 3)
            << ", ITA MAE "
            << (report.ita_mae_degrees
                    ? skintone::format_fixed(*report.ita_mae_degrees, 3)
                    : std::string("n/a"))
            << " deg over " << report.n_images << " images\n";
  return 0;
}

int run_fairness(const fs::path& predictions_path, const fs::path& ita_path,
                 const RunConfig& cfg) {
  const auto preds = skintone::read_predictions(predictions_path);
  const auto ita_rows = skintone::read_ita_results(ita_path);
  const auto summary =
      skintone::summarize_fairness(preds, skintone::ita_lookup(ita_rows), cfg);
  const fs::path out(cfg.out_dir);
  write_run_config(out, "fairness", cfg);
  skintone::write_text_file(out / "per_bin.csv",
                            skintone::per_bin_csv(summary.bins, cfg.midpoints));
  skintone::write_text_file(
      out / "trend.json",
      skintone::dump_json(skintone::fairness_json(summary, cfg)));
  skintone::write_text_file(
      out / "accuracy_vs_ita.svg",
      skintone::accuracy_plot_svg(summary.bins, cfg.midpoints, summary.trend,
                                  skintone::config_echo(cfg)));
  for (const auto& c : summary.balanced.absent_classes) {
    warn("class '" + c + "' has no records; left out of balanced accuracy");
  }
  if (!summary.trend_error.empty()) warn("no trend fit: " + summary.trend_error);
  std::cout << "accuracy " << skintone::format_fixed(summary.overall_accuracy, 3)
            << ", balanced accuracy "
            << skintone::format_fixed(summary.balanced.value, 3);
  if (summary.trend) {
    std::cout << ", slope " << skintone::format_fixed(summary.trend->slope, 4)
              << "/deg (95% CI "
              << skintone::format_fixed(summary.trend->ci95_low, 4) << ", "
              << skintone::format_fixed(summary.trend->ci95_high, 4) << ")";
  }
  std::cout << "\n";
  return 0;
}

int run_synth(const fs::path& spec_path, const RunConfig& cfg) {
  skintone::SynthSpec spec = skintone::parse_synth_spec(
      skintone::read_key_value_file(spec_path), spec_path.string());
  if (cfg.seed) spec.seed = *cfg.seed;
  const fs::path out(cfg.out_dir);
  const auto ds = skintone::generate_dataset(spec, out, cfg.workers);
  write_run_config(out, "synth", cfg);
  if (ds.clamped_pixels > 0) {
    warn(std::to_string(ds.clamped_pixels) +
         " pixels fell outside the sRGB gamut and were clamped");
  }
  std::cout << "wrote " << ds.truth.size() << " images to " << out.string()
            << "\n";
  return 0;
}

int run_correlate(const std::string& ita_path, const std::string& manifest_path,
                  const RunConfig& cfg) {
  skintone::CorrelationReport report;
  if (!ita_path.empty()) {
    const auto rows = skintone::read_ita_results(ita_path);
    std::vector<double> ita, mean_gray, median_gray;
    for (const auto& r : rows) {
      ita.push_back(r.ita_degrees);
      mean_gray.push_back(r.mean_gray);
      median_gray.push_back(r.median_gray);
    }
    report = skintone::correlation_report(ita, mean_gray, median_gray);
  } else {
    const auto manifest = skintone::read_manifest(manifest_path);
    const auto result = skintone::run_audit(manifest, cfg.ita, cfg.workers);
    std::vector<skintone::ItaEstimate> estimates;
    for (const auto& r : result.images) {
      if (r.estimate) estimates.push_back(*r.estimate);
    }
    report = skintone::correlation_report(estimates);
  }
  const fs::path out(cfg.out_dir);
  write_run_config(out, "correlate", cfg);
  skintone::write_text_file(
      out / "correlation.json",
      skintone::dump_json(skintone::correlation_json(report, cfg)));
  std::cout << "r(ITA, mean gray) " << skintone::format_fixed(report.r_mean, 3)
            << ", r(ITA, median gray) "
            << skintone::format_fixed(report.r_median, 3) << " over "
            << report.n << " images\n";
  return 0;
}

int report_error(ErrorCode code, const std::string& message) {
  OrderedJson j;
  j["error"]["kind"] = std::string(skintone::error_code_name(code));
  j["error"]["exit_code"] = skintone::exit_code(code);
  j["error"]["message"] = message;
  std::cerr << j.dump() << "\n";
  return skintone::exit_code(code);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skin tone (ITA) auditing for dermatology image datasets"};
  app.set_version_flag("--version", std::string(skintone::kToolName) + " " +
                                        std::string(skintone::kToolVersion));
  app.require_subcommand(1);

  CommonFlags flags;
  std::string manifest;
  std::string predictions;
  std::string ita_results;
  std::string spec;
  std::string labels;
  bool weighted = false;

  auto* ita = app.add_subcommand("ita", "estimate ITA for every manifest image");
  ita->add_option("--manifest", manifest, "manifest CSV")->required();
  add_common(ita, flags);

  auto* segeval = app.add_subcommand(
      "segeval", "score predicted masks (mask_path) against gt_mask_path");
  segeval->add_option("--manifest", manifest, "manifest CSV")->required();
  add_common(segeval, flags);

  auto* fairness = app.add_subcommand(
      "fairness", "classifier accuracy per skin-tone bin and trend");
  fairness->add_option("--predictions", predictions, "predictions CSV")
      ->required();
  fairness->add_option("--ita-results", ita_results, "ITA results CSV")
      ->required();
  fairness->add_option("--labels", labels, "comma-separated label set");
  fairness->add_flag("--weighted", weighted,
                     "weight the trend fit by bin sample counts");
  add_common(fairness, flags);

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--spec", spec, "synth spec file")->required();
  add_common(synth, flags);

  auto* correlate = app.add_subcommand(
      "correlate", "correlation of ITA with mean and median grayscale");
  auto* ita_opt =
      correlate->add_option("--ita-results", ita_results, "ITA results CSV");
  auto* manifest_opt =
      correlate->add_option("--manifest", manifest, "manifest CSV");
  ita_opt->excludes(manifest_opt);
  add_common(correlate, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error(ErrorCode::kUsage, e.what());
  }

  try {
    RunConfig cfg = resolve_config(flags);
    if (!labels.empty()) cfg.set("labels", labels, "--labels");
    if (weighted) cfg.weighted_trend = true;
    if (*ita) return run_ita(manifest, cfg);
    if (*segeval) return run_segeval(manifest, cfg);
    if (*fairness) return run_fairness(predictions, ita_results, cfg);
    if (*synth) return run_synth(spec, cfg);
    if (*correlate) {
      if (ita_results.empty() && manifest.empty()) {
        throw Error(ErrorCode::kUsage,
                    "correlate needs --ita-results or --manifest");
      }
      return run_correlate(ita_results, manifest, cfg);
    }
  } catch (const Error& e) {
    return report_error(e.code(), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return report_error(ErrorCode::kIo, e.what());
  } catch (const std::exception& e) {
    return report_error(ErrorCode::kInternal, e.what());
  }
  return report_error(ErrorCode::kUsage, "no subcommand");
}
