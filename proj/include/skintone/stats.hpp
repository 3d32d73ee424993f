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

// Numeric building blocks: Student-t quantiles (through the regularized
// incomplete beta function), Pearson correlation and least-squares lines.

#ifndef SKINTONE_STATS_HPP_
#define SKINTONE_STATS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "skintone/error.hpp"

namespace skintone {
namespace stats {

namespace internal {

// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 500;
  constexpr double kEpsilon = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEpsilon) break;
  }
  return h;
}

}  // namespace internal

// I_x(a, b) for a, b > 0 and x in [0, 1].
inline double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorCode::kUsage, "incomplete beta argument out of domain");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * internal::beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * internal::beta_continued_fraction(b, a, 1.0 - x) / b;
}

// Solves I_x(a, b) = p for x by bisection; I_x is monotone in x.
inline double inverse_regularized_incomplete_beta(double a, double b,
                                                  double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kUsage, "probability must lie in [0, 1]");
  }
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (regularized_incomplete_beta(a, b, mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double student_t_cdf(double t, double dof) {
  if (!(dof > 0.0)) throw Error(ErrorCode::kUsage, "dof must be positive");
  const double x = dof / (dof + t * t);
  const double tail = 0.5 * regularized_incomplete_beta(0.5 * dof, 0.5, x);
  return t >= 0.0 ? 1.0 - tail : tail;
}

inline double student_t_quantile(double p, double dof) {
  if (!(dof > 0.0)) throw Error(ErrorCode::kUsage, "dof must be positive");
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kUsage, "quantile probability must lie in (0, 1)");
  }
  if (p == 0.5) return 0.0;
  const double tail = p > 0.5 ? 1.0 - p : p;
  const double x = inverse_regularized_incomplete_beta(0.5 * dof, 0.5,
                                                       2.0 * tail);
  const double t = std::sqrt(dof * (1.0 - x) / x);
  return p > 0.5 ? t : -t;
}

inline double mean(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

// n-1 denominator.
inline double sample_std(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Sample Pearson correlation coefficient.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "pearson: sequences have lengths " + std::to_string(x.size()) +
                    " and " + std::to_string(y.size()));
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::kInsufficientPoints,
                "pearson: need at least two points");
  }
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) {
    throw Error(ErrorCode::kZeroVariance, "pearson: zero variance input");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;  // from the residual variance, n-2 dof
  std::size_t n = 0;
};

// Least-squares line y = intercept + slope * x. With `weights` non-empty the
// fit is weighted; weights are rescaled to average 1 so the residual
// variance keeps its unweighted meaning.
inline LinearFit least_squares(std::span<const double> x,
                               std::span<const double> y,
                               std::span<const double> weights = {}) {
  const std::size_t n = x.size();
  if (y.size() != n || (!weights.empty() && weights.size() != n)) {
    throw Error(ErrorCode::kLengthMismatch, "least_squares: length mismatch");
  }
  if (n < 3) {
    throw Error(ErrorCode::kInsufficientPoints,
                "least_squares: need at least 3 points, got " +
                    std::to_string(n));
  }
  std::vector<double> w(n, 1.0);
  if (!weights.empty()) {
    double total = 0.0;
    for (double v : weights) {
      if (!(v > 0.0)) {
        throw Error(ErrorCode::kUsage, "least_squares: weights must be > 0");
      }
      total += v;
    }
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = weights[i] * static_cast<double>(n) / total;
    }
  }
  double sw = 0.0;
  double swx = 0.0;
  double swy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    swx += w[i] * x[i];
    swy += w[i] * y[i];
  }
  const double mx = swx / sw;
  const double my = swy / sw;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) {
    throw Error(ErrorCode::kDegenerateX, "least_squares: all x values equal");
  }
  LinearFit fit;
  fit.n = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    rss += w[i] * r * r;
  }
  const double residual_variance = rss / static_cast<double>(n - 2);
  fit.slope_se = std::sqrt(residual_variance / sxx);
  return fit;
}

}  // namespace stats
}  // namespace skintone

#endif  // SKINTONE_STATS_HPP_
