// Copyright 2026 The Binaural Workbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bw/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bw/error.hpp"

namespace bw {
namespace {

double sum_squares(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

double xcorr_at(std::span<const double> l, std::span<const double> r, int k) {
  const long n = static_cast<long>(std::min(l.size(), r.size()));
  double acc = 0.0;
  if (k >= 0) {
    for (long i = 0; i + k < n; ++i) acc += l[i] * r[i + k];
  } else {
    // Index by the right channel so that swapping channels reproduces the
    // same products in the same order.
    for (long i = 0; i - k < n; ++i) acc += l[i - k] * r[i];
  }
  return acc;
}

}  // namespace

double measure_itd(std::span<const double> left, std::span<const double> right,
                   int sample_rate, double max_lag_ms) {
  require(sample_rate > 0, "measure_itd: sample rate must be positive");
  const double el = sum_squares(left), er = sum_squares(right);
  if (el == 0.0 || er == 0.0) {
    throw Error("measure_itd: silent channel");
  }
  const int max_lag = std::max(
      1, static_cast<int>(std::floor(max_lag_ms * 1e-3 * sample_rate)));
  const double norm = 1.0 / std::sqrt(el * er);
  std::vector<double> r(2 * max_lag + 1);
  for (int k = -max_lag; k <= max_lag; ++k) {
    r[k + max_lag] = xcorr_at(left, right, k) * norm;
  }
  // Ties resolve toward the smallest |lag| so the estimate stays
  // antisymmetric under channel swaps.
  int best = 0;
  for (int k = -max_lag; k <= max_lag; ++k) {
    const double v = r[k + max_lag], b = r[best + max_lag];
    if (v > b || (v == b && std::abs(k) < std::abs(best))) best = k;
  }
  double lag = best;
  if (best > -max_lag && best < max_lag) {
    const double a = r[best - 1 + max_lag];
    const double b = r[best + max_lag];
    const double c = r[best + 1 + max_lag];
    const double denom = (a + c) - 2.0 * b;
    if (denom < 0.0) lag += 0.5 * (a - c) / denom;
  }
  return lag * 1000.0 / sample_rate;
}

double measure_ild(const BinauralSpectrogram& b, double threshold_db) {
  double peak = 0.0;
  for (Eigen::Index f = 0; f < b.left.rows(); ++f) {
    for (Eigen::Index t = 0; t < b.left.cols(); ++t) {
      peak = std::max(peak, std::norm(b.left(f, t)) + std::norm(b.right(f, t)));
    }
  }
  if (peak == 0.0) throw Error("measure_ild: silent input");
  const double floor = peak * std::pow(10.0, threshold_db / 10.0);
  double num = 0.0, den = 0.0;
  for (Eigen::Index f = 0; f < b.left.rows(); ++f) {
    for (Eigen::Index t = 0; t < b.left.cols(); ++t) {
      const double e = std::norm(b.left(f, t)) + std::norm(b.right(f, t));
      if (e < floor) continue;
      num += e * level_difference_db(std::abs(b.left(f, t)),
                                     std::abs(b.right(f, t)), 1e-300);
      den += e;
    }
  }
  if (den == 0.0) throw Error("measure_ild: all bins below threshold");
  return num / den;
}

double delta_itd(const BinauralSpectrogram& est,
                 const BinauralSpectrogram& target, double max_lag_ms) {
  const auto e = est.to_time(), t = target.to_time();
  return std::abs(
      measure_itd(e[0], e[1], est.config.sample_rate, max_lag_ms) -
      measure_itd(t[0], t[1], target.config.sample_rate, max_lag_ms));
}

double delta_ild(const BinauralSpectrogram& est,
                 const BinauralSpectrogram& target, double threshold_db) {
  return std::abs(measure_ild(est, threshold_db) -
                  measure_ild(target, threshold_db));
}

double spectral_distance(const BinauralSpectrogram& est,
                         const BinauralSpectrogram& target, double floor_db) {
  require_same_shape(est, target);
  double peak = 0.0;
  for (const ComplexPlane* p : {&target.left, &target.right}) {
    for (Eigen::Index f = 0; f < p->rows(); ++f) {
      for (Eigen::Index t = 0; t < p->cols(); ++t) {
        peak = std::max(peak, std::abs((*p)(f, t)));
      }
    }
  }
  const double floor = peak * std::pow(10.0, floor_db / 20.0);
  double acc = 0.0;
  long active = 0;
  const ComplexPlane* ests[2] = {&est.left, &est.right};
  const ComplexPlane* tgts[2] = {&target.left, &target.right};
  for (int ear = 0; ear < 2; ++ear) {
    for (Eigen::Index f = 0; f < tgts[ear]->rows(); ++f) {
      for (Eigen::Index t = 0; t < tgts[ear]->cols(); ++t) {
        const double y = std::abs((*tgts[ear])(f, t));
        if (!(y > floor)) continue;
        const double e = std::max(std::abs((*ests[ear])(f, t)), floor);
        const double d = 20.0 * (std::log10(e) - std::log10(y));
        acc += d * d;
        ++active;
      }
    }
  }
  if (active == 0) throw Error("spectral_distance: no active bins in target");
  return std::sqrt(acc / active);
}

MetricsReport evaluate_binaural(const BinauralSpectrogram& est,
                                const BinauralSpectrogram& target) {
  MetricsReport r;
  r.delta_itd_ms = delta_itd(est, target);
  r.delta_ild_db = delta_ild(est, target);
  r.sd_db = spectral_distance(est, target);
  return r;
}

nlohmann::json to_json(const MetricsReport& r) {
  return {{"delta_itd_ms", r.delta_itd_ms},
          {"delta_ild_db", r.delta_ild_db},
          {"sd_db", r.sd_db}};
}

}  // namespace bw
