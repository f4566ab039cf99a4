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

#pragma once

#include <span>

#include "bw/signal.hpp"
#include "json.hpp"

namespace bw {

// Interaural time difference in ms: the lag maximizing the normalized
// cross-correlation sum_n l[n] r[n + k] over |k| <= max_lag, refined by a
// parabola through the peak and its neighbours. Positive when the right
// channel lags the left.
double measure_itd(std::span<const double> left, std::span<const double> right,
                   int sample_rate, double max_lag_ms = 1.0);

// Broadband ILD in dB: per-bin ILD averaged with weights |L|^2 + |R|^2 over
// bins whose total energy is within `threshold_db` of the peak bin.
double measure_ild(const BinauralSpectrogram& binaural,
                   double threshold_db = -60.0);

double delta_itd(const BinauralSpectrogram& est,
                 const BinauralSpectrogram& target, double max_lag_ms = 1.0);
double delta_ild(const BinauralSpectrogram& est,
                 const BinauralSpectrogram& target,
                 double threshold_db = -60.0);

// RMS over active bins of both ears of 20 log10 |est| - 20 log10 |target|.
// Magnitudes are floored at floor_db below the target's peak magnitude and a
// bin is active when the target exceeds that floor.
double spectral_distance(const BinauralSpectrogram& est,
                         const BinauralSpectrogram& target,
                         double floor_db = -80.0);

struct MetricsReport {
  double delta_itd_ms = 0.0;
  double delta_ild_db = 0.0;
  double sd_db = 0.0;
};

MetricsReport evaluate_binaural(const BinauralSpectrogram& est,
                                const BinauralSpectrogram& target);

nlohmann::json to_json(const MetricsReport& r);

}  // namespace bw
