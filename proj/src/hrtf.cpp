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

#include "bw/hrtf.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bw/error.hpp"
#include "bw/fft.hpp"
#include "bw/wav.hpp"

namespace bw {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<cdouble> ear_response(double alpha, double delay_s,
                                  const StftConfig& cfg,
                                  const HeadModel& model) {
  const int bins = cfg.num_bins();
  const double w0 = model.speed_of_sound / model.head_radius;
  std::vector<cdouble> h(bins);
  for (int k = 0; k < bins; ++k) {
    const double omega =
        2.0 * kPi * k * cfg.sample_rate / static_cast<double>(cfg.frame_len);
    const double u = omega / (2.0 * w0);
    cdouble shadow;
    if (model.shadow == ShadowPhase::kZeroPhase) {
      shadow = std::sqrt((1.0 + alpha * alpha * u * u) / (1.0 + u * u));
    } else {
      shadow = cdouble(1.0, alpha * u) / cdouble(1.0, u);
    }
    h[k] = shadow * std::polar(1.0, -omega * delay_s);
  }
  return h;
}

}  // namespace

double lateral_angle(double azimuth_deg) {
  double a = azimuth_deg;
  if (a > 90.0) a = 180.0 - a;
  if (a < -90.0) a = -180.0 - a;
  return a * kPi / 180.0;
}

double woodworth_itd(double azimuth_deg, const HeadModel& model) {
  const double theta = lateral_angle(azimuth_deg);
  return model.head_radius / model.speed_of_sound * (theta + std::sin(theta));
}

HrtfFilter hrtf_for_azimuth(double azimuth_deg, const StftConfig& cfg,
                            const HeadModel& model) {
  cfg.validate();
  require(azimuth_deg >= -180.0 && azimuth_deg <= 180.0,
          "hrtf: azimuth must lie in [-180, 180] degrees");
  require(model.head_radius > 0 && model.speed_of_sound > 0,
          "hrtf: head radius and speed of sound must be positive");
  const double s = std::sin(azimuth_deg * kPi / 180.0);
  const double itd = woodworth_itd(azimuth_deg, model);
  HrtfFilter out;
  out.azimuth_deg = azimuth_deg;
  out.model = model;
  // cos(angle to left ear at +90) = sin(az); right ear at -90 gives -sin(az).
  out.left = ear_response(1.0 + s, -0.5 * itd, cfg, model);
  out.right = ear_response(1.0 - s, 0.5 * itd, cfg, model);
  return out;
}

BinauralSpectrogram apply_hrtf(const ComplexPlane& mono,
                               const HrtfFilter& hrtf, const StftConfig& cfg) {
  require(mono.rows() == static_cast<Eigen::Index>(hrtf.left.size()),
          "apply_hrtf: bin count mismatch");
  ComplexPlane l(mono.rows(), mono.cols()), r(mono.rows(), mono.cols());
  for (Eigen::Index t = 0; t < mono.cols(); ++t) {
    for (Eigen::Index f = 0; f < mono.rows(); ++f) {
      l(f, t) = hrtf.left[f] * mono(f, t);
      r(f, t) = hrtf.right[f] * mono(f, t);
    }
  }
  return {std::move(l), std::move(r), cfg};
}

BinauralSpectrogram render_binaural(std::span<const double> clean_speech,
                                    double azimuth_deg, const StftConfig& cfg,
                                    const HeadModel& model) {
  return apply_hrtf(stft(clean_speech, cfg),
                    hrtf_for_azimuth(azimuth_deg, cfg, model), cfg);
}

HrirSet HrirSet::load(const std::filesystem::path& dir, int sample_rate) {
  if (!std::filesystem::is_directory(dir)) {
    throw IoError("hrir directory not found: " + dir.string());
  }
  HrirSet set;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".wav") continue;
    const std::string stem = entry.path().stem().string();
    std::size_t used = 0;
    int az = 0;
    try {
      az = std::stoi(stem, &used);
    } catch (const std::exception&) {
      continue;
    }
    if (used != stem.size()) continue;
    Audio a = read_wav(entry.path(), sample_rate);
    if (a.num_channels() != 2) {
      throw Error("hrir file must be stereo: " + entry.path().string());
    }
    set.irs_[az] = {a.channels[0], a.channels[1]};
  }
  if (set.irs_.empty()) {
    throw IoError("no azimuth-named wav files in " + dir.string());
  }
  return set;
}

std::vector<int> HrirSet::azimuths() const {
  std::vector<int> out;
  for (const auto& [az, _] : irs_) out.push_back(az);
  return out;
}

HrtfFilter HrirSet::filter_for(double azimuth_deg,
                               const StftConfig& cfg) const {
  require(!irs_.empty(), "hrir set is empty");
  int best = irs_.begin()->first;
  double best_err = std::numeric_limits<double>::infinity();
  for (const auto& [az, _] : irs_) {
    double err = std::abs(std::remainder(azimuth_deg - az, 360.0));
    if (err < best_err) {
      best_err = err;
      best = az;
    }
  }
  const auto& [l, r] = irs_.at(best);
  HrtfFilter f;
  f.azimuth_deg = best;
  f.left = transfer_at_bins(l, cfg.frame_len);
  f.right = transfer_at_bins(r, cfg.frame_len);
  return f;
}

}  // namespace bw
