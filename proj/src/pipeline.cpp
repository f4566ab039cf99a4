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

#include "bw/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bw/error.hpp"
#include "bw/fft.hpp"
#include "bw/rng.hpp"

namespace bw {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<std::vector<double>> direct_rirs(const SceneSpec& spec,
                                             int sample_rate) {
  std::vector<std::vector<double>> out;
  for (const auto& mic : spec.array.positions(spec.array_center)) {
    out.push_back(image_method_rir(spec.room, spec.target.position, mic, 0,
                                   sample_rate));
  }
  std::size_t len = 0;
  for (const auto& h : out) len = std::max(len, h.size());
  for (auto& h : out) h.resize(len, 0.0);
  return out;
}

void normalize_peak(std::vector<double>& x, double peak) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (m > 0.0) {
    for (double& v : x) v *= peak / m;
  }
}

}  // namespace

SceneRealization realize_scene(const SceneSpec& spec,
                               std::span<const double> speech,
                               const std::vector<std::vector<double>>& noises,
                               const StftConfig& cfg, int max_order,
                               const HeadModel& head) {
  SceneRealization r;
  r.spec = spec;
  r.rirs = compute_rirs(spec, cfg.sample_rate, max_order);
  r.mix = mix_scene(spec, r.rirs, speech, noises);
  r.target = render_binaural(speech, spec.target.azimuth_deg, cfg, head);
  return r;
}

std::vector<std::vector<double>> advance(
    const std::vector<std::vector<double>>& x, std::size_t samples) {
  std::vector<std::vector<double>> out;
  for (const auto& c : x) {
    std::vector<double> y(c.size(), 0.0);
    for (std::size_t n = 0; n + samples < c.size(); ++n) y[n] = c[n + samples];
    out.push_back(std::move(y));
  }
  return out;
}

BinauralSpectrogram run_lbh_mvdr(
    const SceneSpec& spec, const std::vector<std::vector<double>>& capture,
    const std::vector<std::vector<double>>& noise_image, const StftConfig& cfg,
    const HeadModel& head) {
  require(static_cast<int>(capture.size()) == spec.array.num_mics(),
          "lbh-mvdr: capture channel count does not match the array");
  const Vec3 mic0 = spec.array.positions(spec.array_center)[0];
  const auto offset = static_cast<std::size_t>(std::floor(
      distance(spec.target.position, mic0) / kSpeedOfSound * cfg.sample_rate));
  SteeringVector steering = steering_from_rirs(direct_rirs(spec, cfg.sample_rate), cfg);
  for (int f = 0; f < cfg.num_bins(); ++f) {
    steering.reference[f] *=
        std::polar(1.0, 2.0 * kPi * f * static_cast<double>(offset) / cfg.frame_len);
  }
  const auto x = MultiChannelSpectrogram::from_signals(advance(capture, offset), cfg);
  const auto n =
      MultiChannelSpectrogram::from_signals(advance(noise_image, offset), cfg);
  return lbh_mvdr(x, spec.target.azimuth_deg, steering, n, cfg, head);
}

BinauralSpectrogram run_mif(const SceneSpec& spec,
                            const std::vector<std::vector<double>>& capture,
                            const StftConfig& cfg, const MifOptions& options,
                            int max_order, const HeadModel& head) {
  const RirSet rirs = compute_rirs(spec, cfg.sample_rate, max_order);
  // Only the target column is needed; noise columns are recomputed cheaply
  // as part of compute_rirs and ignored here.
  return mif_pipeline(capture, rirs.source_column(0), spec.target.azimuth_deg,
                      cfg, options, head);
}

std::vector<std::vector<cdouble>> direct_path_transfer(const SceneSpec& spec,
                                                       const StftConfig& cfg) {
  std::vector<std::vector<cdouble>> c;
  for (const auto& h : direct_rirs(spec, cfg.sample_rate)) {
    c.push_back(transfer_at_bins(h, cfg.frame_len));
  }
  return c;
}

TrainingScene transfer_domain_scene(const SceneSpec& spec,
                                    std::span<const double> speech,
                                    const StftConfig& cfg,
                                    const HeadModel& head) {
  const ComplexPlane s = stft(speech, cfg);
  const auto c = direct_path_transfer(spec, cfg);
  std::vector<ComplexPlane> channels;
  for (const auto& cm : c) {
    ComplexPlane x(s.rows(), s.cols());
    for (Eigen::Index t = 0; t < s.cols(); ++t) {
      for (Eigen::Index f = 0; f < s.rows(); ++f) x(f, t) = cm[f] * s(f, t);
    }
    channels.push_back(std::move(x));
  }
  return {MultiChannelSpectrogram(std::move(channels), cfg),
          apply_hrtf(s, hrtf_for_azimuth(spec.target.azimuth_deg, cfg, head),
                     cfg)};
}

std::vector<double> synthetic_speech(std::uint64_t seed, std::size_t samples,
                                     int sample_rate) {
  require(sample_rate > 0, "synthetic_speech: sample rate must be positive");
  Rng rng(seed);
  const double fs = sample_rate;
  std::vector<double> out(samples, 0.0);
  const double f0_base = rng.uniform(100.0, 220.0);
  double phase = 0.0;
  std::size_t n = 0;
  double lp = 0.0;
  while (n < samples) {
    // One syllable: a voiced nucleus, sometimes preceded by a fricative,
    // followed by a short pause.
    const auto voiced = static_cast<std::size_t>(rng.uniform(0.12, 0.28) * fs);
    const auto fricative =
        rng.uniform() < 0.4 ? static_cast<std::size_t>(rng.uniform(0.03, 0.08) * fs) : 0;
    const auto pause = static_cast<std::size_t>(rng.uniform(0.03, 0.12) * fs);
    for (std::size_t k = 0; k < fricative && n < samples; ++k, ++n) {
      const double env = std::sin(kPi * (k + 0.5) / fricative);
      const double w = rng.normal();
      out[n] = 0.15 * env * (w - lp);  // first difference tilts toward high f
      lp = w;
    }
    const double glide = rng.uniform(-0.25, 0.25);
    const double formant = rng.uniform(400.0, 900.0);
    for (std::size_t k = 0; k < voiced && n < samples; ++k, ++n) {
      const double u = (k + 0.5) / voiced;
      const double env = std::sin(kPi * u);
      const double f0 = f0_base * (1.0 + glide * (u - 0.5)) *
                        (1.0 + 0.02 * std::sin(2.0 * kPi * 5.0 * n / fs));
      phase += 2.0 * kPi * f0 / fs;
      double v = 0.0;
      for (int h = 1; h * f0 < 0.45 * fs && h <= 40; ++h) {
        const double fh = h * f0;
        const double shape = 1.0 / (1.0 + std::pow((fh - formant) / 600.0, 2.0));
        v += shape / h * std::sin(h * phase);
      }
      out[n] = 0.5 * env * v + 0.01 * env * rng.normal();
    }
    for (std::size_t k = 0; k < pause && n < samples; ++k, ++n) {
      out[n] = 1e-3 * rng.normal();
    }
  }
  normalize_peak(out, 0.5);
  return out;
}

std::vector<double> synthetic_noise(std::uint64_t seed, std::size_t samples,
                                    int sample_rate) {
  require(sample_rate > 0, "synthetic_noise: sample rate must be positive");
  Rng rng(seed);
  std::vector<double> out(samples);
  // Mixture of white noise and two leaky integrators (fan/HVAC-like tilt).
  const double a1 = std::exp(-2.0 * kPi * 200.0 / sample_rate);
  const double a2 = std::exp(-2.0 * kPi * 1500.0 / sample_rate);
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t n = 0; n < samples; ++n) {
    const double w = rng.normal();
    s1 = a1 * s1 + (1.0 - a1) * w;
    s2 = a2 * s2 + (1.0 - a2) * w;
    out[n] = 4.0 * s1 + 1.5 * s2 + 0.2 * w;
  }
  normalize_peak(out, 0.5);
  return out;
}

}  // namespace bw
