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

#include "bw/signal.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bw/error.hpp"
#include "bw/fft.hpp"

namespace bw {

void StftConfig::validate() const {
  require(sample_rate > 0, "stft config: sample_rate must be positive");
  require(frame_len > 0, "stft config: frame_len must be positive");
  require(hop * 2 == frame_len,
          "stft config: sqrt-hann window requires hop * 2 == frame_len");
}

int StftConfig::num_frames(std::size_t num_samples) const {
  if (num_samples < static_cast<std::size_t>(frame_len)) return 0;
  return static_cast<int>((num_samples - frame_len) / hop) + 1;
}

std::size_t StftConfig::num_samples(int frames) const {
  if (frames <= 0) return 0;
  return static_cast<std::size_t>(frames - 1) * hop + frame_len;
}

std::pair<std::size_t, std::size_t> StftConfig::interior(int frames) const {
  if (frames < 2) return {0, 0};
  return {static_cast<std::size_t>(hop),
          static_cast<std::size_t>(frames) * hop};
}

std::vector<double> sqrt_hann(int frame_len) {
  std::vector<double> w(frame_len);
  for (int n = 0; n < frame_len; ++n) {
    const double hann =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / frame_len);
    w[n] = std::sqrt(hann);
  }
  return w;
}

ComplexPlane stft(std::span<const double> signal, const StftConfig& cfg) {
  cfg.validate();
  if (signal.size() < static_cast<std::size_t>(cfg.frame_len)) {
    throw Error("stft: input too short (" + std::to_string(signal.size()) +
                " samples, frame is " + std::to_string(cfg.frame_len) + ")");
  }
  const int frames = cfg.num_frames(signal.size());
  const int bins = cfg.num_bins();
  const std::vector<double> w = sqrt_hann(cfg.frame_len);
  ComplexPlane out(bins, frames);
  std::vector<double> frame(cfg.frame_len);
  std::vector<cdouble> spectrum(bins);
  for (int t = 0; t < frames; ++t) {
    const std::size_t start = static_cast<std::size_t>(t) * cfg.hop;
    for (int n = 0; n < cfg.frame_len; ++n) {
      frame[n] = w[n] * signal[start + n];
    }
    rfft(frame, spectrum);
    for (int f = 0; f < bins; ++f) out(f, t) = spectrum[f];
  }
  return out;
}

std::vector<double> istft(const ComplexPlane& spec, const StftConfig& cfg) {
  cfg.validate();
  if (spec.rows() != cfg.num_bins()) {
    throw Error("istft: spectrogram has " + std::to_string(spec.rows()) +
                " bins, config expects " + std::to_string(cfg.num_bins()));
  }
  const int frames = static_cast<int>(spec.cols());
  const int bins = cfg.num_bins();
  std::vector<double> out(cfg.num_samples(frames), 0.0);
  const std::vector<double> w = sqrt_hann(cfg.frame_len);
  std::vector<cdouble> spectrum(bins);
  std::vector<double> frame(cfg.frame_len);
  for (int t = 0; t < frames; ++t) {
    for (int f = 0; f < bins; ++f) spectrum[f] = spec(f, t);
    irfft(spectrum, frame);
    const std::size_t start = static_cast<std::size_t>(t) * cfg.hop;
    for (int n = 0; n < cfg.frame_len; ++n) out[start + n] += w[n] * frame[n];
  }
  return out;
}

double spectral_energy(const ComplexPlane& spec, const StftConfig& cfg) {
  const int bins = cfg.num_bins();
  const bool has_nyquist = cfg.frame_len % 2 == 0;
  double total = 0.0;
  for (Eigen::Index t = 0; t < spec.cols(); ++t) {
    for (int f = 0; f < bins; ++f) {
      const bool edge = f == 0 || (has_nyquist && f == bins - 1);
      total += (edge ? 1.0 : 2.0) * std::norm(spec(f, t));
    }
  }
  return total / cfg.frame_len;
}

MultiChannelSpectrogram::MultiChannelSpectrogram(
    std::vector<ComplexPlane> channels, StftConfig cfg)
    : channels_(std::move(channels)), config_(cfg) {
  require(!channels_.empty(), "multichannel spectrogram: needs >= 1 channel");
  for (const auto& c : channels_) {
    require(c.rows() == channels_[0].rows() && c.cols() == channels_[0].cols(),
            "multichannel spectrogram: channels disagree in shape");
  }
  require(channels_[0].rows() == config_.num_bins(),
          "multichannel spectrogram: bin count does not match config");
}

MultiChannelSpectrogram MultiChannelSpectrogram::from_signals(
    const std::vector<std::vector<double>>& signals, const StftConfig& cfg) {
  std::vector<ComplexPlane> ch;
  ch.reserve(signals.size());
  for (const auto& s : signals) ch.push_back(stft(s, cfg));
  return MultiChannelSpectrogram(std::move(ch), cfg);
}

int MultiChannelSpectrogram::num_bins() const {
  return channels_.empty() ? 0 : static_cast<int>(channels_[0].rows());
}

int MultiChannelSpectrogram::num_frames() const {
  return channels_.empty() ? 0 : static_cast<int>(channels_[0].cols());
}

Eigen::VectorXcd MultiChannelSpectrogram::bin(int f, int t) const {
  Eigen::VectorXcd x(num_channels());
  for (int m = 0; m < num_channels(); ++m) x(m) = channels_[m](f, t);
  return x;
}

BinauralSpectrogram::BinauralSpectrogram(ComplexPlane l, ComplexPlane r,
                                         StftConfig cfg)
    : left(std::move(l)), right(std::move(r)), config(cfg) {
  require(left.rows() == right.rows() && left.cols() == right.cols(),
          "binaural spectrogram: left and right differ in shape");
}

std::vector<std::vector<double>> BinauralSpectrogram::to_time() const {
  return {istft(left, config), istft(right, config)};
}

BinauralSpectrogram BinauralSpectrogram::from_time(
    std::span<const double> left, std::span<const double> right,
    const StftConfig& cfg) {
  return {stft(left, cfg), stft(right, cfg), cfg};
}

void require_same_shape(const BinauralSpectrogram& a,
                        const BinauralSpectrogram& b) {
  if (a.left.rows() != b.left.rows() || a.left.cols() != b.left.cols()) {
    throw Error("shape mismatch: " + std::to_string(a.left.rows()) + "x" +
                std::to_string(a.left.cols()) + " vs " +
                std::to_string(b.left.rows()) + "x" +
                std::to_string(b.left.cols()));
  }
}

}  // namespace bw
