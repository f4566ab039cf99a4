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

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace bw {

using cdouble = std::complex<double>;
// Complex T-F plane, rows are frequency bins and columns are frames.
using ComplexPlane = Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic>;
using RealPlane = Eigen::MatrixXd;

enum class Window { kSqrtHann };

struct StftConfig {
  int sample_rate = 16000;
  int frame_len = 320;  // 20 ms
  int hop = 160;        // 10 ms
  Window window = Window::kSqrtHann;

  // Throws if the configuration breaks the 50% overlap sqrt-Hann contract.
  void validate() const;
  int num_bins() const { return frame_len / 2 + 1; }
  // Frames produced from `num_samples` samples; tail samples that do not fill
  // a whole frame are dropped.
  int num_frames(std::size_t num_samples) const;
  // Samples produced by istft for `frames` frames.
  std::size_t num_samples(int frames) const;
  // Half-open sample range covered by two frames, where the round trip is
  // exact.
  std::pair<std::size_t, std::size_t> interior(int frames) const;

  bool operator==(const StftConfig&) const = default;
};

// Periodic square-root Hann of length `frame_len`. Shifted copies with hop
// frame_len/2 satisfy sum w^2 = 1, so the same window is used for analysis and
// synthesis with no extra normalization.
std::vector<double> sqrt_hann(int frame_len);

// One-sided STFT: forward DFT is unnormalized, inverse carries 1/N. With this
// pairing sum_t sum_n |frame energy| obeys
//   sum_n x[n]^2 (interior) = (1/N) sum_t (|X0|^2 + 2 sum_k |Xk|^2 + |X_{N/2}|^2).
ComplexPlane stft(std::span<const double> signal, const StftConfig& cfg);
std::vector<double> istft(const ComplexPlane& spec, const StftConfig& cfg);

// Energy of a one-sided spectrogram under the normalization above.
double spectral_energy(const ComplexPlane& spec, const StftConfig& cfg);

class MultiChannelSpectrogram {
 public:
  MultiChannelSpectrogram() = default;
  MultiChannelSpectrogram(std::vector<ComplexPlane> channels, StftConfig cfg);

  static MultiChannelSpectrogram from_signals(
      const std::vector<std::vector<double>>& signals, const StftConfig& cfg);

  int num_channels() const { return static_cast<int>(channels_.size()); }
  int num_bins() const;
  int num_frames() const;
  const ComplexPlane& channel(int m) const { return channels_.at(m); }
  const std::vector<ComplexPlane>& channels() const { return channels_; }
  const StftConfig& config() const { return config_; }

  // X_{f,t} as an M-vector.
  Eigen::VectorXcd bin(int f, int t) const;

 private:
  std::vector<ComplexPlane> channels_;
  StftConfig config_;
};

struct BinauralSpectrogram {
  ComplexPlane left;
  ComplexPlane right;
  StftConfig config;

  BinauralSpectrogram() = default;
  BinauralSpectrogram(ComplexPlane l, ComplexPlane r, StftConfig cfg);

  int num_bins() const { return static_cast<int>(left.rows()); }
  int num_frames() const { return static_cast<int>(left.cols()); }
  BinauralSpectrogram swapped() const { return {right, left, config}; }
  // Time-domain stereo pair via istft.
  std::vector<std::vector<double>> to_time() const;
  static BinauralSpectrogram from_time(std::span<const double> left,
                                       std::span<const double> right,
                                       const StftConfig& cfg);
};

// 20 log10((l + eps) / (r + eps)) written as a difference of logs, so that
// swapping the arguments negates the result exactly.
inline double level_difference_db(double mag_l, double mag_r, double eps) {
  return 20.0 * (std::log10(mag_l + eps) - std::log10(mag_r + eps));
}

void require_same_shape(const BinauralSpectrogram& a,
                        const BinauralSpectrogram& b);

}  // namespace bw
