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

#include "bw/baselines.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bw/error.hpp"
#include "bw/fft.hpp"

namespace bw {
namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

SteeringVector steering_from_rirs(const std::vector<std::vector<double>>& rirs,
                                  const StftConfig& cfg) {
  cfg.validate();
  require(!rirs.empty(), "steering: no rirs");
  std::vector<std::vector<cdouble>> h;
  for (const auto& r : rirs) h.push_back(transfer_at_bins(r, cfg.frame_len));
  SteeringVector s;
  const int bins = cfg.num_bins();
  const int mics = static_cast<int>(rirs.size());
  for (int f = 0; f < bins; ++f) {
    if (h[0][f] == cdouble(0.0, 0.0)) {
      throw Error("steering: reference transfer vanishes at bin " +
                  std::to_string(f));
    }
    Eigen::VectorXcd d(mics);
    d(0) = 1.0;
    for (int m = 1; m < mics; ++m) d(m) = h[m][f] / h[0][f];
    s.d.push_back(std::move(d));
    s.reference.push_back(h[0][f]);
  }
  return s;
}

SteeringVector steering_far_field(const ArrayGeometry& array,
                                  double azimuth_deg, const StftConfig& cfg,
                                  double speed_of_sound) {
  cfg.validate();
  require(array.num_mics() >= 1, "steering: empty array");
  const double az = azimuth_deg * kPi / 180.0;
  const Vec3 u{std::cos(az), std::sin(az), 0.0};
  std::vector<double> delay(array.num_mics());
  for (int m = 0; m < array.num_mics(); ++m) {
    const Vec3& p = array.mic_offsets[m];
    delay[m] = -(u.x * p.x + u.y * p.y + u.z * p.z) / speed_of_sound;
  }
  SteeringVector s;
  for (int f = 0; f < cfg.num_bins(); ++f) {
    const double omega =
        2.0 * kPi * f * cfg.sample_rate / static_cast<double>(cfg.frame_len);
    Eigen::VectorXcd d(array.num_mics());
    d(0) = 1.0;
    for (int m = 1; m < array.num_mics(); ++m) {
      d(m) = std::polar(1.0, -omega * (delay[m] - delay[0]));
    }
    s.d.push_back(std::move(d));
    s.reference.emplace_back(1.0, 0.0);
  }
  return s;
}

NoiseCovariance estimate_noise_covariance(const MultiChannelSpectrogram& noise,
                                          double loading) {
  const int mics = noise.num_channels();
  const int frames = noise.num_frames();
  require(loading >= 0, "noise covariance: loading must be non-negative");
  if (frames < mics) {
    throw Error("rank-deficient estimate: " + std::to_string(frames) +
                " frames for " + std::to_string(mics) + " channels");
  }
  NoiseCovariance out;
  out.loading = loading;
  for (int f = 0; f < noise.num_bins(); ++f) {
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(mics, mics);
    for (int t = 0; t < frames; ++t) {
      const Eigen::VectorXcd x = noise.bin(f, t);
      r.noalias() += x * x.adjoint();
    }
    r /= static_cast<double>(frames);
    const double trace = r.trace().real();
    if (trace == 0.0) {
      r = Eigen::MatrixXcd::Identity(mics, mics);
    } else {
      r.diagonal().array() += loading * trace / mics;
    }
    out.r.push_back(std::move(r));
  }
  return out;
}

Eigen::VectorXcd mvdr_weights(const Eigen::VectorXcd& d,
                              const Eigen::MatrixXcd& r) {
  require(r.rows() == d.size() && r.cols() == d.size(),
          "mvdr: covariance and steering sizes differ");
  require(d.norm() > 0.0, "mvdr: zero steering vector");
  Eigen::LLT<Eigen::MatrixXcd> llt(r);
  if (llt.info() != Eigen::Success) {
    throw Error("mvdr: covariance is singular or not positive definite");
  }
  const Eigen::VectorXcd rd = llt.solve(d);
  const cdouble denom = d.dot(rd);  // d^H R^-1 d
  if (!(std::abs(denom) > 0.0) || !std::isfinite(std::abs(denom))) {
    throw Error("mvdr: degenerate distortionless constraint");
  }
  return rd / denom;
}

std::vector<Eigen::VectorXcd> mvdr_weights(const SteeringVector& d,
                                           const NoiseCovariance& r) {
  require(d.d.size() == r.r.size(), "mvdr: bin count mismatch");
  std::vector<Eigen::VectorXcd> w;
  w.reserve(d.d.size());
  for (std::size_t f = 0; f < d.d.size(); ++f) {
    w.push_back(mvdr_weights(d.d[f], r.r[f]));
  }
  return w;
}

ComplexPlane beamform(const MultiChannelSpectrogram& capture,
                      const std::vector<Eigen::VectorXcd>& weights) {
  require(static_cast<int>(weights.size()) == capture.num_bins(),
          "beamform: bin count mismatch");
  ComplexPlane out(capture.num_bins(), capture.num_frames());
  for (int f = 0; f < capture.num_bins(); ++f) {
    require(weights[f].size() == capture.num_channels(),
            "beamform: channel count mismatch");
    for (int t = 0; t < capture.num_frames(); ++t) {
      cdouble acc = 0.0;
      for (int m = 0; m < capture.num_channels(); ++m) {
        acc += std::conj(weights[f](m)) * capture.channel(m)(f, t);
      }
      out(f, t) = acc;
    }
  }
  return out;
}

BinauralSpectrogram lbh_mvdr(const MultiChannelSpectrogram& capture,
                             double oracle_azimuth_deg,
                             const SteeringVector& oracle_steering,
                             const MultiChannelSpectrogram& noise_ref,
                             const StftConfig& cfg, const HeadModel& head) {
  require(capture.config() == cfg, "lbh_mvdr: capture config mismatch");
  require(noise_ref.num_channels() == capture.num_channels(),
          "lbh_mvdr: noise reference channel count mismatch");
  require(oracle_steering.num_bins() == capture.num_bins(),
          "lbh_mvdr: steering bin count mismatch");
  const auto w = mvdr_weights(oracle_steering,
                              estimate_noise_covariance(noise_ref));
  ComplexPlane mono = beamform(capture, w);
  for (int f = 0; f < mono.rows(); ++f) {
    const cdouble ref = oracle_steering.reference.empty()
                            ? cdouble(1.0, 0.0)
                            : oracle_steering.reference[f];
    mono.row(f) /= ref;
  }
  return apply_hrtf(mono, hrtf_for_azimuth(oracle_azimuth_deg, cfg, head), cfg);
}

int mint_min_filter_len(int num_mics, int rir_len) {
  require(num_mics >= 2, "MINT condition violated: needs at least 2 channels");
  return std::max(1, (rir_len - 1 + num_mics - 2) / (num_mics - 1));
}

MintResult mint_inverse_filters(const std::vector<std::vector<double>>& rirs,
                                int filter_len, int delay,
                                double regularization) {
  const int mics = static_cast<int>(rirs.size());
  if (mics < 2) {
    throw Error("MINT condition violated: needs at least 2 channels");
  }
  const int rir_len = static_cast<int>(rirs[0].size());
  for (const auto& h : rirs) {
    require(static_cast<int>(h.size()) == rir_len && rir_len > 0,
            "mint: rirs must share a non-zero length");
  }
  require(filter_len > 0, "mint: filter_len must be positive");
  const int rows = rir_len + filter_len - 1;
  const int cols = mics * filter_len;
  if (cols < rows) {
    throw Error("MINT condition violated: " + std::to_string(mics) + " x " +
                std::to_string(filter_len) + " < " + std::to_string(rows));
  }
  if (delay < 0) delay = filter_len / 2;
  require(delay < rows, "mint: delay beyond equalized response length");

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(rows, cols);
  for (int m = 0; m < mics; ++m) {
    for (int j = 0; j < filter_len; ++j) {
      for (int i = 0; i < rir_len; ++i) h(i + j, m * filter_len + j) = rirs[m][i];
    }
  }
  // Minimum-norm solution g = H^T (H H^T + lambda I)^-1 e_delay.
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(rows, rows);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(h);
  gram = gram.selfadjointView<Eigen::Lower>();
  const double lambda = regularization * gram.trace() / rows;
  gram.diagonal().array() += lambda;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(rows);
  e(delay) = 1.0;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success) throw Error("mint: gram solve failed");
  const Eigen::VectorXd g = h.transpose() * ldlt.solve(e);
  const Eigen::VectorXd eq = h * g;

  MintResult out;
  out.delay = delay;
  out.filters.assign(mics, std::vector<double>(filter_len));
  for (int m = 0; m < mics; ++m) {
    for (int j = 0; j < filter_len; ++j) out.filters[m][j] = g(m * filter_len + j);
  }
  out.equalized.assign(eq.data(), eq.data() + eq.size());
  out.residual = (eq - e).norm();
  if (!std::isfinite(out.residual)) throw Error("mint: non-finite solution");
  return out;
}

MifResult mif_dereverberate(const std::vector<std::vector<double>>& capture,
                            const std::vector<std::vector<double>>& rirs,
                            const MifOptions& options) {
  require(capture.size() == rirs.size(), "mif: capture/rir channel mismatch");
  require(!capture.empty(), "mif: empty capture");
  std::vector<std::vector<double>> truncated;
  for (const auto& h : rirs) {
    const std::size_t n =
        options.rir_len > 0 ? std::min<std::size_t>(h.size(), options.rir_len)
                            : h.size();
    truncated.emplace_back(h.begin(), h.begin() + n);
  }
  const int mics = static_cast<int>(capture.size());
  const int rir_len = static_cast<int>(truncated[0].size());
  const int filter_len = options.filter_len > 0
                             ? options.filter_len
                             : 2 * mint_min_filter_len(mics, rir_len);
  MifResult out;
  out.mint = mint_inverse_filters(truncated, filter_len, options.delay);
  const std::size_t len = capture[0].size();
  out.source.assign(len, 0.0);
  const std::size_t shift = static_cast<std::size_t>(out.mint.delay);
  for (int m = 0; m < mics; ++m) {
    require(capture[m].size() == len, "mif: capture channels differ in length");
    const auto y = convolve(capture[m], out.mint.filters[m]);
    for (std::size_t n = 0; n < len && n + shift < y.size(); ++n) {
      out.source[n] += y[n + shift];
    }
  }
  return out;
}

BinauralSpectrogram mif_pipeline(const std::vector<std::vector<double>>& capture,
                                 const std::vector<std::vector<double>>& rirs,
                                 double azimuth_deg, const StftConfig& cfg,
                                 const MifOptions& options,
                                 const HeadModel& head) {
  const MifResult r = mif_dereverberate(capture, rirs, options);
  return render_binaural(r.source, azimuth_deg, cfg, head);
}

}  // namespace bw
