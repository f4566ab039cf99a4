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

#include <vector>

#include <Eigen/Core>

#include "bw/hrtf.hpp"
#include "bw/scene.hpp"
#include "bw/signal.hpp"

namespace bw {

// Per-bin array response toward the target, normalized so that the reference
// mic (index 0) is exactly 1. `reference` holds the reference-mic transfer
// itself, used to map the beamformer output back to the dry source; it is 1
// when only relative information is known.
struct SteeringVector {
  std::vector<Eigen::VectorXcd> d;
  std::vector<cdouble> reference;

  int num_bins() const { return static_cast<int>(d.size()); }
};

// From oracle RIRs (one per mic), evaluated at the STFT bin frequencies.
SteeringVector steering_from_rirs(const std::vector<std::vector<double>>& rirs,
                                  const StftConfig& cfg);

// Far-field plane wave arriving from `azimuth_deg` in the horizontal plane.
SteeringVector steering_far_field(const ArrayGeometry& array,
                                  double azimuth_deg, const StftConfig& cfg,
                                  double speed_of_sound = kSpeedOfSound);

struct NoiseCovariance {
  std::vector<Eigen::MatrixXcd> r;  // per bin, Hermitian M x M
  double loading = 1e-3;
};

// R_f = (1/T) sum_t X X^H + loading * tr(R_f)/M * I. An all-zero estimate is
// replaced by the identity (no noise information means spatially white).
// Throws "rank-deficient estimate" when T < M.
NoiseCovariance estimate_noise_covariance(const MultiChannelSpectrogram& noise,
                                          double loading = 1e-3);

// w = R^-1 d / (d^H R^-1 d). Throws if R is not positive definite.
Eigen::VectorXcd mvdr_weights(const Eigen::VectorXcd& d,
                              const Eigen::MatrixXcd& r);
std::vector<Eigen::VectorXcd> mvdr_weights(const SteeringVector& d,
                                           const NoiseCovariance& r);

// w_f^H X_{f,t} per bin.
ComplexPlane beamform(const MultiChannelSpectrogram& capture,
                      const std::vector<Eigen::VectorXcd>& weights);

// Oracle localization, MVDR beamforming to the reference mic, division by the
// reference transfer, then HRTF rendering at the oracle azimuth.
BinauralSpectrogram lbh_mvdr(const MultiChannelSpectrogram& capture,
                             double oracle_azimuth_deg,
                             const SteeringVector& oracle_steering,
                             const MultiChannelSpectrogram& noise_ref,
                             const StftConfig& cfg,
                             const HeadModel& head = {});

struct MintResult {
  std::vector<std::vector<double>> filters;  // [mic][tap]
  std::vector<double> equalized;             // sum_m h_m * g_m
  int delay = 0;
  double residual = 0.0;  // || equalized - delta_delay ||_2
};

// Least-squares inverse filters g_m minimizing || sum_m h_m * g_m - delta ||
// (minimum-norm when underdetermined). delay < 0 selects filter_len / 2.
// Throws "MINT condition violated" when M < 2 or
// M * filter_len < rir_len + filter_len - 1.
MintResult mint_inverse_filters(const std::vector<std::vector<double>>& rirs,
                                int filter_len, int delay = -1,
                                double regularization = 1e-12);

// Smallest filter length meeting the MINT length condition.
int mint_min_filter_len(int num_mics, int rir_len);

struct MifOptions {
  int rir_len = 1024;    // oracle RIRs are truncated to this many taps
  int filter_len = -1;   // < 0: twice the minimum feasible length
  int delay = -1;        // < 0: filter_len / 2
};

struct MifResult {
  std::vector<double> source;  // dereverberated, delay-compensated estimate
  MintResult mint;
};

MifResult mif_dereverberate(const std::vector<std::vector<double>>& capture,
                            const std::vector<std::vector<double>>& rirs,
                            const MifOptions& options = {});

// Multichannel inverse filtering followed by HRTF rendering. There is no
// noise suppression stage.
BinauralSpectrogram mif_pipeline(const std::vector<std::vector<double>>& capture,
                                 const std::vector<std::vector<double>>& rirs,
                                 double azimuth_deg, const StftConfig& cfg,
                                 const MifOptions& options = {},
                                 const HeadModel& head = {});

}  // namespace bw
