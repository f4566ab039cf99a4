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

#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include "bw/signal.hpp"

namespace bw {

enum class ShadowPhase {
  // |H(w, theta)| only; interaural delay comes entirely from the Woodworth
  // term.
  kZeroPhase,
  // Complex first-order filter; adds low-frequency group delay on top of
  // Woodworth.
  kMinimumPhase,
};

struct HeadModel {
  double head_radius = 0.0875;
  double speed_of_sound = 343.0;
  ShadowPhase shadow = ShadowPhase::kZeroPhase;
};

struct HrtfFilter {
  std::vector<cdouble> left;
  std::vector<cdouble> right;
  double azimuth_deg = 0.0;
  HeadModel model;
};

// Lateral angle in radians, folded into [-pi/2, pi/2] (front/back symmetric).
double lateral_angle(double azimuth_deg);

// Signed Woodworth ITD in seconds, (a/c)(theta + sin theta); positive when
// the source is on the left and the left ear leads.
double woodworth_itd(double azimuth_deg, const HeadModel& model = {});

// Spherical-head response at the STFT bin frequencies. Ears sit at +-90 deg,
// positive azimuth is to the left. Each ear receives half the ITD as a linear
// phase (left advanced, right delayed for positive azimuth) and the head-shadow
// filter (1 + j alpha w / 2w0) / (1 + j w / 2w0), w0 = c / a,
// alpha = 1 + cos(angle between source and ear axis).
HrtfFilter hrtf_for_azimuth(double azimuth_deg, const StftConfig& cfg,
                            const HeadModel& model = {});

// Y^{l|r}_{f,t} = a^{l|r}_f S_{f,t}.
BinauralSpectrogram apply_hrtf(const ComplexPlane& mono,
                               const HrtfFilter& hrtf, const StftConfig& cfg);

BinauralSpectrogram render_binaural(std::span<const double> clean_speech,
                                    double azimuth_deg, const StftConfig& cfg,
                                    const HeadModel& model = {});

// Measured HRIRs: a directory of stereo WAVs named by integer azimuth
// ("-30.wav", "0.wav", "45.wav", ...). Lookups take the nearest azimuth.
class HrirSet {
 public:
  static HrirSet load(const std::filesystem::path& dir, int sample_rate);

  bool empty() const { return irs_.empty(); }
  std::vector<int> azimuths() const;
  HrtfFilter filter_for(double azimuth_deg, const StftConfig& cfg) const;

 private:
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> irs_;
};

}  // namespace bw
