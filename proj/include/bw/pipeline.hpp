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

#include <cstdint>
#include <span>
#include <vector>

#include "bw/baselines.hpp"
#include "bw/hrtf.hpp"
#include "bw/scene.hpp"
#include "bw/signal.hpp"
#include "bw/trainer.hpp"

namespace bw {

// One simulated scene: RIRs, the M-channel mixture and the binaural target
// a_f S rendered from the dry speech at the target azimuth.
struct SceneRealization {
  SceneSpec spec;
  RirSet rirs;
  MixResult mix;
  BinauralSpectrogram target;
};

SceneRealization realize_scene(const SceneSpec& spec,
                               std::span<const double> speech,
                               const std::vector<std::vector<double>>& noises,
                               const StftConfig& cfg, int max_order = -1,
                               const HeadModel& head = {});

// LBH-MVDR with oracle information from the scene: the capture and noise
// image are advanced by the integer direct-path delay to mic 0, the steering
// vector comes from the direct-path RIRs and the noise covariance from the
// noise image.
BinauralSpectrogram run_lbh_mvdr(
    const SceneSpec& spec, const std::vector<std::vector<double>>& capture,
    const std::vector<std::vector<double>>& noise_image, const StftConfig& cfg,
    const HeadModel& head = {});

// MIF with the scene's oracle target RIRs.
BinauralSpectrogram run_mif(const SceneSpec& spec,
                            const std::vector<std::vector<double>>& capture,
                            const StftConfig& cfg, const MifOptions& options = {},
                            int max_order = -1, const HeadModel& head = {});

// Anechoic transfer c[m][f] from the target to each mic (direct path only).
std::vector<std::vector<cdouble>> direct_path_transfer(const SceneSpec& spec,
                                                       const StftConfig& cfg);

// Noise-free capture synthesized in the STFT domain, X_{f,t} = c_f S_{f,t},
// together with the target a_f S_{f,t}. The oracle filter reproduces the
// target exactly on this scene.
TrainingScene transfer_domain_scene(const SceneSpec& spec,
                                    std::span<const double> speech,
                                    const StftConfig& cfg,
                                    const HeadModel& head = {});

// Deterministic stand-ins for recorded material: a voiced/unvoiced
// syllable-rate signal with a wandering pitch, and low-pass tilted noise.
std::vector<double> synthetic_speech(std::uint64_t seed, std::size_t samples,
                                     int sample_rate);
std::vector<double> synthetic_noise(std::uint64_t seed, std::size_t samples,
                                    int sample_rate);

// Advances every channel by `samples`, zero-filling the tail.
std::vector<std::vector<double>> advance(
    const std::vector<std::vector<double>>& x, std::size_t samples);

}  // namespace bw
