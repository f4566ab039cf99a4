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
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "bw/baselines.hpp"
#include "bw/scene.hpp"
#include "bw/signal.hpp"
#include "bw/trainer.hpp"
#include "json.hpp"

namespace bw {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

namespace fs = std::filesystem;

// Runs fn(0..count-1) on up to `jobs` threads. Exceptions are collected and
// the one from the lowest index is rethrown.
void parallel_for(int count, int jobs, const std::function<void(int)>& fn);

// Expands directories into their *.wav files (sorted) and keeps files as-is.
std::vector<fs::path> expand_wav_pool(const std::vector<fs::path>& entries);

struct SimulateOptions {
  SamplingRanges ranges;
  StftConfig stft;
  int count = 1;
  std::uint64_t seed = 0;
  fs::path out_dir;
  std::vector<fs::path> speech_pool;
  std::vector<fs::path> noise_pool;
  // Generate speech/noise from the scene seed instead of reading pools.
  bool synthetic = false;
  double synthetic_seconds = 2.0;
  int max_order = -1;
  int jobs = 1;
  bool export_rirs = false;
};

std::string scene_id(int index);

// Writes out_dir/scene_XXXXX/{manifest.json, capture.wav, target.wav,
// speech.wav, clean_image.wav, noise_image.wav} per scene and out_dir/run.json.
// Returns the scene ids in order.
std::vector<std::string> simulate_dataset(const SimulateOptions& options);

struct SceneFiles {
  fs::path dir;
  nlohmann::json manifest;
  SceneSpec spec;
  StftConfig stft;
  int max_order = -1;
  std::string id;
};

SceneFiles load_scene(const fs::path& manifest_path);
// Scene manifests directly below `dataset_dir`, sorted by directory name.
std::vector<fs::path> dataset_manifests(const fs::path& dataset_dir);

enum class BaselineMethod { kLbhMvdr, kMif };
BaselineMethod parse_baseline_method(const std::string& name);
std::string to_string(BaselineMethod m);

struct BaselineOptions {
  BaselineMethod method = BaselineMethod::kLbhMvdr;
  MifOptions mif;
  int jobs = 1;
};

// Writes out_dir/<scene_id>/{estimate.wav, metrics.json}; returns the metrics
// json of the scene.
nlohmann::json run_baseline(const fs::path& manifest_path, const fs::path& out_dir,
                            const BaselineOptions& options);
// Runs every scene of a dataset and writes out_dir/run.json.
std::vector<nlohmann::json> run_baseline_dataset(const fs::path& dataset_dir,
                                                 const fs::path& out_dir,
                                                 const BaselineOptions& options);

// Nearest of the nominal {0, 10, 20, 30} dB buckets.
int snr_bucket(double snr_db);

// Compares est_dir/<id>/estimate.wav (falling back to target.wav) with
// ref_dir/<id>/target.wav for every scene in ref_dir. Writes metrics.csv and
// summary.json into out_dir and returns the summary.
nlohmann::json evaluate_dirs(const fs::path& est_dir, const fs::path& ref_dir,
                             const fs::path& out_dir, int jobs = 1);

// Single pair of stereo WAVs.
nlohmann::json evaluate_files(const fs::path& est_wav, const fs::path& ref_wav,
                              const StftConfig& cfg = {});

struct TrainToyOptions {
  TrainConfig train;
  // Build the noise-free STFT-domain capture from the scene geometry and
  // speech.wav instead of reading capture.wav.
  bool transfer_domain = false;
};

// Writes filters.json, loss_curve.csv, metrics.json and run.json into out_dir.
TrainResult run_train_toy(const fs::path& manifest_path, const fs::path& out_dir,
                          const TrainToyOptions& options);

// Writes a RunManifest (tool version, subcommand, resolved config, output
// fingerprints) to out_dir/run.json. `outputs` are paths relative to out_dir.
void write_run_manifest(const fs::path& out_dir, const std::string& subcommand,
                        const nlohmann::json& config,
                        const std::vector<fs::path>& inputs,
                        const std::vector<fs::path>& outputs);

nlohmann::json to_json(const StftConfig& cfg);
StftConfig stft_from_json(const nlohmann::json& j);

// Writes pretty-printed JSON with a trailing newline, atomically.
void write_json(const fs::path& path, const nlohmann::json& j);
nlohmann::json read_json(const fs::path& path);

}  // namespace bw
