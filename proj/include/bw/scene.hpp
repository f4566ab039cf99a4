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
#include <string>
#include <vector>

#include "json.hpp"

namespace bw {

inline constexpr double kSpeedOfSound = 343.0;

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double norm() const;
  bool operator==(const Vec3&) const = default;
};

double distance(const Vec3& a, const Vec3& b);

struct ArrayGeometry {
  std::string layout = "uca";
  double diameter = 0.08;
  // Offsets from the array center, in meters.
  std::vector<Vec3> mic_offsets;

  int num_mics() const { return static_cast<int>(mic_offsets.size()); }
  std::vector<Vec3> positions(const Vec3& center) const;

  // Mics equally spaced on a horizontal circle, mic 0 on the +x axis.
  static ArrayGeometry uniform_circular(int num_mics = 6,
                                        double diameter = 0.08);
};

struct RoomSpec {
  double length = 5.0;  // x extent
  double width = 4.0;   // y extent
  double height = 3.0;  // z extent
  double rt60 = 0.3;
  // Uniform pressure reflection coefficient of all six surfaces, derived from
  // rt60 through the Eyring relation.
  double reflection = 0.0;

  double volume() const { return length * width * height; }
  double surface() const {
    return 2.0 * (length * width + length * height + width * height);
  }
  bool contains(const Vec3& p) const;
  // Smallest distance from p to any of the six surfaces.
  double wall_clearance(const Vec3& p) const;
};

// Eyring reverberation time for a uniform reflection coefficient.
double eyring_rt60(const RoomSpec& room, double reflection);
// Inverse of eyring_rt60 for the room's geometry. Throws when rt60 <= 0 or
// the required absorption reaches 1.
double rt60_to_reflection(double rt60, const RoomSpec& room);

struct SourcePlacement {
  // Counter-clockwise from the array look direction (+x); positive = left.
  double azimuth_deg = 0.0;
  double distance_m = 1.0;
  Vec3 position;
  std::string wav;
};

struct SceneSpec {
  std::uint64_t seed = 0;
  RoomSpec room;
  ArrayGeometry array = ArrayGeometry::uniform_circular();
  Vec3 array_center;
  SourcePlacement target;
  std::vector<SourcePlacement> noises;
  double snr_db = 20.0;
};

struct Range {
  double min = 0.0;
  double max = 0.0;
  bool contains(double v) const { return v >= min && v <= max; }
};

struct SamplingRanges {
  Range room_length{3.0, 10.0};
  Range room_width{3.0, 10.0};
  Range room_height{2.5, 4.0};
  Range rt60{0.2, 0.7};
  Range target_azimuth{-90.0, 90.0};
  Range target_distance{0.5, 2.0};
  Range noise_azimuth{-90.0, 90.0};
  Range noise_distance{0.5, 2.0};
  Range snr_db{0.0, 30.0};
  int min_noises = 1;
  int max_noises = 3;
  double wall_margin = 1.0;
  double source_height = 1.5;
  int max_retries = 1000;

  void validate() const;
};

// Draws one scene. Deterministic in (seed, ranges); retries infeasible draws
// up to ranges.max_retries times before throwing "infeasible geometry".
SceneSpec sample_scene(std::uint64_t seed, const SamplingRanges& ranges = {});

// Lists every constraint the scene breaks; empty when valid.
std::vector<std::string> validate_scene(const SceneSpec& scene,
                                        const SamplingRanges& ranges = {});

struct ImageSource {
  Vec3 position;
  int order = 0;  // number of wall reflections
  double distance = 0.0;
  double gain = 0.0;  // reflection^order / (4 pi distance)
};

std::vector<ImageSource> enumerate_images(const RoomSpec& room,
                                          const Vec3& src, const Vec3& mic,
                                          int max_order);

// Smallest order whose images are >= 60 dB down from the direct path by
// reflection loss alone, capped at 30.
int default_max_order(double reflection);

inline constexpr int kSincHalfWidth = 40;  // 81 taps

std::vector<double> image_method_rir(const RoomSpec& room, const Vec3& src,
                                     const Vec3& mic, int max_order,
                                     double sample_rate);

struct RirSet {
  int sample_rate = 16000;
  // h[mic][source]; source 0 is the target, 1.. are noises in scene order.
  std::vector<std::vector<std::vector<double>>> h;

  int num_mics() const { return static_cast<int>(h.size()); }
  int num_sources() const { return h.empty() ? 0 : static_cast<int>(h[0].size()); }
  std::vector<std::vector<double>> source_column(int src) const;
};

// max_order < 0 selects default_max_order(scene.room.reflection).
RirSet compute_rirs(const SceneSpec& scene, int sample_rate,
                    int max_order = -1);

struct MixResult {
  std::vector<std::vector<double>> capture;      // [mic][n]
  std::vector<std::vector<double>> clean_image;  // reverberant target
  std::vector<std::vector<double>> noise_image;  // scaled noise sum
  double noise_gain = 0.0;
};

// Convolves the target and noises with their RIRs and scales the noise sum so
// that the mic-0 energy ratio clean_image / noise_image equals scene.snr_db.
// Output length equals speech.size(); noise signals are tiled or truncated.
MixResult mix_scene(const SceneSpec& scene, const RirSet& rirs,
                    std::span<const double> speech,
                    const std::vector<std::vector<double>>& noises);

nlohmann::json to_json(const SceneSpec& scene);
SceneSpec scene_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SamplingRanges& r);
SamplingRanges ranges_from_json(const nlohmann::json& j);

}  // namespace bw
