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

#include "bw/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bw/error.hpp"
#include "bw/fft.hpp"
#include "bw/rng.hpp"

namespace bw {
namespace {

constexpr double kPi = std::numbers::pi;
// 24 ln(10) / c, the Sabine/Eyring constant for c = 343 m/s.
const double kEyringConstant = 24.0 * std::numbers::ln10 / kSpeedOfSound;

double energy(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

Vec3 place(const Vec3& center, double azimuth_deg, double distance_m) {
  const double az = azimuth_deg * kPi / 180.0;
  return {center.x + distance_m * std::cos(az),
          center.y + distance_m * std::sin(az), center.z};
}

nlohmann::json vec_json(const Vec3& v) { return {v.x, v.y, v.z}; }
Vec3 vec_from(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

nlohmann::json source_json(const SourcePlacement& s) {
  return {{"azimuth_deg", s.azimuth_deg},
          {"distance_m", s.distance_m},
          {"position", vec_json(s.position)},
          {"wav", s.wav}};
}

SourcePlacement source_from(const nlohmann::json& j) {
  SourcePlacement s;
  s.azimuth_deg = j.at("azimuth_deg").get<double>();
  s.distance_m = j.at("distance_m").get<double>();
  s.position = vec_from(j.at("position"));
  s.wav = j.value("wav", std::string{});
  return s;
}

nlohmann::json range_json(const Range& r) { return {r.min, r.max}; }
Range range_from(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

double Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

std::vector<Vec3> ArrayGeometry::positions(const Vec3& center) const {
  std::vector<Vec3> out;
  out.reserve(mic_offsets.size());
  for (const auto& o : mic_offsets) out.push_back(center + o);
  return out;
}

ArrayGeometry ArrayGeometry::uniform_circular(int num_mics, double diameter) {
  require(num_mics >= 1, "uca: need at least one mic");
  require(diameter > 0.0 || num_mics == 1, "uca: diameter must be positive");
  ArrayGeometry g;
  g.layout = "uca";
  g.diameter = diameter;
  const double r = diameter / 2.0;
  for (int m = 0; m < num_mics; ++m) {
    const double phi = 2.0 * kPi * m / num_mics;
    g.mic_offsets.push_back({r * std::cos(phi), r * std::sin(phi), 0.0});
  }
  return g;
}

bool RoomSpec::contains(const Vec3& p) const {
  return p.x > 0.0 && p.x < length && p.y > 0.0 && p.y < width && p.z > 0.0 &&
         p.z < height;
}

double RoomSpec::wall_clearance(const Vec3& p) const {
  return std::min({p.x, length - p.x, p.y, width - p.y, p.z, height - p.z});
}

double eyring_rt60(const RoomSpec& room, double reflection) {
  const double alpha = 1.0 - reflection * reflection;
  if (alpha >= 1.0) return 0.0;
  return kEyringConstant * room.volume() /
         (-room.surface() * std::log1p(-alpha));
}

double rt60_to_reflection(double rt60, const RoomSpec& room) {
  require(rt60 > 0.0, "rt60 must be positive");
  require(room.volume() > 0.0, "room dimensions must be positive");
  // -ln(1 - alpha) = K V / (S rt60); reflection = sqrt(1 - alpha)
  const double log_loss = kEyringConstant * room.volume() /
                          (room.surface() * rt60);
  const double reflection = std::exp(-0.5 * log_loss);
  if (!(reflection > 0.0)) {
    std::ostringstream msg;
    msg << "rt60 " << rt60 << " s unreachable for this room: required"
        << " absorption reaches 1";
    throw Error(msg.str());
  }
  return reflection;
}

void SamplingRanges::validate() const {
  for (const Range* r : {&room_length, &room_width, &room_height, &rt60,
                         &target_azimuth, &target_distance, &noise_azimuth,
                         &noise_distance, &snr_db}) {
    require(r->min <= r->max, "sampling range has min > max");
  }
  require(room_length.min > 0 && room_width.min > 0 && room_height.min > 0,
          "room ranges must be positive");
  require(rt60.min > 0, "rt60 range must be positive");
  require(target_distance.min > 0 && noise_distance.min > 0,
          "distance ranges must be positive");
  require(min_noises >= 0 && min_noises <= max_noises,
          "noise count range inconsistent");
  require(wall_margin >= 0, "wall margin must be non-negative");
  require(max_retries > 0, "max_retries must be positive");
}

SceneSpec sample_scene(std::uint64_t seed, const SamplingRanges& ranges) {
  ranges.validate();
  Rng rng(seed);
  const double margin = ranges.wall_margin;
  const ArrayGeometry array = ArrayGeometry::uniform_circular();
  // Source/array placement is retried inside a room a few times before the
  // room itself is redrawn; every draw counts against max_retries.
  constexpr int kPlacementsPerRoom = 20;
  int attempts = 0;
  while (attempts < ranges.max_retries) {
    SceneSpec s;
    s.seed = seed;
    s.array = array;
    s.room.length = rng.uniform(ranges.room_length.min, ranges.room_length.max);
    s.room.width = rng.uniform(ranges.room_width.min, ranges.room_width.max);
    s.room.height = rng.uniform(ranges.room_height.min, ranges.room_height.max);
    s.room.rt60 = rng.uniform(ranges.rt60.min, ranges.rt60.max);
    ++attempts;
    try {
      s.room.reflection = rt60_to_reflection(s.room.rt60, s.room);
    } catch (const Error&) {
      continue;
    }
    const double z = ranges.source_height;
    if (s.room.length < 2 * margin || s.room.width < 2 * margin ||
        z < margin || s.room.height - z < margin) {
      continue;
    }
    for (int p = 0; p < kPlacementsPerRoom && attempts < ranges.max_retries;
         ++p, ++attempts) {
      s.array_center = {rng.uniform(margin, s.room.length - margin),
                        rng.uniform(margin, s.room.width - margin), z};
      s.target.azimuth_deg =
          rng.uniform(ranges.target_azimuth.min, ranges.target_azimuth.max);
      s.target.distance_m =
          rng.uniform(ranges.target_distance.min, ranges.target_distance.max);
      s.target.position =
          place(s.array_center, s.target.azimuth_deg, s.target.distance_m);
      const int count = rng.integer(ranges.min_noises, ranges.max_noises);
      s.noises.assign(count, {});
      for (auto& n : s.noises) {
        n.azimuth_deg =
            rng.uniform(ranges.noise_azimuth.min, ranges.noise_azimuth.max);
        n.distance_m =
            rng.uniform(ranges.noise_distance.min, ranges.noise_distance.max);
        n.position = place(s.array_center, n.azimuth_deg, n.distance_m);
      }
      s.snr_db = rng.uniform(ranges.snr_db.min, ranges.snr_db.max);
      if (validate_scene(s, ranges).empty()) return s;
    }
  }
  throw Error("infeasible geometry: no valid scene after " +
              std::to_string(ranges.max_retries) + " attempts");
}

std::vector<std::string> validate_scene(const SceneSpec& s,
                                        const SamplingRanges& r) {
  std::vector<std::string> bad;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) bad.push_back(what);
  };
  check(r.room_length.contains(s.room.length), "room length out of range");
  check(r.room_width.contains(s.room.width), "room width out of range");
  check(r.room_height.contains(s.room.height), "room height out of range");
  check(r.rt60.contains(s.room.rt60), "rt60 out of range");
  check(s.room.reflection >= 0.0 && s.room.reflection < 1.0,
        "reflection coefficient outside [0, 1)");
  check(s.array.num_mics() >= 1, "array has no mics");
  check(s.room.wall_clearance(s.array_center) >= r.wall_margin,
        "array center closer than wall margin");
  for (const auto& m : s.array.positions(s.array_center)) {
    check(s.room.contains(m), "mic outside room");
  }
  auto check_source = [&](const SourcePlacement& p, const Range& az,
                          const Range& dist, const std::string& name) {
    check(az.contains(p.azimuth_deg), name + " azimuth out of range");
    check(dist.contains(p.distance_m), name + " distance out of range");
    check(s.room.wall_clearance(p.position) >= r.wall_margin,
          name + " closer than wall margin");
    check(std::abs(distance(p.position, s.array_center) - p.distance_m) < 1e-9,
          name + " position inconsistent with distance");
  };
  check_source(s.target, r.target_azimuth, r.target_distance, "target");
  check(static_cast<int>(s.noises.size()) >= r.min_noises &&
            static_cast<int>(s.noises.size()) <= r.max_noises,
        "noise count out of range");
  for (std::size_t i = 0; i < s.noises.size(); ++i) {
    check_source(s.noises[i], r.noise_azimuth, r.noise_distance,
                 "noise " + std::to_string(i));
  }
  check(r.snr_db.contains(s.snr_db), "snr out of range");
  return bad;
}

std::vector<ImageSource> enumerate_images(const RoomSpec& room,
                                          const Vec3& src, const Vec3& mic,
                                          int max_order) {
  require(max_order >= 0, "image method: max_order must be >= 0");
  const double dims[3] = {room.length, room.width, room.height};
  const double s[3] = {src.x, src.y, src.z};
  // Per axis: image coordinate (1 - 2q) s + 2 n L with |n - q| + |n|
  // reflections.
  struct AxisImage {
    double coord;
    int reflections;
  };
  std::vector<AxisImage> axis[3];
  for (int a = 0; a < 3; ++a) {
    for (int n = -max_order; n <= max_order; ++n) {
      for (int q = 0; q <= 1; ++q) {
        const int refl = std::abs(n - q) + std::abs(n);
        if (refl > max_order) continue;
        axis[a].push_back({(1 - 2 * q) * s[a] + 2.0 * n * dims[a], refl});
      }
    }
  }
  std::vector<ImageSource> out;
  for (const auto& ix : axis[0]) {
    for (const auto& iy : axis[1]) {
      if (ix.reflections + iy.reflections > max_order) continue;
      for (const auto& iz : axis[2]) {
        const int order = ix.reflections + iy.reflections + iz.reflections;
        if (order > max_order) continue;
        ImageSource img;
        img.position = {ix.coord, iy.coord, iz.coord};
        img.order = order;
        img.distance = distance(img.position, mic);
        img.gain = std::pow(room.reflection, order) /
                   (4.0 * kPi * img.distance);
        out.push_back(img);
      }
    }
  }
  return out;
}

int default_max_order(double reflection) {
  if (reflection <= 0.0) return 0;
  require(reflection < 1.0, "reflection coefficient must be < 1");
  const int order =
      static_cast<int>(std::ceil(3.0 / -std::log10(reflection)));
  return std::clamp(order, 0, 30);
}

std::vector<double> image_method_rir(const RoomSpec& room, const Vec3& src,
                                     const Vec3& mic, int max_order,
                                     double sample_rate) {
  require(max_order >= 0, "image method: max_order must be >= 0");
  require(sample_rate > 0, "image method: sample rate must be positive");
  require(room.contains(src) && room.contains(mic),
          "image method: source and mic must lie strictly inside the room");
  const auto images = enumerate_images(room, src, mic, max_order);
  double max_delay = 0.0;
  for (const auto& img : images) {
    max_delay = std::max(max_delay, img.distance / kSpeedOfSound * sample_rate);
  }
  const std::size_t len =
      static_cast<std::size_t>(std::ceil(max_delay)) + kSincHalfWidth + 1;
  std::vector<double> h(len, 0.0);
  // Hann-windowed sinc, window zero at +-(half width + 1).
  const double win_step = kPi / (kSincHalfWidth + 1);
  const double two_cos_step = 2.0 * std::cos(win_step);
  for (const auto& img : images) {
    if (img.gain == 0.0) continue;
    const double tau = img.distance / kSpeedOfSound * sample_rate;
    const long center = std::lround(tau);
    const long first = center - kSincHalfWidth;
    const double x0 = static_cast<double>(first) - tau;
    // sin(pi (x0 + k)) = (-1)^k sin(pi x0); window cosine by recurrence.
    const double sin0 = std::sin(kPi * x0);
    double c_prev = std::cos(win_step * (x0 - 1.0));
    double c_cur = std::cos(win_step * x0);
    for (int k = 0; k <= 2 * kSincHalfWidth; ++k) {
      const long n = first + k;
      const double x = x0 + k;
      if (n >= 0 && static_cast<std::size_t>(n) < len) {
        const double sinc =
            std::abs(x) < 1e-12 ? 1.0
                                : ((k % 2 == 0) ? sin0 : -sin0) / (kPi * x);
        h[n] += img.gain * 0.5 * (1.0 + c_cur) * sinc;
      }
      const double c_next = two_cos_step * c_cur - c_prev;
      c_prev = c_cur;
      c_cur = c_next;
    }
  }
  return h;
}

std::vector<std::vector<double>> RirSet::source_column(int src) const {
  std::vector<std::vector<double>> col;
  for (const auto& per_mic : h) col.push_back(per_mic.at(src));
  return col;
}

RirSet compute_rirs(const SceneSpec& scene, int sample_rate, int max_order) {
  const int order =
      max_order < 0 ? default_max_order(scene.room.reflection) : max_order;
  std::vector<Vec3> sources{scene.target.position};
  for (const auto& n : scene.noises) sources.push_back(n.position);
  RirSet set;
  set.sample_rate = sample_rate;
  std::size_t len = 0;
  for (const auto& mic : scene.array.positions(scene.array_center)) {
    std::vector<std::vector<double>> per_src;
    for (const auto& src : sources) {
      per_src.push_back(
          image_method_rir(scene.room, src, mic, order, sample_rate));
      len = std::max(len, per_src.back().size());
    }
    set.h.push_back(std::move(per_src));
  }
  for (auto& per_mic : set.h) {
    for (auto& h : per_mic) h.resize(len, 0.0);
  }
  return set;
}

MixResult mix_scene(const SceneSpec& scene, const RirSet& rirs,
                    std::span<const double> speech,
                    const std::vector<std::vector<double>>& noises) {
  const int mics = rirs.num_mics();
  require(mics >= 1, "mix_scene: empty rir set");
  require(rirs.num_sources() == 1 + static_cast<int>(scene.noises.size()),
          "mix_scene: rir set does not match scene sources");
  require(noises.size() == scene.noises.size(),
          "mix_scene: noise signal count does not match scene");
  if (speech.empty() || energy(speech) == 0.0) {
    throw Error("degenerate source: speech signal is silent");
  }
  for (const auto& n : noises) {
    if (n.empty() || energy(n) == 0.0) {
      throw Error("degenerate source: noise signal is silent");
    }
  }
  const std::size_t len = speech.size();
  MixResult out;
  out.clean_image.assign(mics, std::vector<double>(len, 0.0));
  out.noise_image.assign(mics, std::vector<double>(len, 0.0));
  for (int m = 0; m < mics; ++m) {
    auto y = convolve(speech, rirs.h[m][0]);
    std::copy_n(y.begin(), len, out.clean_image[m].begin());
  }
  for (std::size_t i = 0; i < noises.size(); ++i) {
    std::vector<double> tiled(len);
    for (std::size_t n = 0; n < len; ++n) {
      tiled[n] = noises[i][n % noises[i].size()];
    }
    for (int m = 0; m < mics; ++m) {
      auto y = convolve(tiled, rirs.h[m][i + 1]);
      for (std::size_t n = 0; n < len; ++n) out.noise_image[m][n] += y[n];
    }
  }
  out.capture = out.clean_image;
  if (noises.empty()) return out;
  const double target_energy = energy(out.clean_image[0]);
  const double noise_energy = energy(out.noise_image[0]);
  if (target_energy == 0.0 || noise_energy == 0.0) {
    throw Error("degenerate source: zero image energy at reference mic");
  }
  out.noise_gain = std::sqrt(target_energy /
                             (noise_energy * std::pow(10.0, scene.snr_db / 10.0)));
  for (int m = 0; m < mics; ++m) {
    for (std::size_t n = 0; n < len; ++n) {
      out.noise_image[m][n] *= out.noise_gain;
      out.capture[m][n] += out.noise_image[m][n];
    }
  }
  return out;
}

nlohmann::json to_json(const SceneSpec& s) {
  nlohmann::json mics = nlohmann::json::array();
  for (const auto& o : s.array.mic_offsets) mics.push_back(vec_json(o));
  nlohmann::json noises = nlohmann::json::array();
  for (const auto& n : s.noises) noises.push_back(source_json(n));
  return {{"seed", s.seed},
          {"room",
           {{"length", s.room.length},
            {"width", s.room.width},
            {"height", s.room.height},
            {"rt60", s.room.rt60},
            {"reflection", s.room.reflection}}},
          {"array",
           {{"layout", s.array.layout},
            {"num_mics", s.array.num_mics()},
            {"diameter", s.array.diameter},
            {"center", vec_json(s.array_center)},
            {"mic_offsets", mics}}},
          {"target", source_json(s.target)},
          {"noises", noises},
          {"snr_db", s.snr_db}};
}

SceneSpec scene_from_json(const nlohmann::json& j) {
  try {
    SceneSpec s;
    s.seed = j.at("seed").get<std::uint64_t>();
    const auto& room = j.at("room");
    s.room.length = room.at("length").get<double>();
    s.room.width = room.at("width").get<double>();
    s.room.height = room.at("height").get<double>();
    s.room.rt60 = room.at("rt60").get<double>();
    s.room.reflection = room.at("reflection").get<double>();
    const auto& arr = j.at("array");
    s.array.layout = arr.at("layout").get<std::string>();
    s.array.diameter = arr.at("diameter").get<double>();
    s.array.mic_offsets.clear();
    for (const auto& o : arr.at("mic_offsets")) {
      s.array.mic_offsets.push_back(vec_from(o));
    }
    s.array_center = vec_from(arr.at("center"));
    s.target = source_from(j.at("target"));
    for (const auto& n : j.at("noises")) s.noises.push_back(source_from(n));
    s.snr_db = j.at("snr_db").get<double>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed scene json: ") + e.what());
  }
}

nlohmann::json to_json(const SamplingRanges& r) {
  return {{"room_length", range_json(r.room_length)},
          {"room_width", range_json(r.room_width)},
          {"room_height", range_json(r.room_height)},
          {"rt60", range_json(r.rt60)},
          {"target_azimuth", range_json(r.target_azimuth)},
          {"target_distance", range_json(r.target_distance)},
          {"noise_azimuth", range_json(r.noise_azimuth)},
          {"noise_distance", range_json(r.noise_distance)},
          {"snr_db", range_json(r.snr_db)},
          {"min_noises", r.min_noises},
          {"max_noises", r.max_noises},
          {"wall_margin", r.wall_margin},
          {"source_height", r.source_height},
          {"max_retries", r.max_retries}};
}

SamplingRanges ranges_from_json(const nlohmann::json& j) {
  try {
    SamplingRanges r;
    r.room_length = range_from(j.at("room_length"));
    r.room_width = range_from(j.at("room_width"));
    r.room_height = range_from(j.at("room_height"));
    r.rt60 = range_from(j.at("rt60"));
    r.target_azimuth = range_from(j.at("target_azimuth"));
    r.target_distance = range_from(j.at("target_distance"));
    r.noise_azimuth = range_from(j.at("noise_azimuth"));
    r.noise_distance = range_from(j.at("noise_distance"));
    r.snr_db = range_from(j.at("snr_db"));
    r.min_noises = j.at("min_noises").get<int>();
    r.max_noises = j.at("max_noises").get<int>();
    r.wall_margin = j.at("wall_margin").get<double>();
    r.source_height = j.at("source_height").get<double>();
    r.max_retries = j.at("max_retries").get<int>();
    r.validate();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed ranges json: ") + e.what());
  }
}

}  // namespace bw
