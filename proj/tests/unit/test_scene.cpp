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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "bw/error.hpp"
#include "bw/scene.hpp"
#include "doctest.h"

using namespace bw;

namespace {

// Re-derives the sampling constraints from the scene fields alone.
std::vector<std::string> audit(const SceneSpec& s) {
  std::vector<std::string> bad;
  auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
  if (!in(s.room.length, 3.0, 10.0)) bad.push_back("length");
  if (!in(s.room.width, 3.0, 10.0)) bad.push_back("width");
  if (!in(s.room.height, 2.5, 4.0)) bad.push_back("height");
  if (!in(s.room.rt60, 0.2, 0.7)) bad.push_back("rt60");
  if (!in(s.snr_db, 0.0, 30.0)) bad.push_back("snr");
  if (s.noises.size() < 1 || s.noises.size() > 3) bad.push_back("noise count");
  auto clear = [&](const Vec3& p) {
    return std::min({p.x, s.room.length - p.x, p.y, s.room.width - p.y, p.z,
                     s.room.height - p.z});
  };
  if (clear(s.array_center) < 1.0 - 1e-12) bad.push_back("array margin");
  if (s.array.num_mics() != 6) bad.push_back("mics");
  for (int m = 0; m < s.array.num_mics(); ++m) {
    const auto& o = s.array.mic_offsets[m];
    if (std::abs(std::hypot(o.x, o.y) - 0.04) > 1e-12 || o.z != 0.0) bad.push_back("uca radius");
    const double ang = std::atan2(o.y, o.x);
    const double expect = 2.0 * std::numbers::pi * m / 6.0;
    if (std::abs(std::remainder(ang - expect, 2.0 * std::numbers::pi)) > 1e-9) bad.push_back("uca angle");
  }
  std::vector<const SourcePlacement*> src{&s.target};
  for (const auto& n : s.noises) src.push_back(&n);
  for (const auto* p : src) {
    if (!in(p->azimuth_deg, -90.0, 90.0)) bad.push_back("azimuth");
    if (!in(p->distance_m, 0.5, 2.0)) bad.push_back("distance");
    const double a = p->azimuth_deg * std::numbers::pi / 180.0;
    const Vec3 expect{s.array_center.x + p->distance_m * std::cos(a),
                      s.array_center.y + p->distance_m * std::sin(a), 1.5};
    if (std::abs(p->position.x - expect.x) > 1e-9 ||
        std::abs(p->position.y - expect.y) > 1e-9 ||
        std::abs(p->position.z - expect.z) > 1e-12) {
      bad.push_back("position");
    }
    if (clear(p->position) < 1.0 - 1e-12) bad.push_back("source margin");
  }
  if (s.array_center.z != 1.5) bad.push_back("array height");
  return bad;
}

}  // namespace

TEST_CASE("uniform circular array geometry") {
  const auto a = ArrayGeometry::uniform_circular();
  REQUIRE(a.num_mics() == 6);
  CHECK(a.mic_offsets[0].x == doctest::Approx(0.04));
  CHECK(a.mic_offsets[0].y == 0.0);
  CHECK(a.mic_offsets[3].x == doctest::Approx(-0.04));
}

TEST_CASE("eyring relation round trip and closed form") {
  RoomSpec room{6.0, 4.0, 3.0, 0.5, 0.0};
  const double beta = rt60_to_reflection(0.5, room);
  CHECK(beta > 0.0);
  CHECK(beta < 1.0);
  CHECK(eyring_rt60(room, beta) == doctest::Approx(0.5).epsilon(1e-12));
  const double alpha = 1.0 - beta * beta;
  const double expect = 24.0 * std::log(10.0) * room.volume() /
                        (343.0 * -room.surface() * std::log(1.0 - alpha));
  CHECK(eyring_rt60(room, beta) == doctest::Approx(expect).epsilon(1e-12));
  CHECK_THROWS_AS(rt60_to_reflection(0.0, room), Error);
}

TEST_CASE("default image order reaches 60 dB of reflection loss") {
  for (double beta : {0.3, 0.7, 0.9, 0.95}) {
    int n = 0;
    while (std::pow(beta, n) > 1e-3) ++n;
    CHECK(default_max_order(beta) == std::min(n, 30));
  }
  CHECK(default_max_order(0.0) == 0);
  CHECK(default_max_order(0.999) == 30);
}

TEST_CASE("first-order images of a shoebox are the six wall mirrors") {
  RoomSpec room{4.0, 3.0, 2.5, 0.3, 0.5};
  const Vec3 src{1.0, 1.2, 1.5}, mic{2.5, 2.0, 1.2};
  const auto images = enumerate_images(room, src, mic, 1);
  REQUIRE(images.size() == 7);
  std::vector<Vec3> expect{src,
                           {-1.0, 1.2, 1.5}, {7.0, 1.2, 1.5},
                           {1.0, -1.2, 1.5}, {1.0, 4.8, 1.5},
                           {1.0, 1.2, -1.5}, {1.0, 1.2, 3.5}};
  for (const auto& e : expect) {
    const bool found = std::any_of(images.begin(), images.end(), [&](const ImageSource& im) {
      return distance(im.position, e) < 1e-12;
    });
    CHECK(found);
  }
  for (const auto& im : images) {
    const double d = distance(im.position, mic);
    CHECK(im.distance == doctest::Approx(d));
    CHECK(im.gain == doctest::Approx(std::pow(0.5, im.order) / (4.0 * std::numbers::pi * d)));
  }
  CHECK(enumerate_images(room, src, mic, 2).size() == 25);
}

TEST_CASE("anechoic rir: 1/(4 pi d) gain at the sub-sample delay") {
  RoomSpec room{10.0, 10.0, 4.0, 0.3, 0.0};
  const Vec3 mic{5.0, 5.0, 1.5}, src{6.0, 5.0, 1.5};
  const auto h = image_method_rir(room, src, mic, 0, 16000.0);
  const double delay = 16000.0 / 343.0;
  CHECK(delay == doctest::Approx(46.6472).epsilon(1e-5));
  double sum = 0.0, centroid = 0.0;
  for (std::size_t n = 0; n < h.size(); ++n) {
    sum += h[n];
    centroid += n * h[n];
  }
  CHECK(sum == doctest::Approx(1.0 / (4.0 * std::numbers::pi)).epsilon(2e-3));
  CHECK(centroid / sum == doctest::Approx(delay).epsilon(2e-3));
  const auto peak = std::max_element(h.begin(), h.end()) - h.begin();
  CHECK(peak == 47);
}

TEST_CASE("reverberant rir decays and starts with the direct path") {
  RoomSpec room{5.0, 4.0, 3.0, 0.4, 0.0};
  room.reflection = rt60_to_reflection(0.4, room);
  const Vec3 mic{2.0, 2.0, 1.5}, src{3.0, 2.5, 1.5};
  const auto h = image_method_rir(room, src, mic, default_max_order(room.reflection), 16000.0);
  const double d = distance(mic, src);
  const auto peak = std::max_element(h.begin(), h.end(), [](double a, double b) {
                      return std::abs(a) < std::abs(b);
                    }) - h.begin();
  CHECK(std::abs(peak - d * 16000.0 / 343.0) < 1.0);
  double early = 0.0, late = 0.0;
  for (std::size_t n = 0; n < h.size(); ++n) {
    (n < 1600 ? early : late) += h[n] * h[n];
  }
  CHECK(early > late);
}

TEST_CASE("scene sampling obeys every range in an independent audit") {
  SamplingRanges ranges;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const SceneSpec s = sample_scene(seed, ranges);
    CHECK(audit(s).empty());
    CHECK(validate_scene(s, ranges).empty());
    CHECK(s.room.reflection == doctest::Approx(rt60_to_reflection(s.room.rt60, s.room)));
  }
}

TEST_CASE("scene sampling is deterministic and seed-sensitive") {
  const auto a = to_json(sample_scene(9)), b = to_json(sample_scene(9));
  CHECK(a == b);
  CHECK(a != to_json(sample_scene(10)));
}

TEST_CASE("scene json round trip") {
  const SceneSpec s = sample_scene(3);
  const SceneSpec t = scene_from_json(to_json(s));
  CHECK(to_json(t) == to_json(s));
  CHECK(t.target.position == s.target.position);
  const SamplingRanges r;
  CHECK(to_json(ranges_from_json(to_json(r))) == to_json(r));
}

TEST_CASE("validator flags violations") {
  SceneSpec s = sample_scene(4);
  s.room.length = 12.0;
  s.target.distance_m += 0.1;
  const auto bad = validate_scene(s);
  CHECK(bad.size() >= 2);
  SamplingRanges impossible;
  impossible.room_length = {3.0, 3.0};
  impossible.room_width = {3.0, 3.0};
  impossible.target_distance = {1.8, 2.0};
  impossible.max_retries = 50;
  CHECK_THROWS_WITH_AS(sample_scene(1, impossible), doctest::Contains("infeasible geometry"), Error);
}

TEST_CASE("mixing sets the mic-0 snr exactly") {
  SceneSpec s = sample_scene(5);
  s.snr_db = 7.5;
  const RirSet rirs = compute_rirs(s, 16000, 3);
  CHECK(rirs.num_mics() == 6);
  CHECK(rirs.num_sources() == 1 + static_cast<int>(s.noises.size()));
  std::mt19937 gen(3);
  std::normal_distribution<double> d;
  std::vector<double> speech(8000);
  for (auto& v : speech) v = d(gen);
  std::vector<std::vector<double>> noises(s.noises.size(), std::vector<double>(3000));
  for (auto& n : noises) for (auto& v : n) v = d(gen);
  const MixResult mix = mix_scene(s, rirs, speech, noises);
  REQUIRE(mix.capture.size() == 6);
  CHECK(mix.capture[0].size() == speech.size());
  double ec = 0.0, en = 0.0;
  for (std::size_t n = 0; n < speech.size(); ++n) {
    ec += mix.clean_image[0][n] * mix.clean_image[0][n];
    en += mix.noise_image[0][n] * mix.noise_image[0][n];
    CHECK(mix.capture[3][n] == doctest::Approx(mix.clean_image[3][n] + mix.noise_image[3][n]));
  }
  CHECK(10.0 * std::log10(ec / en) == doctest::Approx(7.5).epsilon(1e-9));
  std::vector<double> silent(8000, 0.0);
  CHECK_THROWS_WITH_AS(mix_scene(s, rirs, silent, noises), doctest::Contains("degenerate source"), Error);
}
