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

#include <cmath>
#include <numbers>
#include <random>

#include "bw/hrtf.hpp"
#include "bw/metrics.hpp"
#include "doctest.h"

using namespace bw;

namespace {

std::vector<double> white(std::size_t n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> d;
  std::vector<double> x(n);
  for (auto& v : x) v = d(gen);
  return x;
}

}  // namespace

TEST_CASE("woodworth itd at the interaural axis") {
  const double expect = 0.0875 / 343.0 * (std::numbers::pi / 2.0 + 1.0);
  CHECK(woodworth_itd(90.0) == doctest::Approx(expect).epsilon(1e-15));
  CHECK(woodworth_itd(90.0) * 1e3 == doctest::Approx(0.656).epsilon(1e-3));
  CHECK(woodworth_itd(0.0) == 0.0);
  CHECK(woodworth_itd(-30.0) == -woodworth_itd(30.0));
}

TEST_CASE("lateral angle folds rear azimuths onto the front") {
  CHECK(lateral_angle(0.0) == doctest::Approx(0.0));
  CHECK(lateral_angle(150.0) == doctest::Approx(30.0 * std::numbers::pi / 180.0));
  CHECK(lateral_angle(-120.0) == doctest::Approx(-60.0 * std::numbers::pi / 180.0));
}

TEST_CASE("hrtf mirror symmetry is exact") {
  StftConfig cfg;
  for (double az : {10.0, 45.0, 90.0}) {
    const auto p = hrtf_for_azimuth(az, cfg);
    const auto n = hrtf_for_azimuth(-az, cfg);
    REQUIRE(p.left.size() == 161);
    for (int f = 0; f < 161; ++f) {
      CHECK(p.left[f] == n.right[f]);
      CHECK(p.right[f] == n.left[f]);
    }
  }
  const auto c = hrtf_for_azimuth(0.0, cfg);
  for (int f = 0; f < 161; ++f) CHECK(c.left[f] == c.right[f]);
}

TEST_CASE("head shadow boosts the near ear at high frequency") {
  StftConfig cfg;
  const auto h = hrtf_for_azimuth(90.0, cfg);
  CHECK(std::abs(h.left[0]) == doctest::Approx(1.0));
  CHECK(std::abs(h.right[0]) == doctest::Approx(1.0));
  CHECK(std::abs(h.left[160]) > 1.5);
  CHECK(std::abs(h.right[160]) < 0.5);
}

TEST_CASE("rendered white noise carries the model ITD and ILD") {
  StftConfig cfg;
  const auto x = white(16000, 1);
  const auto b = render_binaural(x, 90.0, cfg);
  const auto t = b.to_time();
  CHECK(measure_itd(t[0], t[1], 16000) == doctest::Approx(0.656).epsilon(0.05));
  CHECK(measure_ild(b) > 3.0);
  const auto m = render_binaural(x, -90.0, cfg).to_time();
  CHECK(measure_itd(m[0], m[1], 16000) == doctest::Approx(-measure_itd(t[0], t[1], 16000)));
  const auto z = render_binaural(x, 0.0, cfg);
  CHECK(z.left == z.right);
}

TEST_CASE("minimum-phase shadow is available and keeps the magnitude") {
  StftConfig cfg;
  HeadModel mp;
  mp.shadow = ShadowPhase::kMinimumPhase;
  const auto a = hrtf_for_azimuth(60.0, cfg);
  const auto b = hrtf_for_azimuth(60.0, cfg, mp);
  for (int f = 0; f < 161; f += 20) {
    CHECK(std::abs(a.left[f]) == doctest::Approx(std::abs(b.left[f])));
  }
}
