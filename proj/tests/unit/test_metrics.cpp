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
#include <random>

#include "bw/error.hpp"
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

std::vector<double> delayed(const std::vector<double>& x, int k) {
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t n = k; n < x.size(); ++n) y[n] = x[n - k];
  return y;
}

}  // namespace

TEST_CASE("integer-lag itd") {
  const auto x = white(16000, 1);
  CHECK(measure_itd(x, delayed(x, 10), 16000) == doctest::Approx(0.625).epsilon(1e-6));
  CHECK(measure_itd(delayed(x, 10), x, 16000) == doctest::Approx(-0.625).epsilon(1e-6));
  CHECK(measure_itd(x, x, 16000) == 0.0);
  const std::vector<double> silent(16000, 0.0);
  CHECK_THROWS_AS(measure_itd(x, silent, 16000), Error);
}

TEST_CASE("itd negates exactly under channel swap") {
  const auto x = white(8000, 2);
  const auto y = delayed(x, 3);
  CHECK(measure_itd(x, y, 16000) == -measure_itd(y, x, 16000));
}

TEST_CASE("broadband ild of a scaled copy") {
  StftConfig cfg;
  const auto x = white(8000, 3);
  std::vector<double> half(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) half[n] = 0.5 * x[n];
  const auto b = BinauralSpectrogram::from_time(x, half, cfg);
  CHECK(measure_ild(b) == doctest::Approx(20.0 * std::log10(2.0)).epsilon(1e-9));
  CHECK(measure_ild(b.swapped()) == -measure_ild(b));
}

TEST_CASE("spectral distance of a 1 dB gain") {
  StftConfig cfg;
  const auto x = white(8000, 4), y = white(8000, 5);
  const auto t = BinauralSpectrogram::from_time(x, y, cfg);
  auto e = t;
  const double g = std::pow(10.0, 1.0 / 20.0);
  e.left *= g;
  e.right *= g;
  CHECK(spectral_distance(e, t) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(spectral_distance(t, t) == 0.0);
}

TEST_CASE("identical signals report zero on every metric") {
  StftConfig cfg;
  const auto b = render_binaural(white(16000, 6), 40.0, cfg);
  const auto r = evaluate_binaural(b, b);
  CHECK(r.delta_itd_ms == 0.0);
  CHECK(r.delta_ild_db == 0.0);
  CHECK(r.sd_db == 0.0);
}

TEST_CASE("swapped ears at 90 degrees double the itd error") {
  StftConfig cfg;
  const auto b = render_binaural(white(16000, 7), 90.0, cfg);
  const double d = delta_itd(b.swapped(), b);
  CHECK(d == doctest::Approx(2.0 * woodworth_itd(90.0) * 1e3).epsilon(0.05));
  CHECK(d > 1.2);
  CHECK(delta_ild(b.swapped(), b) == doctest::Approx(2.0 * measure_ild(b)));
}
