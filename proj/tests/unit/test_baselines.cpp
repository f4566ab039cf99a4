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

#include "bw/baselines.hpp"
#include "bw/error.hpp"
#include "bw/fft.hpp"
#include "doctest.h"

using namespace bw;

namespace {

Eigen::MatrixXcd random_pd(int m, std::mt19937& gen) {
  std::normal_distribution<double> d;
  Eigen::MatrixXcd a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = {d(gen), d(gen)};
  return a * a.adjoint() + 0.1 * Eigen::MatrixXcd::Identity(m, m);
}

Eigen::VectorXcd random_vec(int m, std::mt19937& gen) {
  std::normal_distribution<double> d;
  Eigen::VectorXcd v(m);
  for (int i = 0; i < m; ++i) v(i) = {d(gen), d(gen)};
  return v;
}

}  // namespace

TEST_CASE("mvdr with white noise and a unit steering vector averages") {
  const Eigen::VectorXcd d = Eigen::VectorXcd::Ones(6);
  const auto w = mvdr_weights(d, Eigen::MatrixXcd::Identity(6, 6));
  for (int m = 0; m < 6; ++m) CHECK(std::abs(w(m) - 1.0 / 6.0) < 1e-15);
}

TEST_CASE("mvdr is distortionless and minimum variance") {
  std::mt19937 gen(1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto r = random_pd(4, gen);
    const auto d = random_vec(4, gen);
    const auto w = mvdr_weights(d, r);
    CHECK(std::abs(w.dot(d) - 1.0) < 1e-12);
    const double base = (w.adjoint() * r * w)(0, 0).real();
    for (int k = 0; k < 20; ++k) {
      Eigen::VectorXcd v = random_vec(4, gen);
      v -= d * (d.dot(v) / d.squaredNorm());  // d^H v = 0 keeps the constraint
      const Eigen::VectorXcd u = w + 0.1 * v;
      CHECK(std::abs(u.dot(d) - 1.0) < 1e-12);
      CHECK((u.adjoint() * r * u)(0, 0).real() >= base - 1e-12);
    }
  }
  CHECK_THROWS_AS(mvdr_weights(Eigen::VectorXcd::Ones(2), -Eigen::MatrixXcd::Identity(2, 2)), Error);
}

TEST_CASE("noise covariance estimate") {
  StftConfig cfg;
  std::mt19937 gen(2);
  std::normal_distribution<double> nd;
  std::vector<std::vector<double>> x(3, std::vector<double>(3200));
  for (auto& c : x) for (auto& v : c) v = nd(gen);
  const auto spec = MultiChannelSpectrogram::from_signals(x, cfg);
  const auto r = estimate_noise_covariance(spec, 0.0);
  REQUIRE(r.r.size() == 161);
  const int f = 40;
  Eigen::MatrixXcd manual = Eigen::MatrixXcd::Zero(3, 3);
  for (int t = 0; t < spec.num_frames(); ++t) {
    const auto v = spec.bin(f, t);
    manual += v * v.adjoint();
  }
  manual /= spec.num_frames();
  CHECK((r.r[f] - manual).norm() < 1e-9 * manual.norm());

  std::vector<std::vector<double>> zero(3, std::vector<double>(3200, 0.0));
  const auto z = estimate_noise_covariance(MultiChannelSpectrogram::from_signals(zero, cfg));
  CHECK((z.r[10] - Eigen::MatrixXcd::Identity(3, 3)).norm() == 0.0);

  std::vector<std::vector<double>> short_x(3, std::vector<double>(480, 1.0));
  CHECK_THROWS_WITH_AS(estimate_noise_covariance(MultiChannelSpectrogram::from_signals(short_x, cfg)),
                       doctest::Contains("rank-deficient"), Error);
}

TEST_CASE("steering from rirs is relative to mic 0") {
  StftConfig cfg;
  std::vector<std::vector<double>> h{{0, 0, 1.0, 0.2}, {0, 0, 0, 0.5, 0.1}};
  const auto s = steering_from_rirs(h, cfg);
  REQUIRE(s.num_bins() == 161);
  const auto h0 = transfer_at_bins(h[0], 320), h1 = transfer_at_bins(h[1], 320);
  for (int f : {0, 17, 160}) {
    CHECK(s.d[f](0) == cdouble(1.0, 0.0));
    CHECK(std::abs(s.d[f](1) - h1[f] / h0[f]) < 1e-12);
    CHECK(std::abs(s.reference[f] - h0[f]) < 1e-12);
  }
}

TEST_CASE("mint with two length-8 channels equalizes to a delayed impulse") {
  std::mt19937 gen(3);
  std::normal_distribution<double> nd;
  std::vector<std::vector<double>> h(2, std::vector<double>(8));
  for (auto& c : h) for (auto& v : c) v = nd(gen);
  const int lg = mint_min_filter_len(2, 8);
  CHECK(lg == 7);
  const auto r = mint_inverse_filters(h, lg);
  REQUIRE(r.equalized.size() == 14);
  // Recompute sum_m h_m * g_m independently.
  std::vector<double> eq(14, 0.0);
  for (int m = 0; m < 2; ++m)
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < lg; ++j) eq[i + j] += h[m][i] * r.filters[m][j];
  for (int n = 0; n < 14; ++n) {
    CHECK(std::abs(eq[n] - (n == r.delay ? 1.0 : 0.0)) < 1e-9);
    CHECK(std::abs(r.equalized[n] - eq[n]) < 1e-12);
  }
  CHECK_THROWS_WITH_AS(mint_inverse_filters(h, 6), doctest::Contains("MINT condition violated"), Error);
  CHECK_THROWS_AS(mint_inverse_filters({h[0]}, 20), Error);
}

TEST_CASE("mif recovers a noise-free source") {
  std::mt19937 gen(4);
  std::normal_distribution<double> nd;
  std::vector<std::vector<double>> h(3, std::vector<double>(40));
  for (auto& c : h) {
    for (std::size_t n = 0; n < c.size(); ++n) c[n] = nd(gen) * std::exp(-0.1 * n);
  }
  std::vector<double> s(4000);
  for (auto& v : s) v = nd(gen);
  std::vector<std::vector<double>> x;
  for (const auto& hm : h) {
    auto y = convolve(s, hm);
    y.resize(s.size());
    x.push_back(y);
  }
  MifOptions o;
  o.rir_len = 40;
  const auto r = mif_dereverberate(x, h, o);
  REQUIRE(r.source.size() == s.size());
  double err = 0.0, ref = 0.0;
  for (std::size_t n = 200; n < 3500; ++n) {
    err += (r.source[n] - s[n]) * (r.source[n] - s[n]);
    ref += s[n] * s[n];
  }
  CHECK(err / ref < 1e-8);
}
