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
#include <functional>
#include <random>

#include "bw/error.hpp"
#include "bw/gradcheck.hpp"
#include "bw/losses.hpp"
#include "doctest.h"

using namespace bw;

namespace {

BinauralSpectrogram constant(int bins, int frames, cdouble l, cdouble r) {
  return {ComplexPlane::Constant(bins, frames, l), ComplexPlane::Constant(bins, frames, r), {}};
}

BinauralSpectrogram column(std::vector<cdouble> l, std::vector<cdouble> r) {
  ComplexPlane pl(l.size(), 1), pr(r.size(), 1);
  for (std::size_t i = 0; i < l.size(); ++i) {
    pl(i, 0) = l[i];
    pr(i, 0) = r[i];
  }
  return {pl, pr, {}};
}

// Worst entrywise error between an analytic gradient and a central difference
// in the real and imaginary direction, relative to the largest entry.
double fd_error(const std::function<double(const BinauralSpectrogram&)>& f,
                const BinauralGradient& g, BinauralSpectrogram x) {
  const double h = 1e-6;
  double worst = 0.0, scale = 0.0;
  for (int ear = 0; ear < 2; ++ear) {
    ComplexPlane& p = ear == 0 ? x.left : x.right;
    const ComplexPlane& ga = ear == 0 ? g.left : g.right;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const cdouble z = p.data()[i];
      cdouble num;
      p.data()[i] = z + h;
      double up = f(x);
      p.data()[i] = z - h;
      double down = f(x);
      num.real((up - down) / (2 * h));
      p.data()[i] = z + cdouble(0, h);
      up = f(x);
      p.data()[i] = z - cdouble(0, h);
      down = f(x);
      num.imag((up - down) / (2 * h));
      p.data()[i] = z;
      worst = std::max(worst, std::abs(num - ga.data()[i]));
      scale = std::max(scale, std::abs(ga.data()[i]));
    }
  }
  return worst / scale;
}

}  // namespace

TEST_CASE("ild of a 2:1 magnitude pair") {
  const auto s = constant(2, 2, {0.0, 2.0}, {-1.0, 0.0});
  const RealPlane d = ild(s, 0.0);
  CHECK(d(1, 1) == doctest::Approx(6.020599913279624).epsilon(1e-13));
}

TEST_CASE("ri and magnitude losses on hand cases") {
  const auto tgt = constant(5, 5, {1.0, 1.0}, {0.0, 0.0});
  auto est = tgt;
  est.left.array() += cdouble(1.0, 0.0);
  const auto ri = loss_ri(est, tgt);
  CHECK(ri.value == doctest::Approx(25.0));
  CHECK(ri.grad.left(2, 3) == cdouble(2.0, 0.0));
  CHECK(ri.grad.right(2, 3) == cdouble(0.0, 0.0));

  auto t1 = column({{1.0, 0.0}}, {{0.0, 0.0}});
  auto e1 = column({{0.0, -4.0}}, {{0.0, 0.0}});
  CHECK(loss_mag(e1, t1).value == doctest::Approx(9.0));
  // Phase alone does not change the magnitude loss.
  auto e2 = column({{0.0, 1.0}}, {{0.0, 0.0}});
  CHECK(loss_mag(e2, t1).value == doctest::Approx(0.0).epsilon(1e-20));
}

TEST_CASE("mwild worked examples") {
  const double g = std::pow(10.0, 6.0 / 20.0);
  // Equal weights, errors +6 and -6 dB: the signed mean cancels.
  {
    const auto tgt = column({1.0, 1.0}, {1.0, 1.0});
    const auto est = column({g, 1.0}, {1.0, g});
    CHECK(std::abs(loss_mwild(est, tgt, 0.0).value) <= 1e-12);
    CHECK(loss_mwild(est, tgt, 0.0, IldLossVariant::kPerBinAbsolute).value ==
          doctest::Approx(6.0).epsilon(1e-12));
  }
  // Weights 3 and 1: |3*6 - 1*6| / 4 = 3 dB.
  {
    const auto tgt = column({std::sqrt(1.5), std::sqrt(0.5)}, {std::sqrt(1.5), std::sqrt(0.5)});
    const auto est = column({g, 1.0}, {1.0, g});
    CHECK(std::abs(loss_mwild(est, tgt, 0.0).value - 3.0) <= 1e-12);
  }
  const auto silent = constant(2, 2, 0.0, 0.0);
  CHECK_THROWS_WITH_AS(loss_mwild(silent, silent), doctest::Contains("zero weight mass"), Error);
}

TEST_CASE("mwild is invariant under a joint ear swap") {
  const auto est = random_binaural(3, 6, 5), tgt = random_binaural(4, 6, 5);
  CHECK(loss_mwild(est.swapped(), tgt.swapped()).value ==
        doctest::Approx(loss_mwild(est, tgt).value).epsilon(1e-14));
}

TEST_CASE("analytic gradients match central differences") {
  const auto est = random_binaural(11, 6, 6), tgt = random_binaural(12, 6, 6);
  CHECK(fd_error([&](const BinauralSpectrogram& x) { return loss_ri(x, tgt).value; },
                 loss_ri(est, tgt).grad, est) < 1e-7);
  CHECK(fd_error([&](const BinauralSpectrogram& x) { return loss_mag(x, tgt).value; },
                 loss_mag(est, tgt).grad, est) < 1e-7);
  for (auto v : {IldLossVariant::kSignedMean, IldLossVariant::kPerBinAbsolute}) {
    CHECK(fd_error([&](const BinauralSpectrogram& x) { return loss_mwild(x, tgt, 1e-8, v).value; },
                   loss_mwild(est, tgt, 1e-8, v).grad, est) < 1e-6);
  }
  const LossWeights w{1.0, 1.0, 3.0};
  CHECK(fd_error([&](const BinauralSpectrogram& x) { return composite_loss(x, tgt, w).total; },
                 composite_loss(est, tgt, w).grad, est) < 1e-7);
}

TEST_CASE("composite is the weighted sum of its parts") {
  const auto est = random_binaural(1, 4, 4), tgt = random_binaural(2, 4, 4);
  const auto b = composite_loss(est, tgt, {0.5, 2.0, 3.0});
  CHECK(b.total == doctest::Approx(0.5 * loss_ri(est, tgt).value + 2.0 * loss_mag(est, tgt).value +
                                   3.0 * loss_mwild(est, tgt).value));
  CHECK(composite_loss(tgt, tgt).total == doctest::Approx(0.0).epsilon(1e-20));
  CHECK_THROWS_AS(composite_loss(est, tgt, {-1.0, 1.0, 1.0}), Error);
  const auto other = random_binaural(2, 4, 3);
  CHECK_THROWS_AS(loss_ri(est, other), Error);
}

TEST_CASE("gradcheck report stays below tolerance") {
  const auto r = run_gradcheck();
  CHECK(r.ri < 1e-5);
  CHECK(r.mag < 1e-5);
  CHECK(r.mwild < 1e-5);
  CHECK(r.composite < 1e-5);
  CHECK(r.worst() == std::max({r.ri, r.mag, r.mwild, r.composite}));
}
