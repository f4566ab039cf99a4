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

#include "bw/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "bw/rng.hpp"

namespace bw {

double gradient_error(
    const std::function<double(const BinauralSpectrogram&)>& value,
    const BinauralGradient& analytic, const BinauralSpectrogram& at,
    double step, double exclude_below) {
  BinauralSpectrogram probe = at;
  ComplexPlane* planes[2] = {&probe.left, &probe.right};
  const ComplexPlane* grads[2] = {&analytic.left, &analytic.right};
  double max_diff = 0.0, max_analytic = 0.0, max_numeric = 0.0;
  for (int ear = 0; ear < 2; ++ear) {
    ComplexPlane& p = *planes[ear];
    for (Eigen::Index f = 0; f < p.rows(); ++f) {
      for (Eigen::Index t = 0; t < p.cols(); ++t) {
        const cdouble z = p(f, t);
        if (std::abs(z) < exclude_below) continue;
        double parts[2];
        for (int part = 0; part < 2; ++part) {
          const cdouble h = part == 0 ? cdouble(step, 0.0) : cdouble(0.0, step);
          p(f, t) = z + h;
          const double up = value(probe);
          p(f, t) = z - h;
          const double down = value(probe);
          p(f, t) = z;
          parts[part] = (up - down) / (2.0 * step);
        }
        const cdouble a = (*grads[ear])(f, t);
        const cdouble numeric(parts[0], parts[1]);
        max_diff = std::max({max_diff, std::abs(a.real() - numeric.real()),
                             std::abs(a.imag() - numeric.imag())});
        max_analytic = std::max({max_analytic, std::abs(a.real()), std::abs(a.imag())});
        max_numeric = std::max(
            {max_numeric, std::abs(numeric.real()), std::abs(numeric.imag())});
      }
    }
  }
  const double scale = std::max(max_analytic, max_numeric);
  return scale == 0.0 ? max_diff : max_diff / scale;
}

double GradcheckReport::worst() const {
  return std::max({ri, mag, mwild, composite});
}

BinauralSpectrogram random_binaural(std::uint64_t seed, int bins, int frames) {
  Rng rng(seed);
  ComplexPlane l(bins, frames), r(bins, frames);
  for (auto* p : {&l, &r}) {
    for (Eigen::Index t = 0; t < frames; ++t) {
      for (Eigen::Index f = 0; f < bins; ++f) {
        const double re = rng.normal();
        const double im = rng.normal();
        (*p)(f, t) = {re, im};
      }
    }
  }
  StftConfig cfg;
  cfg.frame_len = 2 * (bins - 1);
  cfg.hop = bins - 1;
  return {std::move(l), std::move(r), cfg};
}

GradcheckReport run_gradcheck(std::uint64_t seed, int bins, int frames,
                              double step, const LossWeights& weights,
                              const LossOptions& options) {
  const BinauralSpectrogram est = random_binaural(seed, bins, frames);
  const BinauralSpectrogram target = random_binaural(derive_seed(seed, 1), bins, frames);
  const double exclude = 10.0 * options.ild_eps;
  GradcheckReport rep;
  rep.ri = gradient_error(
      [&](const BinauralSpectrogram& e) { return loss_ri(e, target).value; },
      loss_ri(est, target).grad, est, step);
  rep.mag = gradient_error(
      [&](const BinauralSpectrogram& e) {
        return loss_mag(e, target, options.mag_eps).value;
      },
      loss_mag(est, target, options.mag_eps).grad, est, step, exclude);
  rep.mwild = gradient_error(
      [&](const BinauralSpectrogram& e) {
        return loss_mwild(e, target, options.ild_eps, options.ild_variant).value;
      },
      loss_mwild(est, target, options.ild_eps, options.ild_variant).grad, est,
      step, exclude);
  rep.composite = gradient_error(
      [&](const BinauralSpectrogram& e) {
        return composite_loss(e, target, weights, options).total;
      },
      composite_loss(est, target, weights, options).grad, est, step, exclude);
  return rep;
}

}  // namespace bw
