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

#include "bw/losses.hpp"

#include <cmath>
#include <numbers>

#include "bw/error.hpp"

namespace bw {
namespace {

ComplexPlane zeros(const ComplexPlane& like) {
  return ComplexPlane::Zero(like.rows(), like.cols());
}

double smooth_abs(cdouble z, double eps) {
  return std::sqrt(std::norm(z) + eps * eps);
}

// d/dz of log10(|z| + eps) in the (d/dx + i d/dy) convention.
cdouble dlog10_mag(cdouble z, double eps) {
  const double m = std::abs(z);
  if (m == 0.0) return {0.0, 0.0};
  return z / (m * (m + eps) * std::numbers::ln10);
}

}  // namespace

BinauralGradient BinauralGradient::zeros_like(const BinauralSpectrogram& s) {
  return {zeros(s.left), zeros(s.right)};
}

BinauralGradient& BinauralGradient::operator+=(const BinauralGradient& o) {
  left += o.left;
  right += o.right;
  return *this;
}

BinauralGradient BinauralGradient::scaled(double s) const {
  return {left * s, right * s};
}

void LossWeights::validate() const {
  require(ri >= 0 && mag >= 0 && mwild >= 0,
          "loss weights must be non-negative");
}

RealPlane ild(const BinauralSpectrogram& spec, double eps) {
  require(eps >= 0, "ild: eps must be non-negative");
  RealPlane out(spec.left.rows(), spec.left.cols());
  for (Eigen::Index f = 0; f < out.rows(); ++f) {
    for (Eigen::Index t = 0; t < out.cols(); ++t) {
      out(f, t) = level_difference_db(std::abs(spec.left(f, t)),
                                      std::abs(spec.right(f, t)), eps);
    }
  }
  return out;
}

RealPlane energy_weights(const BinauralSpectrogram& target) {
  return target.left.cwiseAbs2() + target.right.cwiseAbs2();
}

LossValue loss_ri(const BinauralSpectrogram& est,
                  const BinauralSpectrogram& target) {
  require_same_shape(est, target);
  LossValue out{0.0, BinauralGradient::zeros_like(est)};
  const ComplexPlane* e[2] = {&est.left, &est.right};
  const ComplexPlane* y[2] = {&target.left, &target.right};
  ComplexPlane* g[2] = {&out.grad.left, &out.grad.right};
  for (int ear = 0; ear < 2; ++ear) {
    for (Eigen::Index f = 0; f < e[ear]->rows(); ++f) {
      for (Eigen::Index t = 0; t < e[ear]->cols(); ++t) {
        const cdouble d = (*e[ear])(f, t) - (*y[ear])(f, t);
        out.value += d.real() * d.real() + d.imag() * d.imag();
        (*g[ear])(f, t) = 2.0 * d;
      }
    }
  }
  return out;
}

LossValue loss_mag(const BinauralSpectrogram& est,
                   const BinauralSpectrogram& target, double eps) {
  require_same_shape(est, target);
  LossValue out{0.0, BinauralGradient::zeros_like(est)};
  const ComplexPlane* e[2] = {&est.left, &est.right};
  const ComplexPlane* y[2] = {&target.left, &target.right};
  ComplexPlane* g[2] = {&out.grad.left, &out.grad.right};
  for (int ear = 0; ear < 2; ++ear) {
    for (Eigen::Index f = 0; f < e[ear]->rows(); ++f) {
      for (Eigen::Index t = 0; t < e[ear]->cols(); ++t) {
        const cdouble z = (*e[ear])(f, t);
        const double mz = smooth_abs(z, eps);
        const double d = mz - smooth_abs((*y[ear])(f, t), eps);
        out.value += d * d;
        (*g[ear])(f, t) = 2.0 * d * z / mz;
      }
    }
  }
  return out;
}

LossValue loss_mwild(const BinauralSpectrogram& est,
                     const BinauralSpectrogram& target, double eps,
                     IldLossVariant variant) {
  require_same_shape(est, target);
  require(eps >= 0, "loss_mwild: eps must be non-negative");
  const RealPlane sigma = energy_weights(target);
  double mass = 0.0;
  for (Eigen::Index f = 0; f < sigma.rows(); ++f) {
    for (Eigen::Index t = 0; t < sigma.cols(); ++t) mass += sigma(f, t);
  }
  if (!(mass > 0.0)) throw Error("loss_mwild: zero weight mass");

  RealPlane diff(sigma.rows(), sigma.cols());
  double weighted = 0.0;
  double per_bin_abs = 0.0;
  for (Eigen::Index f = 0; f < sigma.rows(); ++f) {
    for (Eigen::Index t = 0; t < sigma.cols(); ++t) {
      const double d =
          level_difference_db(std::abs(est.left(f, t)),
                              std::abs(est.right(f, t)), eps) -
          level_difference_db(std::abs(target.left(f, t)),
                              std::abs(target.right(f, t)), eps);
      diff(f, t) = d;
      weighted += sigma(f, t) * d;
      per_bin_abs += sigma(f, t) * std::abs(d);
    }
  }
  LossValue out{0.0, BinauralGradient::zeros_like(est)};
  const double mean = weighted / mass;
  out.value = variant == IldLossVariant::kSignedMean ? std::abs(mean)
                                                     : per_bin_abs / mass;
  const double outer = mean > 0.0 ? 1.0 : (mean < 0.0 ? -1.0 : 0.0);
  for (Eigen::Index f = 0; f < sigma.rows(); ++f) {
    for (Eigen::Index t = 0; t < sigma.cols(); ++t) {
      double s = outer;
      if (variant == IldLossVariant::kPerBinAbsolute) {
        s = diff(f, t) > 0.0 ? 1.0 : (diff(f, t) < 0.0 ? -1.0 : 0.0);
      }
      const double w = 20.0 * s * sigma(f, t) / mass;
      out.grad.left(f, t) = w * dlog10_mag(est.left(f, t), eps);
      out.grad.right(f, t) = -w * dlog10_mag(est.right(f, t), eps);
    }
  }
  return out;
}

LossBreakdown composite_loss(const BinauralSpectrogram& est,
                             const BinauralSpectrogram& target,
                             const LossWeights& weights,
                             const LossOptions& options) {
  weights.validate();
  const LossValue ri = loss_ri(est, target);
  const LossValue mag = loss_mag(est, target, options.mag_eps);
  const LossValue ildl =
      loss_mwild(est, target, options.ild_eps, options.ild_variant);
  LossBreakdown out;
  out.l_ri = ri.value;
  out.l_mag = mag.value;
  out.l_mwild = ildl.value;
  out.total =
      weights.ri * out.l_ri + weights.mag * out.l_mag + weights.mwild * out.l_mwild;
  out.grad = ri.grad.scaled(weights.ri);
  out.grad += mag.grad.scaled(weights.mag);
  out.grad += ildl.grad.scaled(weights.mwild);
  return out;
}

}  // namespace bw
