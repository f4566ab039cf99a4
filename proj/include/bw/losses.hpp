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

#include "bw/signal.hpp"

namespace bw {

// Gradient convention used throughout: for a real loss L of a complex
// variable z = x + iy the gradient is reported as dL/dx + i dL/dy
// (equivalently 2 dL/d conj(z)). Steepest descent is z -= lr * grad.
struct BinauralGradient {
  ComplexPlane left;
  ComplexPlane right;

  static BinauralGradient zeros_like(const BinauralSpectrogram& s);
  BinauralGradient& operator+=(const BinauralGradient& o);
  BinauralGradient scaled(double s) const;
};

struct LossValue {
  double value = 0.0;
  BinauralGradient grad;
};

struct LossWeights {
  double ri = 1.0;
  double mag = 1.0;
  double mwild = 3.0;

  void validate() const;
};

enum class IldLossVariant {
  // |sum sigma (ILD_est - ILD_tgt) / sum sigma|
  kSignedMean,
  // sum sigma |ILD_est - ILD_tgt| / sum sigma (stricter: no cancellation)
  kPerBinAbsolute,
};

struct LossOptions {
  double ild_eps = 1e-8;   // additive magnitude floor inside ILD
  double mag_eps = 1e-12;  // smoothing of |z| in the magnitude loss
  IldLossVariant ild_variant = IldLossVariant::kSignedMean;
};

// Per-bin 20 log10((|l| + eps) / (|r| + eps)).
RealPlane ild(const BinauralSpectrogram& spec, double eps = 1e-8);

// sigma_{f,t} = |Y^l|^2 + |Y^r|^2 of the target.
RealPlane energy_weights(const BinauralSpectrogram& target);

// ||Re(est - tgt)||_F^2 + ||Im(est - tgt)||_F^2 summed over ears.
LossValue loss_ri(const BinauralSpectrogram& est,
                  const BinauralSpectrogram& target);

// sum over ears and bins of (|est| - |tgt|)^2 with |z| realized as
// sqrt(|z|^2 + eps^2), which keeps the gradient defined at z = 0.
LossValue loss_mag(const BinauralSpectrogram& est,
                   const BinauralSpectrogram& target, double eps = 1e-12);

// Magnitude-weighted ILD loss; sigma comes from the target so only ILD(est)
// carries gradient. Throws "zero weight mass" for a silent target.
LossValue loss_mwild(const BinauralSpectrogram& est,
                     const BinauralSpectrogram& target, double eps = 1e-8,
                     IldLossVariant variant = IldLossVariant::kSignedMean);

struct LossBreakdown {
  double l_ri = 0.0;
  double l_mag = 0.0;
  double l_mwild = 0.0;
  double total = 0.0;
  BinauralGradient grad;
};

LossBreakdown composite_loss(const BinauralSpectrogram& est,
                             const BinauralSpectrogram& target,
                             const LossWeights& weights = {},
                             const LossOptions& options = {});

}  // namespace bw
