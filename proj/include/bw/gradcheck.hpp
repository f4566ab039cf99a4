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
#include <functional>

#include "bw/losses.hpp"

namespace bw {

// Normwise relative error max_i |analytic_i - numeric_i| / max_i |analytic_i|
// (or the numeric norm if larger), where the numeric gradient is a central
// difference taken on the real and imaginary part of every estimate entry.
// Entries whose magnitude lies within `exclude_below` of zero are skipped.
double gradient_error(
    const std::function<double(const BinauralSpectrogram&)>& value,
    const BinauralGradient& analytic, const BinauralSpectrogram& at,
    double step = 1e-6, double exclude_below = 0.0);

struct GradcheckReport {
  double ri = 0.0;
  double mag = 0.0;
  double mwild = 0.0;
  double composite = 0.0;

  double worst() const;
};

// Random complex-Gaussian est/target pairs of shape bins x frames.
BinauralSpectrogram random_binaural(std::uint64_t seed, int bins, int frames);

GradcheckReport run_gradcheck(std::uint64_t seed = 7, int bins = 8,
                              int frames = 8, double step = 1e-6,
                              const LossWeights& weights = {},
                              const LossOptions& options = {});

}  // namespace bw
