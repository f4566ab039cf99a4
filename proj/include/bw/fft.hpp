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

#include <span>
#include <vector>

#include "bw/signal.hpp"

namespace bw {

// Real-to-complex DFT of length in.size(); out receives n/2+1 bins.
void rfft(std::span<const double> in, std::span<cdouble> out);
// Inverse of rfft including the 1/n factor; imaginary parts of DC and (for
// even n) Nyquist are ignored.
void irfft(std::span<const cdouble> in, std::span<double> out);

// Full linear convolution, length a.size() + b.size() - 1.
std::vector<double> convolve(std::span<const double> a,
                             std::span<const double> b);

// Response of FIR `h` sampled at the frame_len-point DFT grid (DTFT at
// bin frequencies), i.e. the DFT of h folded modulo frame_len.
std::vector<cdouble> transfer_at_bins(std::span<const double> h,
                                      int frame_len);

}  // namespace bw
