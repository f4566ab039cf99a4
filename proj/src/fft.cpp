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

#include "bw/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

#include "bw/error.hpp"

namespace bw {
namespace {

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

RealBuffer alloc_real(std::size_t n) {
  return RealBuffer(fftw_alloc_real(std::max<std::size_t>(n, 1)));
}
ComplexBuffer alloc_complex(std::size_t n) {
  return ComplexBuffer(fftw_alloc_complex(std::max<std::size_t>(n, 1)));
}

// FFTW planning is not thread-safe, execution on fresh aligned arrays is.
// Plans are created once per size with FFTW_ESTIMATE, which keeps the chosen
// algorithm (and therefore the output bits) independent of timing.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

const PlanPair& plans_for(int n) {
  static std::mutex mu;
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto r = alloc_real(n);
  auto c = alloc_complex(n / 2 + 1);
  PlanPair p;
  p.forward = fftw_plan_dft_r2c_1d(n, r.get(), c.get(), FFTW_ESTIMATE);
  p.inverse = fftw_plan_dft_c2r_1d(n, c.get(), r.get(), FFTW_ESTIMATE);
  if (p.forward == nullptr || p.inverse == nullptr) {
    throw Error("fftw planning failed");
  }
  return cache.emplace(n, p).first->second;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

void rfft(std::span<const double> in, std::span<cdouble> out) {
  const int n = static_cast<int>(in.size());
  require(n > 0, "rfft: empty input");
  require(out.size() == static_cast<std::size_t>(n / 2 + 1),
          "rfft: output size mismatch");
  const PlanPair& p = plans_for(n);
  auto r = alloc_real(n);
  auto c = alloc_complex(n / 2 + 1);
  std::copy(in.begin(), in.end(), r.get());
  fftw_execute_dft_r2c(p.forward, r.get(), c.get());
  for (int k = 0; k <= n / 2; ++k) out[k] = {c[k][0], c[k][1]};
}

void irfft(std::span<const cdouble> in, std::span<double> out) {
  const int n = static_cast<int>(out.size());
  require(n > 0, "irfft: empty output");
  require(in.size() == static_cast<std::size_t>(n / 2 + 1),
          "irfft: input size mismatch");
  const PlanPair& p = plans_for(n);
  auto r = alloc_real(n);
  auto c = alloc_complex(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) {
    c[k][0] = in[k].real();
    c[k][1] = in[k].imag();
  }
  c[0][1] = 0.0;
  if (n % 2 == 0) c[n / 2][1] = 0.0;
  fftw_execute_dft_c2r(p.inverse, c.get(), r.get());
  const double scale = 1.0 / n;
  for (int i = 0; i < n; ++i) out[i] = r[i] * scale;
}

std::vector<double> convolve(std::span<const double> a,
                             std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t len = a.size() + b.size() - 1;
  if (std::min(a.size(), b.size()) <= 32) {
    std::vector<double> y(len, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) y[i + j] += a[i] * b[j];
    }
    return y;
  }
  const std::size_t n = next_pow2(len);
  std::vector<double> pa(n, 0.0), pb(n, 0.0);
  std::copy(a.begin(), a.end(), pa.begin());
  std::copy(b.begin(), b.end(), pb.begin());
  std::vector<cdouble> fa(n / 2 + 1), fb(n / 2 + 1);
  rfft(pa, fa);
  rfft(pb, fb);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  irfft(fa, pa);
  pa.resize(len);
  return pa;
}

std::vector<cdouble> transfer_at_bins(std::span<const double> h,
                                      int frame_len) {
  require(frame_len > 0, "transfer_at_bins: frame_len must be positive");
  std::vector<double> folded(frame_len, 0.0);
  for (std::size_t n = 0; n < h.size(); ++n) folded[n % frame_len] += h[n];
  std::vector<cdouble> out(frame_len / 2 + 1);
  rfft(folded, out);
  return out;
}

}  // namespace bw
