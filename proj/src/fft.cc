// Copyright 2026 The Progse Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "progse/fft.h"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>

#include "progse/common.h"

namespace progse {
namespace {

struct FftwBuffer {
  explicit FftwBuffer(std::size_t bytes) : ptr(fftw_malloc(bytes)) {}
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  void* ptr;
};

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

// Plans are created once per size under a lock; fftw_execute_dft_* on an
// existing plan is thread-safe.
class PlanCache {
 public:
  static PlanCache& Instance() {
    static PlanCache cache;
    return cache;
  }

  PlanPair Get(std::size_t n) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    FftwBuffer real(sizeof(double) * n);
    FftwBuffer cplx(sizeof(fftw_complex) * (n / 2 + 1));
    const int size = static_cast<int>(n);
    PlanPair pair;
    pair.forward = fftw_plan_dft_r2c_1d(size, static_cast<double*>(real.ptr),
                                        static_cast<fftw_complex*>(cplx.ptr),
                                        FFTW_ESTIMATE);
    pair.inverse = fftw_plan_dft_c2r_1d(size, static_cast<fftw_complex*>(cplx.ptr),
                                        static_cast<double*>(real.ptr),
                                        FFTW_ESTIMATE);
    plans_.emplace(n, pair);
    return pair;
  }

 private:
  std::mutex mu_;
  std::map<std::size_t, PlanPair> plans_;
};

}  // namespace

std::size_t NextPowerOfTwo(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

bool IsPowerOfTwo(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void RealForward(std::span<const double> input,
                 std::span<std::complex<double>> output) {
  const std::size_t n = input.size();
  if (n == 0 || output.size() != n / 2 + 1) {
    throw Error(ErrorCode::kInvalidArgument, "fft: bad buffer sizes");
  }
  PlanPair plan = PlanCache::Instance().Get(n);
  FftwBuffer in(sizeof(double) * n);
  FftwBuffer out(sizeof(fftw_complex) * (n / 2 + 1));
  auto* in_ptr = static_cast<double*>(in.ptr);
  std::copy(input.begin(), input.end(), in_ptr);
  auto* out_ptr = static_cast<fftw_complex*>(out.ptr);
  fftw_execute_dft_r2c(plan.forward, in_ptr, out_ptr);
  for (std::size_t k = 0; k < output.size(); ++k) {
    output[k] = {out_ptr[k][0], out_ptr[k][1]};
  }
}

void RealInverse(std::span<const std::complex<double>> input, std::span<double> output) {
  const std::size_t n = output.size();
  if (n == 0 || input.size() != n / 2 + 1) {
    throw Error(ErrorCode::kInvalidArgument, "ifft: bad buffer sizes");
  }
  PlanPair plan = PlanCache::Instance().Get(n);
  FftwBuffer in(sizeof(fftw_complex) * (n / 2 + 1));
  FftwBuffer out(sizeof(double) * n);
  auto* in_ptr = static_cast<fftw_complex*>(in.ptr);
  for (std::size_t k = 0; k < input.size(); ++k) {
    in_ptr[k][0] = input[k].real();
    in_ptr[k][1] = input[k].imag();
  }
  auto* out_ptr = static_cast<double*>(out.ptr);
  // c2r destroys its input; the buffer is private to this call.
  fftw_execute_dft_c2r(plan.inverse, in_ptr, out_ptr);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) output[i] = out_ptr[i] * scale;
}

std::vector<double> ConvolveDirect(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t j = 0; j < b.size(); ++j) {
    const double bj = b[j];
    if (bj == 0.0) continue;
    for (std::size_t i = 0; i < a.size(); ++i) out[i + j] += a[i] * bj;
  }
  return out;
}

std::vector<double> ConvolveFft(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t len = a.size() + b.size() - 1;
  const std::size_t n = NextPowerOfTwo(len);
  std::vector<double> pa(n, 0.0), pb(n, 0.0);
  std::copy(a.begin(), a.end(), pa.begin());
  std::copy(b.begin(), b.end(), pb.begin());
  std::vector<std::complex<double>> fa(n / 2 + 1), fb(n / 2 + 1);
  RealForward(pa, fa);
  RealForward(pb, fb);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  RealInverse(fa, pa);
  pa.resize(len);
  return pa;
}

std::vector<double> Convolve(std::span<const double> a, std::span<const double> b) {
  std::size_t nonzero_b = 0;
  for (double v : b) nonzero_b += v != 0.0;
  const double direct_cost = static_cast<double>(a.size()) * static_cast<double>(nonzero_b);
  const double n = static_cast<double>(NextPowerOfTwo(a.size() + b.size()));
  const double fft_cost = 12.0 * n * std::log2(std::max(n, 2.0));
  return direct_cost <= fft_cost ? ConvolveDirect(a, b) : ConvolveFft(a, b);
}

}  // namespace progse
