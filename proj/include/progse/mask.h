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


#ifndef PROGSE_MASK_H_
#define PROGSE_MASK_H_

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "progse/common.h"
#include "progse/stft.h"

namespace progse {

// Cells with |Y|^2 at or below this value get a zero mask.
inline constexpr double kMaskEpsilon = 1e-12;

struct ComplexMask {
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<std::complex<double>> data;
  std::optional<double> bound;  // |entry| <= bound when set

  std::complex<double>& at(std::size_t t, std::size_t f) { return data[t * bins + f]; }
  const std::complex<double>& at(std::size_t t, std::size_t f) const {
    return data[t * bins + f];
  }
};

// Oracle complex ratio mask M = X conj(Y) / |Y|^2, so that M * Y = X. With a
// bound, entries are shrunk to that magnitude keeping their phase.
ComplexMask ComputeCrm(const ComplexSpectrogram& mixture, const ComplexSpectrogram& target,
                       std::optional<double> bound = std::nullopt);

ComplexSpectrogram ApplyMask(const ComplexSpectrogram& mixture, const ComplexMask& mask);

// Per-bin affine map out = w_denoised * a + w_mixture * b + bias.
struct AffineFusion {
  std::vector<double> w_denoised;
  std::vector<double> w_mixture;
  std::vector<double> bias;

  std::size_t size() const { return bias.size(); }
};

// Text format: one line per frequency bin, "w_denoised w_mixture bias",
// whitespace separated; blank lines and lines starting with '#' are skipped.
AffineFusion ParseAffineFusion(const std::string& text);
AffineFusion LoadAffineFusion(const std::string& path);
std::string FormatAffineFusion(const AffineFusion& fusion);

struct FusionConfig {
  double beta = 0.5;  // weight of the denoised magnitude, in [0, 1]
  std::optional<AffineFusion> affine;

  void Validate() const;
};

// Default: beta * denoised + (1 - beta) * mixture per cell. With `affine`
// set, the per-bin affine map is used instead.
RealMatrix FuseFeatures(const RealMatrix& mag_denoised, const RealMatrix& mag_mixture,
                        const FusionConfig& cfg);

}  // namespace progse

#endif  // PROGSE_MASK_H_
