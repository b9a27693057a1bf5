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


#ifndef PROGSE_FFT_H_
#define PROGSE_FFT_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace progse {

// Real-input FFT of size n: writes n/2 + 1 bins.
void RealForward(std::span<const double> input,
                 std::span<std::complex<double>> output);
// Inverse of RealForward including the 1/n scale.
void RealInverse(std::span<const std::complex<double>> input,
                 std::span<double> output);

// Full linear convolution, length a.size() + b.size() - 1.
std::vector<double> ConvolveDirect(std::span<const double> a,
                                   std::span<const double> b);
std::vector<double> ConvolveFft(std::span<const double> a,
                                std::span<const double> b);
// Picks direct or transform-based convolution by cost.
std::vector<double> Convolve(std::span<const double> a,
                             std::span<const double> b);

std::size_t NextPowerOfTwo(std::size_t n);
bool IsPowerOfTwo(std::size_t n);

}  // namespace progse

#endif  // PROGSE_FFT_H_
