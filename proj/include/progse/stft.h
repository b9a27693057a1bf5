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


#ifndef PROGSE_STFT_H_
#define PROGSE_STFT_H_

#include <complex>
#include <cstddef>
#include <vector>

#include "progse/common.h"
#include "progse/waveform.h"

namespace progse {

enum class WindowType { kHann, kSqrtHann };

// Analysis and synthesis share the window; synthesis divides by the
// overlap-added squared window, so a config is accepted only when that
// envelope is constant (COLA for w^2) at the configured hop.
struct StftConfig {
  std::size_t fft_size = 512;
  std::size_t hop = 128;
  WindowType window = WindowType::kSqrtHann;
  bool center = true;  // zero-pad fft_size/2 on both ends

  void Validate() const;  // kConfig on failure
  std::vector<double> Window() const;  // periodic
  std::size_t bins() const { return fft_size / 2 + 1; }
  std::size_t FrameCount(std::size_t signal_length) const;
  bool operator==(const StftConfig&) const = default;
};

struct ComplexSpectrogram {
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<std::complex<double>> data;  // frames x bins, row-major
  StftConfig config;
  std::size_t signal_length = 0;  // trimmed length for istft
  int sample_rate = 16000;

  std::complex<double>& at(std::size_t t, std::size_t f) { return data[t * bins + f]; }
  const std::complex<double>& at(std::size_t t, std::size_t f) const {
    return data[t * bins + f];
  }
  RealMatrix Magnitude() const;
};

ComplexSpectrogram Stft(const Waveform& x, const StftConfig& cfg);
Waveform Istft(const ComplexSpectrogram& spec);

// Spectrogram with the given magnitudes and unit phasors taken from `phase`.
ComplexSpectrogram WithMagnitude(const ComplexSpectrogram& phase, const RealMatrix& magnitude);

}  // namespace progse

#endif  // PROGSE_STFT_H_
