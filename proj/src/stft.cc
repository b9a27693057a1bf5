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


#include "progse/stft.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "progse/fft.h"

namespace progse {

void StftConfig::Validate() const {
  if (fft_size < 2 || !IsPowerOfTwo(fft_size)) {
    throw Error(ErrorCode::kConfig, "stft: fft_size must be a power of two >= 2");
  }
  if (hop == 0 || hop > fft_size) {
    throw Error(ErrorCode::kConfig, "stft: hop must be in [1, fft_size]");
  }
  const std::vector<double> w = Window();
  std::vector<double> envelope(hop, 0.0);
  for (std::size_t n = 0; n < fft_size; ++n) envelope[n % hop] += w[n] * w[n];
  const auto [lo, hi] = std::minmax_element(envelope.begin(), envelope.end());
  if (!(*lo > 0.0) || (*hi - *lo) > 1e-9 * *hi) {
    throw Error(ErrorCode::kConfig, "stft: window/hop pair (" + std::to_string(fft_size) +
                                        ", " + std::to_string(hop) +
                                        ") is not constant-overlap-add");
  }
}

std::vector<double> StftConfig::Window() const {
  std::vector<double> w(fft_size);
  for (std::size_t n = 0; n < fft_size; ++n) {
    const double hann =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / fft_size);
    w[n] = window == WindowType::kHann ? hann : std::sqrt(hann);
  }
  return w;
}

std::size_t StftConfig::FrameCount(std::size_t signal_length) const {
  if (center) return 1 + (signal_length + hop - 1) / hop;
  if (signal_length < fft_size) return 0;
  return 1 + (signal_length - fft_size + hop - 1) / hop;
}

RealMatrix ComplexSpectrogram::Magnitude() const {
  RealMatrix mag(frames, bins);
  for (std::size_t i = 0; i < data.size(); ++i) mag.data[i] = std::abs(data[i]);
  return mag;
}

ComplexSpectrogram Stft(const Waveform& x, const StftConfig& cfg) {
  cfg.Validate();
  if (x.sample_rate <= 0) throw Error(ErrorCode::kInvalidArgument, "stft: bad sample rate");
  if (!cfg.center && x.size() < cfg.fft_size) {
    throw Error(ErrorCode::kInvalidArgument,
                "stft: signal shorter than fft_size without center padding");
  }
  const std::size_t n = cfg.fft_size;
  ComplexSpectrogram spec;
  spec.config = cfg;
  spec.bins = cfg.bins();
  spec.frames = cfg.FrameCount(x.size());
  spec.signal_length = x.size();
  spec.sample_rate = x.sample_rate;
  spec.data.assign(spec.frames * spec.bins, {0.0, 0.0});

  const std::size_t left = cfg.center ? n / 2 : 0;
  std::vector<double> padded((spec.frames - 1) * cfg.hop + n, 0.0);
  std::copy(x.samples.begin(), x.samples.end(),
            padded.begin() + static_cast<std::ptrdiff_t>(left));

  const std::vector<double> window = cfg.Window();
  std::vector<double> frame(n);
  for (std::size_t t = 0; t < spec.frames; ++t) {
    const double* src = padded.data() + t * cfg.hop;
    for (std::size_t i = 0; i < n; ++i) frame[i] = src[i] * window[i];
    RealForward(frame, std::span(spec.data.data() + t * spec.bins, spec.bins));
  }
  return spec;
}

Waveform Istft(const ComplexSpectrogram& spec) {
  const StftConfig& cfg = spec.config;
  cfg.Validate();
  if (spec.bins != cfg.bins() || spec.data.size() != spec.frames * spec.bins ||
      spec.frames != cfg.FrameCount(spec.signal_length) || spec.frames == 0) {
    throw Error(ErrorCode::kConfig, "istft: spectrogram shape inconsistent with its config");
  }
  const std::size_t n = cfg.fft_size;
  const std::size_t total = (spec.frames - 1) * cfg.hop + n;
  std::vector<double> acc(total, 0.0), envelope(total, 0.0);
  const std::vector<double> window = cfg.Window();
  std::vector<double> frame(n);
  for (std::size_t t = 0; t < spec.frames; ++t) {
    RealInverse(std::span(spec.data.data() + t * spec.bins, spec.bins), frame);
    const std::size_t base = t * cfg.hop;
    for (std::size_t i = 0; i < n; ++i) {
      acc[base + i] += frame[i] * window[i];
      envelope[base + i] += window[i] * window[i];
    }
  }
  Waveform out;
  out.sample_rate = spec.sample_rate;
  out.samples.resize(spec.signal_length);
  const std::size_t left = cfg.center ? n / 2 : 0;
  for (std::size_t i = 0; i < spec.signal_length; ++i) {
    const double env = envelope[left + i];
    out.samples[i] = env > 1e-10 ? acc[left + i] / env : 0.0;
  }
  return out;
}

ComplexSpectrogram WithMagnitude(const ComplexSpectrogram& phase, const RealMatrix& magnitude) {
  RequireSameShape(phase.frames, phase.bins, magnitude.rows, magnitude.cols, "with_magnitude");
  ComplexSpectrogram out = phase;
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    const double m = std::abs(phase.data[i]);
    const std::complex<double> unit = m > 0.0 ? phase.data[i] / m : std::complex<double>(1.0, 0.0);
    out.data[i] = magnitude.data[i] * unit;
  }
  return out;
}

}  // namespace progse
