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


#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.h"
#include "progse/fft.h"
#include "progse/mask.h"
#include "progse/objectives.h"
#include "progse/stft.h"
#include "progse/wav.h"

namespace progse {
namespace {

std::vector<double> Noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

double RelativeError(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

TEST(Fft, MatchesNaiveDft) {
  for (std::size_t n : {8u, 64u, 512u}) {
    const std::vector<double> x = Noise(n, n);
    std::vector<std::complex<double>> got(n / 2 + 1);
    RealForward(x, got);
    const auto want = oracle::Dft(x);
    for (std::size_t k = 0; k < got.size(); ++k) EXPECT_LT(std::abs(got[k] - want[k]), 1e-9 * n);
    std::vector<double> back(n);
    RealInverse(got, back);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(back[i], x[i], 1e-12);
  }
}

TEST(Fft, ConvolutionsAgreeWithOracle) {
  const std::vector<double> a = Noise(300, 1), b = Noise(41, 2);
  const auto want = oracle::Convolve(a, b);
  const auto direct = ConvolveDirect(a, b);
  const auto fast = ConvolveFft(a, b);
  const auto picked = Convolve(a, b);
  ASSERT_EQ(direct.size(), want.size());
  ASSERT_EQ(fast.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_NEAR(direct[i], want[i], 1e-12);
    EXPECT_NEAR(fast[i], want[i], 1e-10);
    EXPECT_NEAR(picked[i], want[i], 1e-10);
  }
  EXPECT_EQ(NextPowerOfTwo(513), 1024u);
  EXPECT_TRUE(IsPowerOfTwo(256));
  EXPECT_FALSE(IsPowerOfTwo(0));
}

TEST(Stft, RoundTripShippedConfigs) {
  std::vector<StftConfig> configs{StftConfig{}};
  for (const Resolution& r : MrStftConfig{}.resolutions) {
    configs.push_back({r.fft_size, r.hop, r.window, true});
  }
  for (const StftConfig& cfg : configs) {
    for (std::size_t len : {1000u, 4096u, 16001u}) {
      const Waveform x{Noise(len, len), 16000};
      const Waveform y = Istft(Stft(x, cfg));
      ASSERT_EQ(y.size(), x.size());
      EXPECT_LE(RelativeError(y.samples, x.samples), 1e-6) << cfg.fft_size << " " << len;
    }
  }
}

TEST(Stft, FrameMatchesDirectDft) {
  StftConfig cfg;
  const Waveform x{Noise(2000, 3), 16000};
  const ComplexSpectrogram spec = Stft(x, cfg);
  const std::vector<double> w = cfg.Window();
  // frame 4 starts at 4 * hop - fft_size / 2 in the unpadded signal
  std::vector<double> frame(cfg.fft_size);
  const long start = 4 * static_cast<long>(cfg.hop) - static_cast<long>(cfg.fft_size / 2);
  for (std::size_t i = 0; i < cfg.fft_size; ++i) frame[i] = x.samples[start + i] * w[i];
  const auto want = oracle::Dft(frame);
  for (std::size_t k = 0; k < spec.bins; ++k) EXPECT_LT(std::abs(spec.at(4, k) - want[k]), 1e-9);
}

TEST(Stft, RejectsBadConfigs) {
  EXPECT_THROW((StftConfig{500, 125, WindowType::kHann, true}.Validate()), Error);
  EXPECT_THROW((StftConfig{512, 0, WindowType::kHann, true}.Validate()), Error);
  EXPECT_THROW((StftConfig{512, 384, WindowType::kHann, true}.Validate()), Error);
}

TEST(Mask, OracleCrmRecoversTarget) {
  StftConfig cfg;
  const Waveform y{Noise(4000, 4), 16000};
  const Waveform x{Noise(4000, 5), 16000};
  const ComplexSpectrogram ys = Stft(y, cfg), xs = Stft(x, cfg);
  const ComplexSpectrogram est = ApplyMask(ys, ComputeCrm(ys, xs));
  for (std::size_t i = 0; i < est.data.size(); ++i) EXPECT_LT(std::abs(est.data[i] - xs.data[i]), 1e-9);
  EXPECT_GE(SiSdr(Istft(est), x), 100.0);
}

TEST(Mask, BoundClampsMagnitudeKeepsPhase) {
  StftConfig cfg;
  const ComplexSpectrogram ys = Stft(Waveform{Noise(2000, 6), 16000}, cfg);
  const ComplexSpectrogram xs = Stft(Waveform{Noise(2000, 7), 16000}, cfg);
  const ComplexMask free = ComputeCrm(ys, xs);
  const ComplexMask bounded = ComputeCrm(ys, xs, 1.0);
  for (std::size_t i = 0; i < free.data.size(); ++i) {
    EXPECT_LE(std::abs(bounded.data[i]), 1.0 + 1e-12);
    if (std::abs(free.data[i]) > 1e-6) {
      EXPECT_NEAR(std::arg(bounded.data[i]), std::arg(free.data[i]), 1e-9);
    }
  }
}

TEST(Mask, ZeroMixtureBinsGiveZeroMask) {
  StftConfig cfg;
  const ComplexSpectrogram ys = Stft(Waveform{std::vector<double>(1000, 0.0), 16000}, cfg);
  const ComplexSpectrogram xs = Stft(Waveform{Noise(1000, 8), 16000}, cfg);
  for (const auto& m : ComputeCrm(ys, xs).data) EXPECT_EQ(m, std::complex<double>(0.0, 0.0));
}

TEST(Fusion, BetaEndpointsAndAffine) {
  RealMatrix a(2, 3, 2.0), b(2, 3, 6.0);
  EXPECT_EQ(FuseFeatures(a, b, {1.0, {}}), a);
  EXPECT_EQ(FuseFeatures(a, b, {0.0, {}}), b);
  EXPECT_EQ(FuseFeatures(a, b, {0.25, {}})(1, 2), 5.0);
  FusionConfig affine;
  affine.affine = ParseAffineFusion("# w_d w_m bias\n1 0 0\n0 1 0\n0.5 0.5 1\n");
  const RealMatrix f = FuseFeatures(a, b, affine);
  EXPECT_EQ(f(0, 0), 2.0);
  EXPECT_EQ(f(0, 1), 6.0);
  EXPECT_EQ(f(0, 2), 5.0);
  EXPECT_EQ(ParseAffineFusion(FormatAffineFusion(*affine.affine)).bias, affine.affine->bias);
  EXPECT_THROW(FuseFeatures(a, b, {1.5, {}}), Error);
  EXPECT_THROW(ParseAffineFusion("1 2\n"), Error);
}

TEST(Wav, Float32RoundTripIsExactForFloats) {
  Waveform w{{0.5, -0.25, 0.125, 1.5, -3.0}, 22050};
  const Waveform back = DecodeWav(EncodeWav(w, WavFormat::kFloat32));
  EXPECT_EQ(back.samples, w.samples);
  EXPECT_EQ(back.sample_rate, 22050);
}

TEST(Wav, Pcm16QuantizesAndClips) {
  Waveform w{{0.0, 0.5, -1.0, 2.0, 1.0 / 32768.0}, 16000};
  const Waveform back = DecodeWav(EncodeWav(w, WavFormat::kPcm16));
  EXPECT_EQ(back.samples[0], 0.0);
  EXPECT_EQ(back.samples[1], 0.5);
  EXPECT_EQ(back.samples[2], -1.0);
  EXPECT_EQ(back.samples[3], 32767.0 / 32768.0);
  EXPECT_EQ(back.samples[4], 1.0 / 32768.0);
}

TEST(Wav, RejectsGarbage) {
  std::vector<std::uint8_t> junk{'R', 'I', 'F', 'F', 0, 0};
  EXPECT_THROW(DecodeWav(junk), Error);
  auto bytes = EncodeWav(Waveform{{0.1, 0.2}, 16000}, WavFormat::kPcm16);
  bytes.resize(bytes.size() - 3);
  EXPECT_THROW(DecodeWav(bytes), Error);
}

}  // namespace
}  // namespace progse
