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
#include "progse/objectives.h"

namespace progse {
namespace {

Waveform Noise(std::size_t n, std::uint64_t seed, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sd);
  Waveform w{std::vector<double>(n), 16000};
  for (double& x : w.samples) x = g(rng);
  return w;
}

TEST(SiSdr, ScaleInvariant) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int i = 0; i < 200; ++i) {
    const Waveform ref = Noise(256, 2 * i), est = Noise(256, 2 * i + 1);
    Waveform scaled = est;
    const double c = scale(rng);
    for (double& v : scaled.samples) v *= c;
    EXPECT_NEAR(SiSdr(scaled, ref), SiSdr(est, ref), 1e-9);
  }
}

TEST(SiSdr, OrthogonalNoiseIsZeroDb) {
  const Waveform ref = Noise(1000, 3);
  Waveform n = Noise(1000, 4);
  const double k = oracle::Dot(n.samples, ref.samples) / oracle::Dot(ref.samples, ref.samples);
  for (std::size_t i = 0; i < n.size(); ++i) n.samples[i] -= k * ref.samples[i];
  const double rescale = std::sqrt(oracle::Dot(ref.samples, ref.samples) / oracle::Dot(n.samples, n.samples));
  Waveform est = ref;
  for (std::size_t i = 0; i < est.size(); ++i) est.samples[i] += rescale * n.samples[i];
  EXPECT_NEAR(SiSdr(est, ref), 0.0, 1e-6);
}

TEST(SiSdr, CapAndErrors) {
  const Waveform ref = Noise(100, 5);
  EXPECT_EQ(SiSdr(ref, ref), kSiSdrCapDb);
  Waveform half = ref;
  for (double& v : half.samples) v *= 0.5;
  EXPECT_EQ(SiSdr(half, ref), kSiSdrCapDb);
  EXPECT_THROW(SiSdr(Noise(99, 1), ref), Error);
  Waveform zero{std::vector<double>(100, 0.0), 16000};
  EXPECT_THROW(SiSdr(ref, zero), Error);
}

TEST(WeightMap, HandCase) {
  RealMatrix ref(2, 2), den(2, 2);
  ref.data = {2.0, 2.0, 3.0, 3.0};
  const std::vector<double> delta{-1.0, 0.5, 2.0, -2.0};
  for (std::size_t i = 0; i < 4; ++i) den.data[i] = ref.data[i] + delta[i];
  const WeightMap w = ComputeWeightMap(den, ref);
  const std::vector<double> want{1.5, 1.125, 1.5, 2.0};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(w.alpha.data[i], want[i], 1e-12);
}

TEST(WeightMap, OnesWhenEqualOrBelowThreshold) {
  RealMatrix ref(3, 3, 0.7);
  EXPECT_EQ(ComputeWeightMap(ref, ref).alpha, RealMatrix(3, 3, 1.0));
  ref(1, 1) = 5e-9;
  ref(2, 0) = 1e-8;
  RealMatrix den = ref;
  den(1, 1) = 4.0;
  den(2, 0) = -3.0;
  den(0, 0) = 0.2;
  const WeightMap w = ComputeWeightMap(den, ref);
  EXPECT_EQ(w.alpha(1, 1), 1.0);
  EXPECT_EQ(w.alpha(2, 0), 1.0);
  EXPECT_EQ(w.alpha(0, 0), 2.0);
  EXPECT_EQ(w.mask(1, 1), 0);
}

TEST(DnLoss, LambdaIsOneThousand) {
  EXPECT_EQ(kDefaultDnLambda, 1000.0);
  const Waveform ref = Noise(2048, 6), est = Noise(2048, 7);
  StftConfig cfg;
  const RealMatrix a = Stft(est, cfg).Magnitude(), b = Stft(ref, cfg).Magnitude();
  double l1 = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) l1 += std::abs(a.data[i] - b.data[i]);
  l1 /= static_cast<double>(a.data.size());
  EXPECT_NEAR(DnLoss(est, ref, cfg), -SiSdr(est, ref) + 1000.0 * l1, 1e-9);
  EXPECT_NEAR(DnLoss(est, ref, cfg, 0.0), -SiSdr(est, ref), 1e-12);
  EXPECT_GE(WeightedDnLoss(est, ref, cfg), DnLoss(est, ref, cfg));
}

TEST(CompositeLoss, Weights) {
  EXPECT_EQ(CodecCompositeLoss({1.0, 1.0, 1.0, 1.0}), 32.0);
  EXPECT_EQ(CodecCompositeLoss({0.0, 0.0, 0.0, 0.5}), 5.0);
  EXPECT_THROW(CodecCompositeLoss({NAN, 0.0, 0.0, 0.0}), Error);
}

TEST(MrStft, ZeroForIdenticalPositiveOtherwise) {
  const Waveform a = Noise(8000, 8), b = Noise(8000, 9);
  const MrStftTerms same = MrStftLossTerms(a, a, MrStftConfig{});
  EXPECT_EQ(same.total, 0.0);
  EXPECT_EQ(same.spectral_convergence.size(), 3u);
  EXPECT_GT(MrStftLoss(a, b), 0.5);
  MrStftConfig bad;
  bad.resolutions.clear();
  EXPECT_THROW(MrStftLoss(a, b, bad), Error);
}

TEST(MrStft, SpectralConvergenceOfScaledSignal) {
  // |Y_hat| = 0.5 |Y| gives SC = 0.5 on every scale
  const Waveform ref = Noise(8000, 10);
  Waveform est = ref;
  for (double& v : est.samples) v *= 0.5;
  const MrStftTerms t = MrStftLossTerms(est, ref, MrStftConfig{});
  for (double sc : t.spectral_convergence) EXPECT_NEAR(sc, 0.5, 1e-9);
}

TEST(Adversarial, HingeAndFeatureMatch) {
  const std::vector<double> s{-2.0, 0.5, 3.0};
  EXPECT_DOUBLE_EQ(HingeAdversarialLoss(s, HingeSide::kGenerator), (3.0 + 0.5 + 0.0) / 3.0);
  EXPECT_DOUBLE_EQ(HingeAdversarialLoss(s, HingeSide::kDiscriminatorFake), (0.0 + 1.5 + 4.0) / 3.0);
  RealMatrix a(1, 2, 1.0), b(1, 2, 3.0);
  EXPECT_EQ(FeatureMatchLoss({a, a}, {b, a}), 1.0);
  EXPECT_EQ(CommitmentLoss(a, b), 4.0);
  EXPECT_THROW(FeatureMatchLoss({a}, {}), Error);
}

TEST(Lsd, ZeroForIdenticalAndKnownGain) {
  const Waveform a = Noise(4000, 11);
  EXPECT_EQ(LogSpectralDistance(a, a, StftConfig{}), 0.0);
  Waveform b = a;
  for (double& v : b.samples) v *= 10.0;
  EXPECT_NEAR(LogSpectralDistance(b, a, StftConfig{}), 20.0, 1e-9);
}

}  // namespace
}  // namespace progse
