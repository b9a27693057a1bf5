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


#ifndef PROGSE_OBJECTIVES_H_
#define PROGSE_OBJECTIVES_H_

#include <span>
#include <utility>
#include <vector>

#include "progse/common.h"
#include "progse/stft.h"
#include "progse/waveform.h"

namespace progse {

inline constexpr double kSiSdrCapDb = 120.0;
inline constexpr double kDefaultDnLambda = 1000.0;
inline constexpr double kWeightThreshold = 1e-8;

// Scale-invariant SDR in dB: alpha = <est, ref> / ||ref||^2 and
// 10 log10(||alpha ref||^2 / (||alpha ref - est||^2 + 1e-12 ||alpha ref||^2)),
// capped at +120 dB (the relative floor makes est == c * ref hit the cap).
double SiSdr(std::span<const double> est, std::span<const double> ref);
double SiSdr(const Waveform& est, const Waveform& ref);

// Mean over cells of ||A| - |B||.
double MeanAbsDifference(const RealMatrix& a, const RealMatrix& b);

// -SI-SDR(est, ref) + lambda * mean |(|EST| - |REF|)|.
double DnLoss(const Waveform& est, const Waveform& ref, const StftConfig& cfg,
              double lambda = kDefaultDnLambda);

// Emphasis weights for the denoising loss. diff = |X_hat| - |X|, negative
// differences doubled; alpha = 1 + |diff'| / max|diff'| on cells whose
// reference magnitude exceeds the threshold (max taken over those cells),
// and alpha = 1 elsewhere.
struct WeightMap {
  RealMatrix alpha;
  Matrix<std::uint8_t> mask;
  double threshold = kWeightThreshold;
};

WeightMap ComputeWeightMap(const RealMatrix& mag_denoised, const RealMatrix& mag_ref,
                           double threshold = kWeightThreshold);

// -SI-SDR + lambda * mean(alpha * |diff|).
double WeightedDnLoss(const Waveform& est, const Waveform& ref, const StftConfig& cfg,
                      double lambda = kDefaultDnLambda);
// The weighted L1 term alone, on magnitudes.
double WeightedMagnitudeL1(const RealMatrix& mag_denoised, const RealMatrix& mag_ref,
                           double threshold = kWeightThreshold);

struct Resolution {
  std::size_t fft_size;
  std::size_t hop;
  WindowType window = WindowType::kHann;
};

struct MrStftConfig {
  std::vector<Resolution> resolutions{{512, 128, WindowType::kHann},
                                      {1024, 256, WindowType::kHann},
                                      {2048, 512, WindowType::kHann}};
  std::size_t subbands = 4;

  void Validate() const;
};

struct MrStftTerms {
  // Per resolution, averaged over the full band and each sub-band.
  std::vector<double> spectral_convergence;
  std::vector<double> log_magnitude;
  double total = 0.0;
};

// Spectral convergence ||Y| - |Y_hat||_F / ||Y||_F plus mean |log|Y| - log|Y_hat||
// per scale; the scales are the full band and `subbands` equal bin ranges.
MrStftTerms MrStftLossTerms(const Waveform& est, const Waveform& ref, const MrStftConfig& cfg);
double MrStftLoss(const Waveform& est, const Waveform& ref, const MrStftConfig& cfg = {});

double CommitmentLoss(const RealMatrix& z, const RealMatrix& zq);

enum class HingeSide { kGenerator, kDiscriminatorReal, kDiscriminatorFake };
double HingeAdversarialLoss(std::span<const double> scores, HingeSide side);

// Mean absolute difference per layer, averaged over layers.
double FeatureMatchLoss(const std::vector<RealMatrix>& est, const std::vector<RealMatrix>& ref);

struct LossWeights {
  double rec = 1.0;
  double adv = 1.0;
  double feat = 20.0;
  double com = 10.0;
};

struct CodecLossParts {
  double rec = 0.0;
  double adv = 0.0;
  double feat = 0.0;
  double com = 0.0;
};

double CodecCompositeLoss(const CodecLossParts& parts, const LossWeights& weights = {});

// RMS over T-F cells of the dB difference of magnitudes (floored at 1e-10).
double LogSpectralDistance(const Waveform& est, const Waveform& ref, const StftConfig& cfg);

}  // namespace progse

#endif  // PROGSE_OBJECTIVES_H_
