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


#include "progse/objectives.h"

#include <algorithm>
#include <cmath>

namespace progse {
namespace {

constexpr double kLogFloor = 1e-7;
constexpr double kLsdFloor = 1e-10;

void CheckLengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::kShapeMismatch, std::string(what) + ": lengths differ (" +
                                               std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

std::pair<RealMatrix, RealMatrix> Magnitudes(const Waveform& est, const Waveform& ref,
                                             const StftConfig& cfg) {
  RequireSameRate(est, ref, "magnitudes");
  CheckLengths(est.size(), ref.size(), "magnitudes");
  return {Stft(est, cfg).Magnitude(), Stft(ref, cfg).Magnitude()};
}

}  // namespace

double SiSdr(std::span<const double> est, std::span<const double> ref) {
  CheckLengths(est.size(), ref.size(), "si_sdr");
  double dot = 0.0, ref_energy = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    dot += est[i] * ref[i];
    ref_energy += ref[i] * ref[i];
  }
  if (!(ref_energy > 0.0)) throw Error(ErrorCode::kZeroPower, "si_sdr: zero-energy reference");
  const double alpha = dot / ref_energy;
  double target = 0.0, residual = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double t = alpha * ref[i];
    const double e = t - est[i];
    target += t * t;
    residual += e * e;
  }
  if (!(target > 0.0)) return -kSiSdrCapDb;
  const double db = 10.0 * std::log10(target / (residual + 1e-12 * target));
  return std::min(db, kSiSdrCapDb);
}

double SiSdr(const Waveform& est, const Waveform& ref) {
  RequireSameRate(est, ref, "si_sdr");
  return SiSdr(std::span<const double>(est.samples), std::span<const double>(ref.samples));
}

double MeanAbsDifference(const RealMatrix& a, const RealMatrix& b) {
  RequireSameShape(a.rows, a.cols, b.rows, b.cols, "l1");
  if (a.data.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) acc += std::abs(a.data[i] - b.data[i]);
  return acc / static_cast<double>(a.data.size());
}

double DnLoss(const Waveform& est, const Waveform& ref, const StftConfig& cfg, double lambda) {
  auto [mag_est, mag_ref] = Magnitudes(est, ref, cfg);
  return -SiSdr(est, ref) + lambda * MeanAbsDifference(mag_est, mag_ref);
}

WeightMap ComputeWeightMap(const RealMatrix& mag_denoised, const RealMatrix& mag_ref,
                           double threshold) {
  RequireSameShape(mag_denoised.rows, mag_denoised.cols, mag_ref.rows, mag_ref.cols, "weight_map");
  WeightMap w;
  w.threshold = threshold;
  w.alpha = RealMatrix(mag_ref.rows, mag_ref.cols, 1.0);
  w.mask = Matrix<std::uint8_t>(mag_ref.rows, mag_ref.cols, 0);
  std::vector<double> emphasis(mag_ref.data.size(), 0.0);
  double peak = 0.0;
  for (std::size_t i = 0; i < emphasis.size(); ++i) {
    const double diff = mag_denoised.data[i] - mag_ref.data[i];
    emphasis[i] = std::abs(diff < 0.0 ? 2.0 * diff : diff);
    if (mag_ref.data[i] > threshold) {
      w.mask.data[i] = 1;
      peak = std::max(peak, emphasis[i]);
    }
  }
  if (peak > 0.0) {
    for (std::size_t i = 0; i < emphasis.size(); ++i) {
      if (w.mask.data[i]) w.alpha.data[i] = 1.0 + emphasis[i] / peak;
    }
  }
  return w;
}

double WeightedMagnitudeL1(const RealMatrix& mag_denoised, const RealMatrix& mag_ref,
                           double threshold) {
  const WeightMap w = ComputeWeightMap(mag_denoised, mag_ref, threshold);
  if (mag_ref.data.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < mag_ref.data.size(); ++i) {
    acc += w.alpha.data[i] * std::abs(mag_denoised.data[i] - mag_ref.data[i]);
  }
  return acc / static_cast<double>(mag_ref.data.size());
}

double WeightedDnLoss(const Waveform& est, const Waveform& ref, const StftConfig& cfg,
                      double lambda) {
  auto [mag_est, mag_ref] = Magnitudes(est, ref, cfg);
  return -SiSdr(est, ref) + lambda * WeightedMagnitudeL1(mag_est, mag_ref);
}

void MrStftConfig::Validate() const {
  if (resolutions.empty()) throw Error(ErrorCode::kConfig, "mr_stft: no resolutions");
  if (subbands == 0) throw Error(ErrorCode::kConfig, "mr_stft: subbands must be >= 1");
  for (const Resolution& r : resolutions) {
    StftConfig{r.fft_size, r.hop, r.window, true}.Validate();
    if (subbands > r.fft_size / 2 + 1) {
      throw Error(ErrorCode::kConfig, "mr_stft: more sub-bands than frequency bins");
    }
  }
}

MrStftTerms MrStftLossTerms(const Waveform& est, const Waveform& ref, const MrStftConfig& cfg) {
  cfg.Validate();
  MrStftTerms terms;
  for (const Resolution& res : cfg.resolutions) {
    const StftConfig stft{res.fft_size, res.hop, res.window, true};
    auto [mag_est, mag_ref] = Magnitudes(est, ref, stft);
    const std::size_t bins = mag_ref.cols;

    // Scale 0 is the full band; scales 1..subbands split the bins evenly.
    double sc_sum = 0.0, lm_sum = 0.0;
    const std::size_t scales = cfg.subbands + 1;
    for (std::size_t s = 0; s < scales; ++s) {
      const std::size_t lo = s == 0 ? 0 : (s - 1) * bins / cfg.subbands;
      const std::size_t hi = s == 0 ? bins : s * bins / cfg.subbands;
      double diff_sq = 0.0, ref_sq = 0.0, log_abs = 0.0;
      for (std::size_t t = 0; t < mag_ref.rows; ++t) {
        for (std::size_t f = lo; f < hi; ++f) {
          const double a = mag_est(t, f), b = mag_ref(t, f);
          diff_sq += (b - a) * (b - a);
          ref_sq += b * b;
          log_abs += std::abs(std::log(std::max(b, kLogFloor)) - std::log(std::max(a, kLogFloor)));
        }
      }
      const double cells = static_cast<double>(mag_ref.rows * (hi - lo));
      sc_sum += diff_sq == 0.0 ? 0.0 : std::sqrt(diff_sq) / std::sqrt(std::max(ref_sq, 1e-24));
      lm_sum += log_abs / cells;
    }
    terms.spectral_convergence.push_back(sc_sum / static_cast<double>(scales));
    terms.log_magnitude.push_back(lm_sum / static_cast<double>(scales));
  }
  double total = 0.0;
  for (std::size_t r = 0; r < cfg.resolutions.size(); ++r) {
    total += terms.spectral_convergence[r] + terms.log_magnitude[r];
  }
  terms.total = total / static_cast<double>(cfg.resolutions.size());
  return terms;
}

double MrStftLoss(const Waveform& est, const Waveform& ref, const MrStftConfig& cfg) {
  return MrStftLossTerms(est, ref, cfg).total;
}

double CommitmentLoss(const RealMatrix& z, const RealMatrix& zq) {
  RequireSameShape(z.rows, z.cols, zq.rows, zq.cols, "commitment_loss");
  if (z.data.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < z.data.size(); ++i) {
    const double d = z.data[i] - zq.data[i];
    acc += d * d;
  }
  return acc / static_cast<double>(z.data.size());
}

double HingeAdversarialLoss(std::span<const double> scores, HingeSide side) {
  if (scores.empty()) throw Error(ErrorCode::kInvalidArgument, "hinge loss: no scores");
  double acc = 0.0;
  for (double s : scores) {
    acc += side == HingeSide::kDiscriminatorFake ? std::max(0.0, 1.0 + s) : std::max(0.0, 1.0 - s);
  }
  return acc / static_cast<double>(scores.size());
}

double FeatureMatchLoss(const std::vector<RealMatrix>& est, const std::vector<RealMatrix>& ref) {
  if (est.size() != ref.size()) {
    throw Error(ErrorCode::kShapeMismatch, "feature_match_loss: layer counts differ");
  }
  if (est.empty()) throw Error(ErrorCode::kInvalidArgument, "feature_match_loss: no layers");
  double acc = 0.0;
  for (std::size_t l = 0; l < est.size(); ++l) acc += MeanAbsDifference(est[l], ref[l]);
  return acc / static_cast<double>(est.size());
}

double CodecCompositeLoss(const CodecLossParts& p, const LossWeights& w) {
  for (double v : {p.rec, p.adv, p.feat, p.com}) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "composite loss: non-finite part");
  }
  return w.rec * p.rec + w.adv * p.adv + w.feat * p.feat + w.com * p.com;
}

double LogSpectralDistance(const Waveform& est, const Waveform& ref, const StftConfig& cfg) {
  auto [mag_est, mag_ref] = Magnitudes(est, ref, cfg);
  if (mag_ref.data.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < mag_ref.data.size(); ++i) {
    const double d = 20.0 * std::log10(std::max(mag_est.data[i], kLsdFloor)) -
                     20.0 * std::log10(std::max(mag_ref.data[i], kLsdFloor));
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(mag_ref.data.size()));
}

}  // namespace progse
