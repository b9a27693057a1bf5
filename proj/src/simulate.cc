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


#include "progse/simulate.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "progse/common.h"
#include "progse/fft.h"

namespace progse {
namespace {

bool StrictlyInside(const Vec3& p, const Vec3& dims) {
  return p.x > 0.0 && p.x < dims.x && p.y > 0.0 && p.y < dims.y && p.z > 0.0 &&
         p.z < dims.z;
}

std::size_t DelayIndex(double distance, double speed, int sample_rate) {
  return static_cast<std::size_t>(std::llround(distance / speed * sample_rate));
}

}  // namespace

double Distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void RoomSpec::Validate() const {
  if (!(dimensions.x > 0.0 && dimensions.y > 0.0 && dimensions.z > 0.0)) {
    throw Error(ErrorCode::kInvalidGeometry, "room: dimensions must be positive");
  }
  if (!StrictlyInside(source, dimensions)) {
    throw Error(ErrorCode::kInvalidGeometry, "room: source outside the room");
  }
  if (!StrictlyInside(mic, dimensions)) {
    throw Error(ErrorCode::kInvalidGeometry, "room: microphone outside the room");
  }
  if (source == mic) {
    throw Error(ErrorCode::kInvalidGeometry, "room: source and microphone coincide");
  }
  if (!(rt60_target >= 0.0) || !std::isfinite(rt60_target)) {
    throw Error(ErrorCode::kInvalidArgument, "room: rt60_target must be finite and >= 0");
  }
  if (max_reflection_order < 0) {
    throw Error(ErrorCode::kInvalidArgument, "room: negative reflection order");
  }
  if (!(speed_of_sound > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "room: speed of sound must be positive");
  }
}

double RoomSpec::Volume() const { return dimensions.x * dimensions.y * dimensions.z; }

double RoomSpec::SurfaceArea() const {
  const auto& d = dimensions;
  return 2.0 * (d.x * d.y + d.x * d.z + d.y * d.z);
}

double RoomSpec::MinimumRt60() const {
  return 24.0 * std::numbers::ln10 * Volume() / (speed_of_sound * SurfaceArea());
}

double RoomSpec::Absorption() const {
  if (rt60_target == 0.0) return 1.0;
  const double alpha = MinimumRt60() / rt60_target;
  if (alpha > 1.0) {
    throw Error(ErrorCode::kInfeasibleRoom,
                "room: rt60 " + std::to_string(rt60_target) +
                    " s needs absorption " + std::to_string(alpha) +
                    " > 1 (shortest feasible rt60 is " +
                    std::to_string(MinimumRt60()) + " s)");
  }
  return alpha;
}

Rir GenerateRir(const RoomSpec& room, int sample_rate) {
  room.Validate();
  if (sample_rate <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "rir: sample rate must be positive");
  }
  const double beta = std::sqrt(1.0 - room.Absorption());
  const int order = beta == 0.0 ? 0 : room.max_reflection_order;
  const double c = room.speed_of_sound;
  const Vec3& L = room.dimensions;
  const Vec3& s = room.source;
  const Vec3& r = room.mic;

  Rir rir;
  rir.sample_rate = sample_rate;
  rir.room = room;
  rir.direct_path_index = DelayIndex(Distance(s, r), c, sample_rate);

  // Image coordinate along one axis: u even -> u*L + s, u odd -> (u+1)*L - s.
  // Either way the path meets |u| walls of that axis.
  auto image = [](int u, double len, double src) {
    return (u % 2 == 0) ? u * len + src : (u + 1) * len - src;
  };
  std::vector<double> taps(rir.direct_path_index + 1, 0.0);
  for (int ux = -order; ux <= order; ++ux) {
    const int rest_x = order - std::abs(ux);
    const double dx = image(ux, L.x, s.x) - r.x;
    for (int uy = -rest_x; uy <= rest_x; ++uy) {
      const int rest_y = rest_x - std::abs(uy);
      const double dy = image(uy, L.y, s.y) - r.y;
      for (int uz = -rest_y; uz <= rest_y; ++uz) {
        const double dz = image(uz, L.z, s.z) - r.z;
        const int reflections = std::abs(ux) + std::abs(uy) + std::abs(uz);
        const double gain = std::pow(beta, reflections);
        if (gain == 0.0) continue;
        const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
        const std::size_t idx = DelayIndex(d, c, sample_rate);
        if (idx >= taps.size()) taps.resize(idx + 1, 0.0);
        taps[idx] += gain / (4.0 * std::numbers::pi * d);
      }
    }
  }
  rir.taps = std::move(taps);
  return rir;
}

Waveform ApplyRir(const Waveform& dry, const Rir& rir) {
  if (dry.sample_rate != rir.sample_rate) {
    throw Error(ErrorCode::kSampleRateMismatch,
                "apply_rir: signal at " + std::to_string(dry.sample_rate) +
                    " Hz, rir at " + std::to_string(rir.sample_rate) + " Hz");
  }
  Waveform out;
  out.sample_rate = dry.sample_rate;
  out.samples = Convolve(dry.samples, rir.taps);
  out.samples.resize(dry.size());
  return out;
}

NoisyMix MixAtSnr(const Waveform& x, const Waveform& noise, double snr_db,
                  std::uint64_t seed) {
  RequireSameRate(x, noise, "mix_at_snr");
  if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
    throw Error(ErrorCode::kInvalidArgument, "mix_at_snr: snr must be a number or +inf");
  }
  if (x.samples.empty() || noise.samples.empty()) {
    throw Error(ErrorCode::kZeroPower, "mix_at_snr: empty input");
  }
  const double px = Power(x);
  if (!(px > 0.0)) throw Error(ErrorCode::kZeroPower, "mix_at_snr: silent speech");

  std::mt19937_64 rng(seed);
  const std::size_t n = x.size();
  const std::size_t m = noise.size();
  NoisyMix mix;
  mix.snr_db = snr_db;
  mix.noise.sample_rate = x.sample_rate;
  mix.noise.samples.resize(n);
  if (m >= n) {
    mix.offset = std::uniform_int_distribution<std::size_t>(0, m - n)(rng);
    for (std::size_t i = 0; i < n; ++i) mix.noise.samples[i] = noise.samples[mix.offset + i];
  } else {
    mix.offset = std::uniform_int_distribution<std::size_t>(0, m - 1)(rng);
    for (std::size_t i = 0; i < n; ++i) {
      mix.noise.samples[i] = noise.samples[(mix.offset + i) % m];
    }
  }
  const double pn = Power(mix.noise);
  if (!(pn > 0.0)) throw Error(ErrorCode::kZeroPower, "mix_at_snr: silent noise segment");

  mix.gain = std::isinf(snr_db) ? 0.0 : std::sqrt(px / (pn * std::pow(10.0, snr_db / 10.0)));
  for (double& v : mix.noise.samples) v *= mix.gain;
  mix.mixture = x;
  for (std::size_t i = 0; i < n; ++i) mix.mixture.samples[i] += mix.noise.samples[i];
  return mix;
}

std::vector<double> SchroederCurveDb(std::span<const double> taps) {
  std::vector<double> edc(taps.size());
  double acc = 0.0;
  for (std::size_t i = taps.size(); i-- > 0;) {
    acc += taps[i] * taps[i];
    edc[i] = acc;
  }
  const double total = acc;
  for (double& v : edc) {
    v = v > 0.0 ? 10.0 * std::log10(v / total) : -std::numeric_limits<double>::infinity();
  }
  return edc;
}

double EstimateRt60(std::span<const double> taps, int sample_rate) {
  if (sample_rate <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "rt60: sample rate must be positive");
  }
  double energy = 0.0;
  for (double t : taps) energy += t * t;
  if (!(energy > 0.0)) throw Error(ErrorCode::kZeroPower, "rt60: zero-energy response");

  const std::vector<double> edc = SchroederCurveDb(taps);
  constexpr double kUpper = -5.0;
  constexpr double kLower = -35.0;
  bool reached_lower = false;
  double sum_t = 0.0, sum_e = 0.0, sum_tt = 0.0, sum_te = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < edc.size(); ++i) {
    const double e = edc[i];
    if (e <= kLower) {
      reached_lower = true;
      break;
    }
    if (e <= kUpper) {
      const double t = static_cast<double>(i) / sample_rate;
      sum_t += t;
      sum_e += e;
      sum_tt += t * t;
      sum_te += t * e;
      ++count;
    }
  }
  if (!reached_lower || count < 2) {
    throw Error(ErrorCode::kInsufficientDecay,
                "rt60: energy decay curve does not span -5 to -35 dB");
  }
  const double n = static_cast<double>(count);
  const double denom = n * sum_tt - sum_t * sum_t;
  const double slope = denom != 0.0 ? (n * sum_te - sum_t * sum_e) / denom : 0.0;
  if (!(slope < 0.0)) {
    throw Error(ErrorCode::kInsufficientDecay, "rt60: non-decaying energy curve");
  }
  return -60.0 / slope;
}

double EstimateRt60(const Rir& rir) { return EstimateRt60(rir.taps, rir.sample_rate); }

}  // namespace progse
