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


#ifndef PROGSE_SIMULATE_H_
#define PROGSE_SIMULATE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "progse/waveform.h"

namespace progse {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  bool operator==(const Vec3&) const = default;
};

double Distance(const Vec3& a, const Vec3& b);

// Shoebox room for the image-source model. Wall absorption is uniform over
// the six surfaces and derived from rt60_target with Sabine's formula.
struct RoomSpec {
  Vec3 dimensions{6.0, 5.0, 3.0};
  Vec3 source{1.0, 1.0, 1.5};
  Vec3 mic{4.4, 1.0, 1.5};
  double rt60_target = 0.0;  // seconds; 0 means anechoic
  int max_reflection_order = 30;
  double speed_of_sound = 340.0;

  // kInvalidGeometry for non-positive dimensions, positions not strictly
  // inside the room, or coincident source and mic; kInvalidArgument for a
  // negative RT60, negative order or non-positive speed of sound.
  void Validate() const;
  double Volume() const;
  double SurfaceArea() const;
  // Sabine absorption coefficient for rt60_target; 1 when rt60_target is 0.
  // Throws kInfeasibleRoom when the coefficient would exceed 1.
  double Absorption() const;
  // Shortest RT60 the room can realize (absorption = 1).
  double MinimumRt60() const;
};

struct Rir {
  std::vector<double> taps;
  int sample_rate = 16000;
  RoomSpec room;
  std::size_t direct_path_index = 0;
};

// Image-source RIR (Allen & Berkley). Every image contributes
// beta^reflections / (4 pi d) at the nearest-sample delay d / c * fs.
Rir GenerateRir(const RoomSpec& room, int sample_rate);

// x = s * h, truncated to the length of s.
Waveform ApplyRir(const Waveform& dry, const Rir& rir);

struct NoisyMix {
  Waveform noise;    // cropped or looped segment after gain
  Waveform mixture;  // reverberant + noise
  double gain = 0.0;
  double snr_db = 0.0;
  std::size_t offset = 0;  // start of the noise segment in the source noise
};

// Crops (or loops) `noise` to the length of `x` from a seeded random offset
// and scales it so that 10 log10(P_x / P_noise) equals snr_db. An infinite
// snr_db yields mixture == x and a zero noise track.
NoisyMix MixAtSnr(const Waveform& x, const Waveform& noise, double snr_db,
                  std::uint64_t seed);

// Schroeder backward integration; line fit of the energy decay curve
// between -5 and -35 dB, extrapolated to 60 dB.
double EstimateRt60(std::span<const double> taps, int sample_rate);
double EstimateRt60(const Rir& rir);

// Energy decay curve in dB relative to total energy (-inf after the last
// nonzero tap).
std::vector<double> SchroederCurveDb(std::span<const double> taps);

}  // namespace progse

#endif  // PROGSE_SIMULATE_H_
