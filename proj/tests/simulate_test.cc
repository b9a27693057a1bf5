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
#include <filesystem>
#include <numbers>

#include "oracles.h"
#include "progse/common.h"
#include "progse/dataset.h"
#include "progse/simulate.h"
#include "progse/wav.h"

namespace progse {
namespace {

namespace fs = std::filesystem;

fs::path TempDir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("progse_sim_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TEST(Rir, OrderZeroIsSingleTap) {
  RoomSpec room;
  room.max_reflection_order = 0;
  const Rir rir = GenerateRir(room, 16000);
  const double d = std::sqrt(3.4 * 3.4);
  const auto index = static_cast<std::size_t>(std::llround(d / 340.0 * 16000.0));
  EXPECT_EQ(rir.direct_path_index, index);
  for (std::size_t i = 0; i < rir.taps.size(); ++i) {
    if (i == index) {
      EXPECT_DOUBLE_EQ(rir.taps[i], 1.0 / (4.0 * std::numbers::pi * d));
    } else {
      EXPECT_EQ(rir.taps[i], 0.0);
    }
  }
}

TEST(Rir, AnechoicHasNoReflections) {
  RoomSpec room;
  room.rt60_target = 0.0;
  const Rir rir = GenerateRir(room, 16000);
  std::size_t nonzero = 0;
  for (double v : rir.taps) nonzero += v != 0.0;
  EXPECT_EQ(nonzero, 1u);
}

TEST(Rir, Rt60WithinThirtyPercent) {
  RoomSpec room;
  room.rt60_target = 0.3;
  const double est = EstimateRt60(GenerateRir(room, 16000));
  EXPECT_NEAR(est, 0.3, 0.09);
}

TEST(Rir, FirstReflectionFromFloor) {
  RoomSpec room;
  room.rt60_target = 0.4;
  room.max_reflection_order = 1;
  const Rir rir = GenerateRir(room, 16000);
  // floor and ceiling images are both 3 m off in z, so they share a tap
  const double d = std::sqrt(3.4 * 3.4 + 3.0 * 3.0);
  const auto index = static_cast<std::size_t>(std::llround(d / 340.0 * 16000.0));
  const double beta = std::sqrt(1.0 - room.Absorption());
  EXPECT_NEAR(rir.taps[index], 2.0 * beta / (4.0 * std::numbers::pi * d), 1e-15);
}

TEST(Rir, GeometryErrors) {
  RoomSpec room;
  room.mic = room.source;
  EXPECT_THROW(GenerateRir(room, 16000), Error);
  RoomSpec outside;
  outside.source = {7.0, 1.0, 1.0};
  try {
    GenerateRir(outside, 16000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidGeometry);
  }
  RoomSpec fast;
  fast.rt60_target = 0.01;
  try {
    GenerateRir(fast, 16000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasibleRoom);
  }
}

TEST(Rir, ApplyMatchesDirectConvolution) {
  RoomSpec room;
  room.rt60_target = 0.2;
  room.max_reflection_order = 3;
  const Rir rir = GenerateRir(room, 16000);
  const Waveform dry = SyntheticSpeech(16000, 2000, 3);
  const Waveform wet = ApplyRir(dry, rir);
  const std::vector<double> ref = oracle::Convolve(dry.samples, rir.taps);
  ASSERT_EQ(wet.size(), dry.size());
  for (std::size_t i = 0; i < wet.size(); ++i) EXPECT_NEAR(wet.samples[i], ref[i], 1e-12);
}

TEST(Mix, AchievedSnrExact) {
  const Waveform x = SyntheticSpeech(16000, 8000, 1);
  const Waveform n = WhiteNoise(16000, 3000, 2);
  for (double snr : {-5.0, 0.0, 5.0, 17.5}) {
    const NoisyMix mix = MixAtSnr(x, n, snr, 9);
    const double achieved =
        10.0 * std::log10(oracle::Power(x.samples) / oracle::Power(mix.noise.samples));
    EXPECT_NEAR(achieved, snr, 1e-6);
    for (std::size_t i = 0; i < x.size(); ++i) {
      EXPECT_EQ(mix.mixture.samples[i], x.samples[i] + mix.noise.samples[i]);
    }
  }
}

TEST(Mix, InfiniteSnrIsClean) {
  const Waveform x = SyntheticSpeech(16000, 1000, 1);
  const NoisyMix mix = MixAtSnr(x, WhiteNoise(16000, 1000, 2), INFINITY, 0);
  EXPECT_EQ(mix.mixture.samples, x.samples);
}

TEST(Mix, SilentInputsRejected) {
  const Waveform x = SyntheticSpeech(16000, 1000, 1);
  Waveform silent{std::vector<double>(1000, 0.0), 16000};
  try {
    MixAtSnr(x, silent, 0.0, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroPower);
  }
}

TEST(Rt60, InsufficientDecay) {
  std::vector<double> flat(1000, 1.0);
  try {
    EstimateRt60(flat, 16000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientDecay);
  }
}

TEST(Rt60, ExponentialDecayRecovered) {
  // energy envelope exp(-13.8155 t / T) decays 60 dB in T
  const double t60 = 0.5;
  std::vector<double> taps(16000);
  for (std::size_t i = 0; i < taps.size(); ++i) {
    taps[i] = std::pow(10.0, -3.0 * (i / 16000.0) / t60);
  }
  EXPECT_NEAR(EstimateRt60(taps, 16000), t60, 0.01);
}

TEST(Dataset, RoundRobinLevelsAndDeterminism) {
  DatasetConfig cfg;
  cfg.count = 3;
  cfg.segment_seconds = 0.25;
  cfg.snr_db = ValueSampler::Levels({-5.0, 0.0, 5.0});
  const fs::path a = TempDir("a"), b = TempDir("b");
  const Manifest ma = ReadManifest(SynthesizeDataset(cfg, 42, a.string()));
  SynthesizeDataset(cfg, 42, b.string());
  ASSERT_EQ(ma.rows.size(), 3u);
  EXPECT_EQ(ma.rows[0].snr_db, -5.0);
  EXPECT_EQ(ma.rows[1].snr_db, 0.0);
  EXPECT_EQ(ma.rows[2].snr_db, 5.0);
  for (const auto& entry : fs::directory_iterator(a)) {
    EXPECT_EQ(ReadFileBytes(entry.path().string()),
              ReadFileBytes((b / entry.path().filename()).string()));
  }
  const MixtureRecord rec = LoadRecord(ma, ma.rows[1]);
  EXPECT_EQ(rec.mixture.size(), 4000u);
}

TEST(Dataset, RecordIsConsistent) {
  DatasetConfig cfg;
  cfg.segment_seconds = 0.5;
  const MixtureRecord rec = SynthesizeRecord(cfg, 5, 2);
  for (std::size_t i = 0; i < rec.mixture.size(); ++i) {
    EXPECT_EQ(rec.mixture.samples[i], rec.reverberant.samples[i] + rec.noise.samples[i]);
  }
  const double achieved =
      10.0 * std::log10(oracle::Power(rec.reverberant.samples) / oracle::Power(rec.noise.samples));
  EXPECT_NEAR(achieved, rec.snr_db, 1e-6);
}

TEST(Dataset, ConfigErrors) {
  DatasetConfig cfg;
  cfg.rt60 = ValueSampler::Range(-0.1, 0.3);
  try {
    cfg.Validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
  DatasetConfig empty;
  empty.count = 0;
  EXPECT_THROW(empty.Validate(), Error);
}

TEST(Manifest, RoundTrip) {
  Manifest m;
  m.rows.push_back({"a", "a_dry.wav", "a_rev.wav", "a_n.wav", "a_mix.wav", -5.0, 0.25, 123});
  m.rows.push_back({"b", "b_dry.wav", "b_rev.wav", "b_n.wav", "b_mix.wav", 0.1, 0.0, 18446744073709551615ULL});
  const Manifest back = ParseManifest(FormatManifest(m), "/x");
  ASSERT_EQ(back.rows.size(), 2u);
  EXPECT_EQ(back.rows[1].seed, 18446744073709551615ULL);
  EXPECT_EQ(back.rows[1].snr_db, 0.1);
  EXPECT_EQ(back.rows[0].mix_path, "a_mix.wav");
  EXPECT_THROW(ParseManifest("id\tfoo\n", "/x"), Error);
}

}  // namespace
}  // namespace progse
