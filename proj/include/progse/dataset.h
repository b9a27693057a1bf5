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


#ifndef PROGSE_DATASET_H_
#define PROGSE_DATASET_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "progse/simulate.h"
#include "progse/wav.h"

namespace progse {

// A scalar drawn per record: uniformly from [lo, hi], or from a fixed list of
// levels assigned round-robin by record index.
struct ValueSampler {
  enum class Mode { kRange, kLevels };
  Mode mode = Mode::kRange;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> levels;

  static ValueSampler Range(double lo, double hi);
  static ValueSampler Levels(std::vector<double> levels);

  void Validate(const char* what) const;
  double Draw(std::size_t index, std::mt19937_64& rng) const;
};

struct MixtureRecord {
  Waveform dry;          // s
  Waveform reverberant;  // x = s * h
  Waveform noise;        // n after gain
  Waveform mixture;      // y = x + n
  double snr_db = 0.0;
  Rir rir;
  std::uint64_t seed = 0;
};

struct DatasetConfig {
  std::size_t count = 10;
  int sample_rate = 16000;
  double segment_seconds = 6.0;
  ValueSampler snr_db = ValueSampler::Range(-6.0, 6.0);
  ValueSampler rt60 = ValueSampler::Range(0.0, 0.6);
  // Room dimensions are drawn uniformly per axis; source and mic keep
  // `wall_margin` from every wall and at least `min_separation` apart.
  Vec3 room_min{3.0, 3.0, 2.5};
  Vec3 room_max{10.0, 8.0, 4.0};
  double wall_margin = 0.5;
  double min_separation = 0.5;
  int max_reflection_order = 30;
  double speed_of_sound = 340.0;
  // Empty lists select the built-in sources: harmonic pseudo-speech and
  // Gaussian white noise.
  std::vector<std::string> speech_paths;
  std::vector<std::string> noise_paths;
  bool require_speech_files = false;
  WavFormat wav_format = WavFormat::kFloat32;

  void Validate() const;
  std::size_t SegmentLength() const;
};

struct ManifestRow {
  std::string id;
  std::string dry_path;
  std::string reverb_path;
  std::string noise_path;
  std::string mix_path;
  double snr_db = 0.0;
  double rt60_s = 0.0;
  std::uint64_t seed = 0;
};

// Tab-separated manifest. Paths are stored relative to the manifest's
// directory; `base_dir` is filled in on read.
struct Manifest {
  std::vector<ManifestRow> rows;
  std::string base_dir;

  std::string Resolve(const std::string& relative) const;
};

inline constexpr const char* kManifestHeader =
    "id\tdry_path\treverb_path\tnoise_path\tmix_path\tsnr_db\trt60_s\tseed";

std::string FormatManifest(const Manifest& manifest);
Manifest ParseManifest(const std::string& text, const std::string& base_dir);
void WriteManifest(const std::string& path, const Manifest& manifest);
Manifest ReadManifest(const std::string& path);

// Harmonic-plus-noise pseudo-speech: voiced syllables with a wandering
// pitch, formant-shaped harmonics and short pauses. Peak amplitude 0.5.
Waveform SyntheticSpeech(int sample_rate, std::size_t length, std::uint64_t seed);
Waveform WhiteNoise(int sample_rate, std::size_t length, std::uint64_t seed,
                    double stddev = 0.1);

// Builds record `index` of the dataset; a pure function of its arguments.
MixtureRecord SynthesizeRecord(const DatasetConfig& cfg, std::uint64_t master_seed,
                               std::size_t index);

// Writes <id>_{dry,reverb,noise,mix}.wav and manifest.tsv into output_dir and
// returns the manifest path.
std::string SynthesizeDataset(const DatasetConfig& cfg, std::uint64_t seed,
                              const std::string& output_dir);

// Loads the four waveforms of a manifest row (the RIR is not stored).
MixtureRecord LoadRecord(const Manifest& manifest, const ManifestRow& row);

}  // namespace progse

#endif  // PROGSE_DATASET_H_
