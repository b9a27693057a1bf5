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


#include "progse/dataset.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <numbers>
#include <sstream>

#include "progse/common.h"
#include "progse/text.h"

namespace fs = std::filesystem;

namespace progse {
namespace {

double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vec3 DrawPoint(std::mt19937_64& rng, const Vec3& dims, double margin) {
  return {Uniform(rng, margin, dims.x - margin), Uniform(rng, margin, dims.y - margin),
          Uniform(rng, margin, dims.z - margin)};
}

// Crops or loops `source` to `length` samples from a random offset.
Waveform FitLength(const Waveform& source, std::size_t length, std::mt19937_64& rng) {
  Waveform out;
  out.sample_rate = source.sample_rate;
  out.samples.resize(length);
  const std::size_t m = source.size();
  if (m >= length) {
    std::size_t offset = std::uniform_int_distribution<std::size_t>(0, m - length)(rng);
    std::copy_n(source.samples.begin() + static_cast<std::ptrdiff_t>(offset), length,
                out.samples.begin());
  } else {
    std::size_t offset = std::uniform_int_distribution<std::size_t>(0, m - 1)(rng);
    for (std::size_t i = 0; i < length; ++i) out.samples[i] = source.samples[(offset + i) % m];
  }
  return out;
}

Waveform LoadSource(const std::vector<std::string>& paths, int sample_rate,
                    std::size_t length, std::mt19937_64& rng) {
  const std::size_t pick = std::uniform_int_distribution<std::size_t>(0, paths.size() - 1)(rng);
  Waveform w = ReadWav(paths[pick]);
  if (w.sample_rate != sample_rate) {
    throw Error(ErrorCode::kSampleRateMismatch,
                paths[pick] + ": sample rate " + std::to_string(w.sample_rate) +
                    " Hz, dataset expects " + std::to_string(sample_rate) + " Hz");
  }
  if (w.samples.empty()) throw Error(ErrorCode::kZeroPower, paths[pick] + ": empty file");
  return FitLength(w, length, rng);
}

std::string RecordId(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "rec%05zu", index);
  return buf;
}

}  // namespace

ValueSampler ValueSampler::Range(double lo, double hi) {
  ValueSampler s;
  s.mode = Mode::kRange;
  s.lo = lo;
  s.hi = hi;
  return s;
}

ValueSampler ValueSampler::Levels(std::vector<double> levels) {
  ValueSampler s;
  s.mode = Mode::kLevels;
  s.levels = std::move(levels);
  return s;
}

void ValueSampler::Validate(const char* what) const {
  if (mode == Mode::kLevels) {
    if (levels.empty()) {
      throw Error(ErrorCode::kConfig, std::string(what) + ": empty level list");
    }
    for (double v : levels) {
      if (std::isnan(v)) throw Error(ErrorCode::kConfig, std::string(what) + ": NaN level");
    }
  } else if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(ErrorCode::kConfig, std::string(what) + ": range needs finite lo <= hi");
  }
}

double ValueSampler::Draw(std::size_t index, std::mt19937_64& rng) const {
  if (mode == Mode::kLevels) return levels[index % levels.size()];
  return lo == hi ? lo : Uniform(rng, lo, hi);
}

void DatasetConfig::Validate() const {
  if (count == 0) throw Error(ErrorCode::kConfig, "dataset: count must be positive");
  if (sample_rate <= 0) throw Error(ErrorCode::kConfig, "dataset: sample rate must be positive");
  if (!(segment_seconds > 0.0) || SegmentLength() == 0) {
    throw Error(ErrorCode::kConfig, "dataset: segment length must be positive");
  }
  snr_db.Validate("dataset snr");
  rt60.Validate("dataset rt60");
  const bool negative_rt60 =
      rt60.mode == ValueSampler::Mode::kRange
          ? rt60.lo < 0.0
          : std::any_of(rt60.levels.begin(), rt60.levels.end(), [](double v) { return v < 0.0; });
  if (negative_rt60) throw Error(ErrorCode::kConfig, "dataset: rt60 must be >= 0");
  for (double v : rt60.levels) {
    if (std::isinf(v)) throw Error(ErrorCode::kConfig, "dataset: rt60 must be finite");
  }
  for (double v : snr_db.levels) {
    if (v == -std::numeric_limits<double>::infinity()) {
      throw Error(ErrorCode::kConfig, "dataset: snr of -inf is not allowed");
    }
  }
  auto axis_ok = [&](double lo, double hi) {
    return lo > 2.0 * wall_margin && lo <= hi && std::isfinite(hi);
  };
  if (!(wall_margin > 0.0) || !axis_ok(room_min.x, room_max.x) ||
      !axis_ok(room_min.y, room_max.y) || !axis_ok(room_min.z, room_max.z)) {
    throw Error(ErrorCode::kConfig,
                "dataset: room ranges must satisfy 2*margin < min <= max per axis");
  }
  if (min_separation < 0.0) throw Error(ErrorCode::kConfig, "dataset: negative min separation");
  if (max_reflection_order < 0) throw Error(ErrorCode::kConfig, "dataset: negative reflection order");
  if (!(speed_of_sound > 0.0)) throw Error(ErrorCode::kConfig, "dataset: bad speed of sound");
  if (require_speech_files && speech_paths.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "dataset: empty speech source pool");
  }
}

std::size_t DatasetConfig::SegmentLength() const {
  return static_cast<std::size_t>(std::llround(segment_seconds * sample_rate));
}

std::string Manifest::Resolve(const std::string& relative) const {
  fs::path p(relative);
  if (p.is_absolute() || base_dir.empty()) return relative;
  return (fs::path(base_dir) / p).string();
}

std::string FormatManifest(const Manifest& manifest) {
  std::ostringstream out;
  out << kManifestHeader << '\n';
  for (const auto& r : manifest.rows) {
    out << r.id << '\t' << r.dry_path << '\t' << r.reverb_path << '\t' << r.noise_path
        << '\t' << r.mix_path << '\t' << FormatDouble(r.snr_db) << '\t'
        << FormatDouble(r.rt60_s) << '\t' << r.seed << '\n';
  }
  return out.str();
}

Manifest ParseManifest(const std::string& text, const std::string& base_dir) {
  Manifest manifest;
  manifest.base_dir = base_dir;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || Trim(line) != kManifestHeader) {
    throw Error(ErrorCode::kFormat, "manifest: missing or unexpected header line");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    auto cols = Split(Trim(line), '\t');
    const std::string where = "manifest line " + std::to_string(line_no);
    if (cols.size() != 8) throw Error(ErrorCode::kFormat, where + ": expected 8 columns");
    ManifestRow row;
    row.id = cols[0];
    row.dry_path = cols[1];
    row.reverb_path = cols[2];
    row.noise_path = cols[3];
    row.mix_path = cols[4];
    row.snr_db = ParseDouble(cols[5], where + " snr_db");
    row.rt60_s = ParseDouble(cols[6], where + " rt60_s");
    try {
      row.seed = std::stoull(cols[7]);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kFormat, where + ": bad seed");
    }
    manifest.rows.push_back(std::move(row));
  }
  return manifest;
}

void WriteManifest(const std::string& path, const Manifest& manifest) {
  WriteFileAtomically(path, FormatManifest(manifest));
}

Manifest ReadManifest(const std::string& path) {
  auto bytes = ReadFileBytes(path);
  std::string base = fs::path(path).parent_path().string();
  return ParseManifest(std::string(bytes.begin(), bytes.end()), base);
}

Waveform SyntheticSpeech(int sample_rate, std::size_t length, std::uint64_t seed) {
  if (sample_rate <= 0) throw Error(ErrorCode::kInvalidArgument, "speech: bad sample rate");
  std::mt19937_64 rng(seed);
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.assign(length, 0.0);
  const double fs = sample_rate;
  const double nyquist_guard = 0.45 * fs;
  std::normal_distribution<double> gauss(0.0, 1.0);

  const double base_f0 = Uniform(rng, 95.0, 230.0);
  std::size_t pos = static_cast<std::size_t>(Uniform(rng, 0.0, 0.1) * fs);
  double phase = 0.0;
  while (pos < length) {
    const std::size_t dur = static_cast<std::size_t>(Uniform(rng, 0.12, 0.35) * fs);
    const std::size_t gap = static_cast<std::size_t>(Uniform(rng, 0.03, 0.18) * fs);
    const double f1 = Uniform(rng, 300.0, 850.0);
    const double f2 = Uniform(rng, 900.0, 2400.0);
    const double f0_start = base_f0 * Uniform(rng, 0.85, 1.15);
    const double f0_end = base_f0 * Uniform(rng, 0.8, 1.2);
    const double loudness = Uniform(rng, 0.5, 1.0);
    const double breath = Uniform(rng, 0.02, 0.08);
    for (std::size_t i = 0; i < dur && pos + i < length; ++i) {
      const double u = static_cast<double>(i) / static_cast<double>(dur);
      const double f0 = f0_start + (f0_end - f0_start) * u;
      phase += 2.0 * std::numbers::pi * f0 / fs;
      double v = 0.0;
      for (int k = 1; k * f0 < nyquist_guard && k <= 40; ++k) {
        const double f = k * f0;
        const double formant = 1.0 + 3.0 * std::exp(-std::pow((f - f1) / 120.0, 2)) +
                               2.0 * std::exp(-std::pow((f - f2) / 200.0, 2));
        v += formant / k * std::sin(k * phase);
      }
      const double env = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * u);
      w.samples[pos + i] = loudness * env * (v + breath * gauss(rng));
    }
    pos += dur + gap;
  }
  double peak = 0.0;
  for (double s : w.samples) peak = std::max(peak, std::abs(s));
  if (peak > 0.0) {
    for (double& s : w.samples) s *= 0.5 / peak;
  }
  return w;
}

Waveform WhiteNoise(int sample_rate, std::size_t length, std::uint64_t seed, double stddev) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, stddev);
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.resize(length);
  for (double& s : w.samples) s = gauss(rng);
  return w;
}

MixtureRecord SynthesizeRecord(const DatasetConfig& cfg, std::uint64_t master_seed,
                               std::size_t index) {
  MixtureRecord rec;
  rec.seed = DeriveSeed(master_seed, index);
  std::mt19937_64 rng(rec.seed);
  const std::size_t length = cfg.SegmentLength();

  RoomSpec room;
  room.max_reflection_order = cfg.max_reflection_order;
  room.speed_of_sound = cfg.speed_of_sound;
  room.dimensions = {Uniform(rng, cfg.room_min.x, cfg.room_max.x),
                     Uniform(rng, cfg.room_min.y, cfg.room_max.y),
                     Uniform(rng, cfg.room_min.z, cfg.room_max.z)};
  room.source = DrawPoint(rng, room.dimensions, cfg.wall_margin);
  room.mic = DrawPoint(rng, room.dimensions, cfg.wall_margin);
  for (int attempt = 0; attempt < 1000 && (Distance(room.source, room.mic) < cfg.min_separation ||
                                           room.source == room.mic);
       ++attempt) {
    room.mic = DrawPoint(rng, room.dimensions, cfg.wall_margin);
  }
  const double rt60 = cfg.rt60.Draw(index, rng);
  // Targets shorter than the room can realize fall back to the anechoic
  // response, which is what full absorption produces.
  room.rt60_target = rt60 < room.MinimumRt60() ? 0.0 : rt60;
  rec.rir = GenerateRir(room, cfg.sample_rate);
  rec.snr_db = cfg.snr_db.Draw(index, rng);

  std::mt19937_64 speech_rng(DeriveSeed(rec.seed, 1));
  rec.dry = cfg.speech_paths.empty()
                ? SyntheticSpeech(cfg.sample_rate, length, DeriveSeed(rec.seed, 1))
                : LoadSource(cfg.speech_paths, cfg.sample_rate, length, speech_rng);
  std::mt19937_64 noise_rng(DeriveSeed(rec.seed, 2));
  Waveform noise = cfg.noise_paths.empty()
                       ? WhiteNoise(cfg.sample_rate, length, DeriveSeed(rec.seed, 2))
                       : LoadSource(cfg.noise_paths, cfg.sample_rate, length, noise_rng);

  rec.reverberant = ApplyRir(rec.dry, rec.rir);
  NoisyMix mix = MixAtSnr(rec.reverberant, noise, rec.snr_db, DeriveSeed(rec.seed, 3));
  rec.noise = std::move(mix.noise);
  rec.mixture = std::move(mix.mixture);
  return rec;
}

std::string SynthesizeDataset(const DatasetConfig& cfg, std::uint64_t seed,
                              const std::string& output_dir) {
  cfg.Validate();
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec || !fs::is_directory(output_dir)) {
    throw Error(ErrorCode::kIo, "cannot create output directory " + output_dir);
  }
  Manifest manifest;
  manifest.base_dir = output_dir;
  for (std::size_t i = 0; i < cfg.count; ++i) {
    MixtureRecord rec = SynthesizeRecord(cfg, seed, i);
    ManifestRow row;
    row.id = RecordId(i);
    row.dry_path = row.id + "_dry.wav";
    row.reverb_path = row.id + "_reverb.wav";
    row.noise_path = row.id + "_noise.wav";
    row.mix_path = row.id + "_mix.wav";
    row.snr_db = rec.snr_db;
    row.rt60_s = rec.rir.room.rt60_target;
    row.seed = rec.seed;
    WriteWav(manifest.Resolve(row.dry_path), rec.dry, cfg.wav_format);
    WriteWav(manifest.Resolve(row.reverb_path), rec.reverberant, cfg.wav_format);
    WriteWav(manifest.Resolve(row.noise_path), rec.noise, cfg.wav_format);
    WriteWav(manifest.Resolve(row.mix_path), rec.mixture, cfg.wav_format);
    manifest.rows.push_back(std::move(row));
  }
  const std::string path = (fs::path(output_dir) / "manifest.tsv").string();
  WriteManifest(path, manifest);
  return path;
}

MixtureRecord LoadRecord(const Manifest& manifest, const ManifestRow& row) {
  MixtureRecord rec;
  rec.dry = ReadWav(manifest.Resolve(row.dry_path));
  rec.reverberant = ReadWav(manifest.Resolve(row.reverb_path));
  rec.noise = ReadWav(manifest.Resolve(row.noise_path));
  rec.mixture = ReadWav(manifest.Resolve(row.mix_path));
  rec.snr_db = row.snr_db;
  rec.seed = row.seed;
  rec.rir.sample_rate = rec.dry.sample_rate;
  rec.rir.room.rt60_target = row.rt60_s;
  return rec;
}

}  // namespace progse
