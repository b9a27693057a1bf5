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


#include "progse/cli/run_config.h"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>

#include "progse/text.h"
#include "progse/wav.h"

namespace progse::cli {
namespace {

const std::map<std::string, std::string>& Defaults() {
  static const std::map<std::string, std::string> defaults = {
      {"seed", "0"},
      {"sample_rate", "16000"},
      {"stft.fft_size", "512"},
      {"stft.hop", "128"},
      {"stft.window", "sqrt_hann"},
      {"stft.center", "true"},
      {"sim.count", "10"},
      {"sim.segment_seconds", "6"},
      {"sim.snr_db", "-6:6"},
      {"sim.rt60", "0:0.6"},
      {"sim.room_min", "3,3,2.5"},
      {"sim.room_max", "10,8,4"},
      {"sim.wall_margin", "0.5"},
      {"sim.min_separation", "0.5"},
      {"sim.max_order", "30"},
      {"sim.speed_of_sound", "340"},
      {"sim.speech_paths", ""},
      {"sim.noise_paths", ""},
      {"sim.wav_format", "float32"},
      {"quantizer.scheme", "SQ_RVQ"},
      {"quantizer.n_q", "8"},
      {"quantizer.N", "1024"},
      {"quantizer.D", "0"},
      {"quantizer.K", "8"},
      {"quantizer.fsq_levels", "5"},
      {"quantizer.lfq_scale", "1"},
      {"quantizer.groups", "2"},
      {"quantizer.parallel_weight", "0.5"},
      {"quantizer.reserved_zero", "true"},
      {"train.epochs", "10"},
      {"train.ema_decay", "0.99"},
      {"train.kmeans_iters", "10"},
      {"train.dead_code_fraction", "0.001"},
      {"train.max_codebook_size", "4096"},
      {"train.source", "reverb"},
      {"mask.source", "oracle"},
      {"mask.dir", ""},
      {"mask.bound", ""},
      {"fusion.beta", ""},
      {"fusion.affine", ""},
      {"adapter.projection", "identity"},
      {"adapter.seed", "0"},
      {"adapter.phase", "from_input"},
      {"adapter.domain", "log"},
      {"adapter.log_floor", "1e-7"},
      {"output.wav_format", "float32"},
      {"rir.room", "6,5,3"},
      {"rir.source", "1,1,1.5"},
      {"rir.mic", "4.4,1,1.5"},
      {"rir.rt60", "0.3"},
      {"rir.max_order", "30"},
      {"rir.speed_of_sound", "340"},
  };
  return defaults;
}

[[noreturn]] void Bad(const std::string& key, const std::string& why) {
  throw Error(ErrorCode::kConfig, "config key '" + key + "': " + why);
}

std::vector<double> ParseList(const RunConfig& c, const std::string& key) {
  std::vector<double> out;
  for (const std::string& t : Split(c.Get(key), ',')) out.push_back(ParseDouble(t, key));
  return out;
}

Vec3 ParseVec3(const RunConfig& c, const std::string& key) {
  const std::vector<double> v = ParseList(c, key);
  if (v.size() != 3) Bad(key, "expected three comma-separated numbers");
  return {v[0], v[1], v[2]};
}

// "lo:hi" draws uniformly; "a,b,c" cycles through levels.
ValueSampler ParseSampler(const RunConfig& c, const std::string& key) {
  const std::string& s = c.Get(key);
  const std::size_t colon = s.find(':');
  if (colon != std::string::npos) {
    return ValueSampler::Range(ParseDouble(s.substr(0, colon), key),
                               ParseDouble(s.substr(colon + 1), key));
  }
  return ValueSampler::Levels(ParseList(c, key));
}

std::vector<std::string> ParsePaths(const std::string& s) {
  std::vector<std::string> out;
  if (Trim(s).empty()) return out;
  for (const std::string& t : Split(s, ',')) out.emplace_back(Trim(t));
  return out;
}

WavFormat ParseWavFormat(const RunConfig& c, const std::string& key) {
  const std::string& s = c.Get(key);
  if (s == "float32") return WavFormat::kFloat32;
  if (s == "pcm16") return WavFormat::kPcm16;
  Bad(key, "expected float32 or pcm16");
}

std::optional<double> ParseOptionalDouble(const RunConfig& c, const std::string& key) {
  const std::string_view s = Trim(c.Get(key));
  if (s.empty() || s == "none") return std::nullopt;
  return ParseDouble(s, key);
}

Resolved ResolveUnchecked(const RunConfig& c) {
  Resolved r;
  r.seed = c.Seed();
  const long long rate = c.GetInt("sample_rate");
  if (rate <= 0 || rate > 1'000'000) Bad("sample_rate", "out of range");
  r.sample_rate = static_cast<int>(rate);

  r.stft.fft_size = c.GetSize("stft.fft_size");
  r.stft.hop = c.GetSize("stft.hop");
  const std::string& win = c.Get("stft.window");
  if (win == "hann") {
    r.stft.window = WindowType::kHann;
  } else if (win == "sqrt_hann") {
    r.stft.window = WindowType::kSqrtHann;
  } else {
    Bad("stft.window", "expected hann or sqrt_hann");
  }
  r.stft.center = c.GetBool("stft.center");
  r.stft.Validate();

  DatasetConfig& d = r.dataset;
  d.count = c.GetSize("sim.count");
  d.sample_rate = r.sample_rate;
  d.segment_seconds = c.GetDouble("sim.segment_seconds");
  d.snr_db = ParseSampler(c, "sim.snr_db");
  d.rt60 = ParseSampler(c, "sim.rt60");
  d.room_min = ParseVec3(c, "sim.room_min");
  d.room_max = ParseVec3(c, "sim.room_max");
  d.wall_margin = c.GetDouble("sim.wall_margin");
  d.min_separation = c.GetDouble("sim.min_separation");
  d.max_reflection_order = static_cast<int>(c.GetInt("sim.max_order"));
  d.speed_of_sound = c.GetDouble("sim.speed_of_sound");
  d.speech_paths = ParsePaths(c.Get("sim.speech_paths"));
  d.noise_paths = ParsePaths(c.Get("sim.noise_paths"));
  d.wav_format = ParseWavFormat(c, "sim.wav_format");
  d.Validate();

  r.adapter.stft = r.stft;
  r.adapter.projection = ParseProjection(c.Get("adapter.projection"));
  r.adapter.feature_dim = c.GetSize("quantizer.D");
  r.adapter.seed = static_cast<std::uint64_t>(c.GetInt("adapter.seed"));
  r.adapter.phase_source = ParsePhaseSource(c.Get("adapter.phase"));
  r.adapter.domain = ParseFeatureDomain(c.Get("adapter.domain"));
  r.adapter.log_floor = c.GetDouble("adapter.log_floor");
  r.adapter.Validate();

  StackOptions& s = r.stack;
  s.scheme = ParseScheme(c.Get("quantizer.scheme"));
  s.dim = r.adapter.FeatureDim();
  s.n_q = c.GetSize("quantizer.n_q");
  s.codebook_size = c.GetSize("quantizer.N");
  const long long k = c.GetInt("quantizer.K");
  if (k < 1 || k > 1'000'000) Bad("quantizer.K", "must lie in [1, 1000000]");
  s.scalar_k = static_cast<int>(k);
  const long long levels = c.GetInt("quantizer.fsq_levels");
  if (levels < 3 || levels % 2 == 0 || levels > 1'000'001) {
    Bad("quantizer.fsq_levels", "must be odd and >= 3");
  }
  s.fsq_levels = static_cast<int>(levels);
  s.lfq_scale = c.GetDouble("quantizer.lfq_scale");
  s.group_count = c.GetSize("quantizer.groups");
  s.parallel_weight = c.GetDouble("quantizer.parallel_weight");
  s.reserved_zero = c.GetBool("quantizer.reserved_zero");
  StackOptions probe = s;
  probe.codebook_size = std::min<std::size_t>(s.codebook_size, 2);
  MakeStack(probe);  // validates the layout without allocating full codebooks

  r.train.epochs = c.GetSize("train.epochs");
  r.train.ema_decay = c.GetDouble("train.ema_decay");
  r.train.kmeans_iters = c.GetSize("train.kmeans_iters");
  r.train.dead_code_fraction = c.GetDouble("train.dead_code_fraction");
  r.train.max_codebook_size = c.GetSize("train.max_codebook_size");
  r.train.seed = DeriveSeed(r.seed, 0x7261696e);
  r.train.Validate();
  if (s.codebook_size > r.train.max_codebook_size) {
    Bad("quantizer.N", "exceeds train.max_codebook_size");
  }
  r.train_source = c.Get("train.source");
  if (r.train_source != "dry" && r.train_source != "reverb" && r.train_source != "mix" &&
      r.train_source != "denoised") {
    Bad("train.source", "expected dry, reverb, mix or denoised");
  }

  r.mask_kind = ParseMaskKind(c.Get("mask.source"));
  r.mask_dir = c.Get("mask.dir");
  if (r.mask_kind == MaskSource::Kind::kFile && r.mask_dir.empty()) {
    Bad("mask.dir", "required when mask.source = file");
  }
  r.mask_bound = ParseOptionalDouble(c, "mask.bound");
  if (r.mask_bound && !(*r.mask_bound > 0.0)) Bad("mask.bound", "must be positive");

  const std::optional<double> beta = ParseOptionalDouble(c, "fusion.beta");
  r.fusion_affine_path = c.Get("fusion.affine");
  if (beta || !r.fusion_affine_path.empty()) {
    FusionConfig f;
    f.beta = beta.value_or(0.5);
    f.Validate();
    r.fusion = f;
  }

  r.output_format = ParseWavFormat(c, "output.wav_format");

  r.rir_room.dimensions = ParseVec3(c, "rir.room");
  r.rir_room.source = ParseVec3(c, "rir.source");
  r.rir_room.mic = ParseVec3(c, "rir.mic");
  r.rir_room.rt60_target = c.GetDouble("rir.rt60");
  r.rir_room.max_reflection_order = static_cast<int>(c.GetInt("rir.max_order"));
  r.rir_room.speed_of_sound = c.GetDouble("rir.speed_of_sound");
  r.rir_room.Validate();
  r.rir_room.Absorption();
  return r;
}

}  // namespace

RunConfig::RunConfig() : values_(Defaults()) {}

void RunConfig::LoadFile(const std::string& path) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = ReadFileBytes(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, "cannot read config file '" + path + "': " + e.what());
  }
  LoadText(std::string(bytes.begin(), bytes.end()), path);
}

void RunConfig::LoadText(const std::string& text, const std::string& name) {
  std::size_t line_no = 0;
  for (const std::string& raw : Split(text, '\n')) {
    ++line_no;
    std::string_view line(raw);
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kConfig,
                  name + ":" + std::to_string(line_no) + ": expected key = value");
    }
    Set(std::string(Trim(line.substr(0, eq))), std::string(Trim(line.substr(eq + 1))));
  }
}

void RunConfig::Set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorCode::kConfig, "unknown config key '" + key + "'");
  if (value.find_first_of("\n\t") != std::string::npos) Bad(key, "value contains a tab or newline");
  it->second = value;
}

void RunConfig::SetAssignment(const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw Error(ErrorCode::kConfig, "--set expects key=value, got '" + assignment + "'");
  }
  Set(std::string(Trim(std::string_view(assignment).substr(0, eq))),
      std::string(Trim(std::string_view(assignment).substr(eq + 1))));
}

const std::string& RunConfig::Get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorCode::kConfig, "unknown config key '" + key + "'");
  return it->second;
}

double RunConfig::GetDouble(const std::string& key) const {
  const double v = ParseDouble(Get(key), key);
  if (!std::isfinite(v)) Bad(key, "must be finite");
  return v;
}

long long RunConfig::GetInt(const std::string& key) const { return ParseInt(Get(key), key); }

std::size_t RunConfig::GetSize(const std::string& key) const {
  const long long v = GetInt(key);
  if (v < 0) Bad(key, "must be non-negative");
  return static_cast<std::size_t>(v);
}

bool RunConfig::GetBool(const std::string& key) const {
  const std::string& v = Get(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  Bad(key, "expected true or false");
}

std::uint64_t RunConfig::Seed() const {
  const std::string& s = Get("seed");
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || s[0] == '-' || end != s.c_str() + s.size() || errno == ERANGE) {
    Bad("seed", "expected an unsigned 64-bit integer");
  }
  return v;
}

std::vector<std::pair<std::string, std::string>> RunConfig::HeaderEntries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [k, v] : values_) out.emplace_back("config." + k, v);
  return out;
}

Resolved Resolve(const RunConfig& config) {
  try {
    return ResolveUnchecked(config);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    throw Error(ErrorCode::kConfig, std::string("invalid configuration: ") + e.what());
  }
}

}  // namespace progse::cli
