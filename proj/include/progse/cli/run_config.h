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


#ifndef PROGSE_CLI_RUN_CONFIG_H_
#define PROGSE_CLI_RUN_CONFIG_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "progse/dataset.h"
#include "progse/pipeline.h"
#include "progse/quantize.h"
#include "progse/simulate.h"
#include "progse/train.h"

namespace progse::cli {

// Flat key=value configuration. Every key has a default; unknown keys and
// malformed values are kConfig errors. Later assignments win, so the order
// is: defaults, config file, --set flags, --seed.
class RunConfig {
 public:
  RunConfig();

  // "key = value" per line; '#' starts a comment.
  void LoadFile(const std::string& path);
  void LoadText(const std::string& text, const std::string& name);
  void Set(const std::string& key, const std::string& value);
  void SetAssignment(const std::string& assignment);  // "key=value"

  const std::string& Get(const std::string& key) const;
  double GetDouble(const std::string& key) const;
  long long GetInt(const std::string& key) const;
  std::size_t GetSize(const std::string& key) const;
  bool GetBool(const std::string& key) const;
  std::uint64_t Seed() const;

  const std::map<std::string, std::string>& values() const { return values_; }
  // ("config.<key>", value) for every key in sorted order.
  std::vector<std::pair<std::string, std::string>> HeaderEntries() const;

 private:
  std::map<std::string, std::string> values_;
};

// Everything derived from a RunConfig. Building it validates the whole
// configuration, so commands do this before touching the filesystem.
struct Resolved {
  std::uint64_t seed = 0;
  int sample_rate = 16000;
  StftConfig stft;
  DatasetConfig dataset;
  StackOptions stack;
  TrainConfig train;
  std::string train_source;  // dry | reverb | mix | denoised
  MaskSource::Kind mask_kind = MaskSource::Kind::kOracle;
  std::string mask_dir;
  std::optional<double> mask_bound;
  std::optional<FusionConfig> fusion;
  std::string fusion_affine_path;
  CodecAdapterConfig adapter;
  WavFormat output_format = WavFormat::kFloat32;
  RoomSpec rir_room;
};

Resolved Resolve(const RunConfig& config);

}  // namespace progse::cli

#endif  // PROGSE_CLI_RUN_CONFIG_H_
