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


// Two-stage flow: a mask-based denoising stage, then a feature codec stage
// (analysis adapter -> quantizer stack -> synthesis adapter).

#ifndef PROGSE_PIPELINE_H_
#define PROGSE_PIPELINE_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "progse/dataset.h"
#include "progse/mask.h"
#include "progse/quantize.h"
#include "progse/stft.h"

namespace progse {

struct MaskSource {
  enum class Kind { kOracle, kFile, kPassthrough };
  Kind kind = Kind::kOracle;
  std::optional<ComplexMask> mask;  // required for kFile
  std::optional<double> bound;      // oracle only; unbounded by default
};

const char* MaskKindName(MaskSource::Kind kind);
MaskSource::Kind ParseMaskKind(const std::string& name);

// Denoised estimate istft(M . stft(y)). `reference` is the reverberant
// target and is required for the oracle mask.
Waveform RunDn(const Waveform& y, const MaskSource& source, const StftConfig& cfg,
               const Waveform* reference = nullptr);

enum class Projection { kIdentity, kRandomOrthonormal };
enum class PhaseSource { kFromInput, kFromMixture };
enum class FeatureDomain { kLogMagnitude, kMagnitude };

const char* ProjectionName(Projection p);
const char* PhaseSourceName(PhaseSource p);
const char* FeatureDomainName(FeatureDomain d);
Projection ParseProjection(const std::string& name);
PhaseSource ParsePhaseSource(const std::string& name);
FeatureDomain ParseFeatureDomain(const std::string& name);

struct CodecAdapterConfig {
  StftConfig stft;
  Projection projection = Projection::kIdentity;
  std::size_t feature_dim = 0;  // 0 means stft.bins()
  std::uint64_t seed = 0;       // random projection only
  PhaseSource phase_source = PhaseSource::kFromInput;
  FeatureDomain domain = FeatureDomain::kLogMagnitude;
  double log_floor = 1e-7;

  std::size_t FeatureDim() const { return feature_dim == 0 ? stft.bins() : feature_dim; }
  // kConfig: identity needs D == bins, the random projection needs D >= bins
  // (orthonormal columns, so the transpose is an exact left inverse).
  void Validate() const;
};

struct EncodedFeatures {
  RealMatrix z;                  // frames x D
  ComplexSpectrogram phase;      // sidecar carried to the decoder
};

class CodecAdapter {
 public:
  explicit CodecAdapter(const CodecAdapterConfig& cfg);

  const CodecAdapterConfig& config() const { return cfg_; }
  std::size_t dim() const { return cfg_.FeatureDim(); }
  // D x bins; identity when the projection is the identity.
  const RealMatrix& projection() const { return projection_; }

  EncodedFeatures Encode(const Waveform& x) const;
  // Features of a given magnitude, with the phase taken from `phase`.
  EncodedFeatures EncodeMagnitude(const RealMatrix& magnitude,
                                  const ComplexSpectrogram& phase) const;
  Waveform Decode(const RealMatrix& zq, const ComplexSpectrogram& phase) const;

  RealMatrix Project(const RealMatrix& per_bin) const;
  RealMatrix BackProject(const RealMatrix& z) const;

 private:
  CodecAdapterConfig cfg_;
  RealMatrix projection_;
};

struct RestorationConfig {
  std::optional<FusionConfig> fusion;     // unset: codec input is the denoised signal
  const QuantizerStack* stack = nullptr;  // unset: features pass unquantized
};

struct RestorationOutput {
  Waveform restored;
  RealMatrix features;
  RealMatrix quantized;
  std::optional<QuantizeResult> codes;
};

// Codec stage on its own. `mixture` is needed for fusion and for phase
// taken from the mixture.
RestorationOutput RunRestoration(const Waveform& denoised, const Waveform& mixture,
                                 const CodecAdapter& adapter, const RestorationConfig& cfg);

struct PipelineConfig {
  StftConfig dn_stft;
  MaskSource mask;
  RestorationConfig restoration;
};

using Metrics = std::vector<std::pair<std::string, double>>;

struct PipelineOutput {
  Waveform denoised;
  Waveform restored;
  RealMatrix features;
  RealMatrix quantized;
  std::optional<QuantizeResult> codes;
  Metrics metrics;
};

// `reference` is the reverberant target (oracle mask and metrics), `dry` the
// clean speech; either may be null.
PipelineOutput RunPipeline(const Waveform& mixture, const PipelineConfig& cfg,
                           const CodecAdapter& adapter, const Waveform* reference = nullptr,
                           const Waveform* dry = nullptr);
PipelineOutput RunPipeline(const MixtureRecord& rec, const PipelineConfig& cfg,
                           const CodecAdapter& adapter);

// si_sdr_dry, si_sdr_reverb, si_sdr_denoised_reverb, lsd (restored vs dry),
// feature_mse, then residual_energy_<i> per stage. Metrics whose reference
// is absent are NaN.
Metrics Evaluate(const PipelineOutput& out, const Waveform* dry, const Waveform* reverberant,
                 const StftConfig& lsd_stft = {});

// Tab-separated report: "# key=value" header lines, one column header row
// starting with "id", then one row per utterance. Numbers use %.17g so the
// text round-trips exactly.
struct Report {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<std::string> columns;  // metric names, without "id"
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;

  void AddRow(const std::string& id, const Metrics& metrics);
  bool operator==(const Report& other) const;  // NaN == NaN, bitwise on values
};

std::string FormatReport(const Report& report);
Report ParseReport(const std::string& text);
void WriteReport(const std::string& path, const Report& report);
Report ReadReport(const std::string& path);

}  // namespace progse

#endif  // PROGSE_PIPELINE_H_
