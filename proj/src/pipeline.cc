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


#include "progse/pipeline.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "progse/objectives.h"
#include "progse/text.h"
#include "progse/wav.h"

namespace progse {
namespace {

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

RealMatrix Orthonormal(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) g(r, c) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  const Eigen::MatrixXd rm = qr.matrixQR();
  RealMatrix p(rows, cols);
  for (std::size_t c = 0; c < cols; ++c) {
    // sign fix so the factorization is unique
    const double s = rm(c, c) < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < rows; ++r) p(r, c) = s * q(r, c);
  }
  return p;
}

}  // namespace

const char* MaskKindName(MaskSource::Kind kind) {
  switch (kind) {
    case MaskSource::Kind::kOracle: return "oracle";
    case MaskSource::Kind::kFile: return "file";
    case MaskSource::Kind::kPassthrough: return "passthrough";
  }
  return "?";
}

MaskSource::Kind ParseMaskKind(const std::string& name) {
  const std::string n = Lower(name);
  if (n == "oracle") return MaskSource::Kind::kOracle;
  if (n == "file") return MaskSource::Kind::kFile;
  if (n == "passthrough") return MaskSource::Kind::kPassthrough;
  throw Error(ErrorCode::kConfig, "unknown mask source '" + name + "'");
}

Waveform RunDn(const Waveform& y, const MaskSource& source, const StftConfig& cfg,
               const Waveform* reference) {
  y.Validate();
  const ComplexSpectrogram spec = Stft(y, cfg);
  switch (source.kind) {
    case MaskSource::Kind::kPassthrough:
      return Istft(spec);
    case MaskSource::Kind::kOracle: {
      if (reference == nullptr) {
        throw Error(ErrorCode::kMissingReference, "run_dn: oracle mask needs the reverberant target");
      }
      RequireSameRate(y, *reference, "run_dn");
      RequireSameLength(y, *reference, "run_dn");
      const ComplexMask m = ComputeCrm(spec, Stft(*reference, cfg), source.bound);
      return Istft(ApplyMask(spec, m));
    }
    case MaskSource::Kind::kFile: {
      if (!source.mask) throw Error(ErrorCode::kMissingReference, "run_dn: no mask loaded");
      RequireSameShape(source.mask->frames, source.mask->bins, spec.frames, spec.bins, "run_dn mask");
      return Istft(ApplyMask(spec, *source.mask));
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "run_dn: bad mask kind");
}

const char* ProjectionName(Projection p) {
  return p == Projection::kIdentity ? "identity" : "random";
}
const char* PhaseSourceName(PhaseSource p) {
  return p == PhaseSource::kFromInput ? "from_input" : "from_mixture";
}
const char* FeatureDomainName(FeatureDomain d) {
  return d == FeatureDomain::kLogMagnitude ? "log" : "magnitude";
}

Projection ParseProjection(const std::string& name) {
  const std::string n = Lower(name);
  if (n == "identity") return Projection::kIdentity;
  if (n == "random") return Projection::kRandomOrthonormal;
  throw Error(ErrorCode::kConfig, "unknown projection '" + name + "'");
}

PhaseSource ParsePhaseSource(const std::string& name) {
  const std::string n = Lower(name);
  if (n == "from_input") return PhaseSource::kFromInput;
  if (n == "from_mixture") return PhaseSource::kFromMixture;
  throw Error(ErrorCode::kConfig, "unknown phase source '" + name + "'");
}

FeatureDomain ParseFeatureDomain(const std::string& name) {
  const std::string n = Lower(name);
  if (n == "log") return FeatureDomain::kLogMagnitude;
  if (n == "magnitude") return FeatureDomain::kMagnitude;
  throw Error(ErrorCode::kConfig, "unknown feature domain '" + name + "'");
}

void CodecAdapterConfig::Validate() const {
  stft.Validate();
  if (!(log_floor > 0.0) || !std::isfinite(log_floor)) {
    throw Error(ErrorCode::kConfig, "adapter: log floor must be positive");
  }
  const std::size_t d = FeatureDim(), bins = stft.bins();
  if (projection == Projection::kIdentity && d != bins) {
    throw Error(ErrorCode::kConfig, "adapter: identity projection needs D = bins (" +
                                        std::to_string(bins) + "), got " + std::to_string(d));
  }
  if (projection == Projection::kRandomOrthonormal && d < bins) {
    throw Error(ErrorCode::kConfig, "adapter: projection to D = " + std::to_string(d) +
                                        " < bins = " + std::to_string(bins) + " is not invertible");
  }
}

CodecAdapter::CodecAdapter(const CodecAdapterConfig& cfg) : cfg_(cfg) {
  cfg_.Validate();
  const std::size_t d = dim(), bins = cfg_.stft.bins();
  if (cfg_.projection == Projection::kIdentity) {
    projection_ = RealMatrix(d, bins);
    for (std::size_t i = 0; i < d; ++i) projection_(i, i) = 1.0;
  } else {
    projection_ = Orthonormal(d, bins, cfg_.seed);
  }
}

RealMatrix CodecAdapter::Project(const RealMatrix& per_bin) const {
  if (per_bin.cols != projection_.cols) {
    throw Error(ErrorCode::kShapeMismatch, "adapter: expected " +
                                               std::to_string(projection_.cols) + " bins, got " +
                                               std::to_string(per_bin.cols));
  }
  if (cfg_.projection == Projection::kIdentity) return per_bin;
  RealMatrix z(per_bin.rows, projection_.rows);
  for (std::size_t t = 0; t < per_bin.rows; ++t) {
    for (std::size_t d = 0; d < projection_.rows; ++d) {
      double acc = 0.0;
      for (std::size_t f = 0; f < projection_.cols; ++f) acc += projection_(d, f) * per_bin(t, f);
      z(t, d) = acc;
    }
  }
  return z;
}

RealMatrix CodecAdapter::BackProject(const RealMatrix& z) const {
  if (z.cols != projection_.rows) {
    throw Error(ErrorCode::kShapeMismatch, "adapter: expected " +
                                               std::to_string(projection_.rows) +
                                               " feature columns, got " + std::to_string(z.cols));
  }
  if (cfg_.projection == Projection::kIdentity) return z;
  RealMatrix out(z.rows, projection_.cols);
  for (std::size_t t = 0; t < z.rows; ++t) {
    for (std::size_t f = 0; f < projection_.cols; ++f) {
      double acc = 0.0;
      for (std::size_t d = 0; d < projection_.rows; ++d) acc += projection_(d, f) * z(t, d);
      out(t, f) = acc;
    }
  }
  return out;
}

EncodedFeatures CodecAdapter::EncodeMagnitude(const RealMatrix& magnitude,
                                              const ComplexSpectrogram& phase) const {
  RequireSameShape(magnitude.rows, magnitude.cols, phase.frames, phase.bins, "adapter encode");
  RealMatrix per_bin = magnitude;
  if (cfg_.domain == FeatureDomain::kLogMagnitude) {
    for (double& v : per_bin.data) v = std::log(std::max(v, cfg_.log_floor));
  }
  return {Project(per_bin), phase};
}

EncodedFeatures CodecAdapter::Encode(const Waveform& x) const {
  const ComplexSpectrogram spec = Stft(x, cfg_.stft);
  return EncodeMagnitude(spec.Magnitude(), spec);
}

Waveform CodecAdapter::Decode(const RealMatrix& zq, const ComplexSpectrogram& phase) const {
  RealMatrix mag = BackProject(zq);
  RequireSameShape(mag.rows, mag.cols, phase.frames, phase.bins, "adapter decode");
  for (double& v : mag.data) {
    v = cfg_.domain == FeatureDomain::kLogMagnitude ? std::exp(v) : std::max(v, 0.0);
  }
  return Istft(WithMagnitude(phase, mag));
}

RestorationOutput RunRestoration(const Waveform& denoised, const Waveform& mixture,
                                 const CodecAdapter& adapter, const RestorationConfig& cfg) {
  const StftConfig& stft = adapter.config().stft;
  const bool need_mixture =
      cfg.fusion.has_value() || adapter.config().phase_source == PhaseSource::kFromMixture;
  if (need_mixture) {
    RequireSameRate(denoised, mixture, "restoration");
    RequireSameLength(denoised, mixture, "restoration");
  }
  const ComplexSpectrogram den_spec = Stft(denoised, stft);
  std::optional<ComplexSpectrogram> mix_spec;
  if (need_mixture) mix_spec = Stft(mixture, stft);

  RealMatrix magnitude = den_spec.Magnitude();
  if (cfg.fusion) magnitude = FuseFeatures(magnitude, mix_spec->Magnitude(), *cfg.fusion);
  const ComplexSpectrogram& phase =
      adapter.config().phase_source == PhaseSource::kFromMixture ? *mix_spec : den_spec;

  RestorationOutput out;
  EncodedFeatures enc = adapter.EncodeMagnitude(magnitude, phase);
  out.features = std::move(enc.z);
  if (cfg.stack != nullptr) {
    if (cfg.stack->dim != adapter.dim()) {
      throw Error(ErrorCode::kShapeMismatch, "restoration: codebook dimension " +
                                                 std::to_string(cfg.stack->dim) +
                                                 " does not match feature dimension " +
                                                 std::to_string(adapter.dim()));
    }
    QuantizeResult q = Quantize(*cfg.stack, out.features);
    out.quantized = q.quantized;
    out.codes = std::move(q);
  } else {
    out.quantized = out.features;
  }
  out.restored = adapter.Decode(out.quantized, enc.phase);
  out.restored.sample_rate = denoised.sample_rate;
  return out;
}

PipelineOutput RunPipeline(const Waveform& mixture, const PipelineConfig& cfg,
                           const CodecAdapter& adapter, const Waveform* reference,
                           const Waveform* dry) {
  PipelineOutput out;
  out.denoised = RunDn(mixture, cfg.mask, cfg.dn_stft, reference);
  RestorationOutput r = RunRestoration(out.denoised, mixture, adapter, cfg.restoration);
  out.restored = std::move(r.restored);
  out.features = std::move(r.features);
  out.quantized = std::move(r.quantized);
  out.codes = std::move(r.codes);
  out.metrics = Evaluate(out, dry, reference, adapter.config().stft);
  return out;
}

PipelineOutput RunPipeline(const MixtureRecord& rec, const PipelineConfig& cfg,
                           const CodecAdapter& adapter) {
  return RunPipeline(rec.mixture, cfg, adapter, &rec.reverberant, &rec.dry);
}

Metrics Evaluate(const PipelineOutput& out, const Waveform* dry, const Waveform* reverberant,
                 const StftConfig& lsd_stft) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const Waveform* ref : {dry, reverberant}) {
    if (ref == nullptr) continue;
    RequireSameRate(out.restored, *ref, "evaluate");
    RequireSameLength(out.restored, *ref, "evaluate");
    RequireSameLength(out.denoised, *ref, "evaluate");
  }
  Metrics m;
  m.emplace_back("si_sdr_dry", dry ? SiSdr(out.restored, *dry) : nan);
  m.emplace_back("si_sdr_reverb", reverberant ? SiSdr(out.restored, *reverberant) : nan);
  m.emplace_back("si_sdr_denoised_reverb",
                 reverberant ? SiSdr(out.denoised, *reverberant) : nan);
  m.emplace_back("lsd", dry ? LogSpectralDistance(out.restored, *dry, lsd_stft) : nan);
  m.emplace_back("feature_mse", out.features.data.empty()
                                    ? nan
                                    : MeanSquaredError(out.features, out.quantized));
  if (out.codes) {
    const auto& e = out.codes->per_stage_residual_energy;
    for (std::size_t i = 0; i < e.size(); ++i) {
      m.emplace_back("residual_energy_" + std::to_string(i + 1), e[i]);
    }
  }
  return m;
}

void Report::AddRow(const std::string& id, const Metrics& metrics) {
  if (rows.empty() && columns.empty()) {
    for (const auto& [name, value] : metrics) columns.push_back(name);
  }
  if (metrics.size() != columns.size()) {
    throw Error(ErrorCode::kShapeMismatch, "report: row '" + id + "' has " +
                                               std::to_string(metrics.size()) + " metrics, expected " +
                                               std::to_string(columns.size()));
  }
  std::vector<double> row;
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    if (metrics[i].first != columns[i]) {
      throw Error(ErrorCode::kShapeMismatch, "report: column '" + metrics[i].first +
                                                 "' where '" + columns[i] + "' was expected");
    }
    row.push_back(metrics[i].second);
  }
  ids.push_back(id);
  rows.push_back(std::move(row));
}

bool Report::operator==(const Report& other) const {
  if (header != other.header || columns != other.columns || ids != other.ids ||
      rows.size() != other.rows.size()) {
    return false;
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != other.rows[r].size()) return false;
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      const double a = rows[r][c], b = other.rows[r][c];
      if (std::isnan(a) && std::isnan(b)) continue;
      if (std::bit_cast<std::uint64_t>(a) != std::bit_cast<std::uint64_t>(b)) return false;
    }
  }
  return true;
}

std::string FormatReport(const Report& report) {
  std::ostringstream os;
  for (const auto& [key, value] : report.header) {
    if (key.find_first_of("=\n") != std::string::npos || value.find('\n') != std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "report: header entry '" + key + "' cannot be stored");
    }
    os << "# " << key << '=' << value << '\n';
  }
  os << "id";
  for (const std::string& c : report.columns) os << '\t' << c;
  os << '\n';
  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    os << report.ids[r];
    for (double v : report.rows[r]) os << '\t' << FormatDouble(v);
    os << '\n';
  }
  return os.str();
}

Report ParseReport(const std::string& text) {
  Report report;
  bool have_columns = false;
  std::size_t line_no = 0;
  for (const std::string& raw : Split(text, '\n')) {
    ++line_no;
    const std::string where = "report line " + std::to_string(line_no);
    if (raw.empty()) continue;
    if (raw[0] == '#') {
      if (have_columns) throw Error(ErrorCode::kFormat, where + ": header after column row");
      std::string_view body(raw);
      body.remove_prefix(1);
      if (!body.empty() && body[0] == ' ') body.remove_prefix(1);
      const std::size_t eq = body.find('=');
      if (eq == std::string_view::npos) throw Error(ErrorCode::kFormat, where + ": expected key=value");
      report.header.emplace_back(std::string(body.substr(0, eq)), std::string(body.substr(eq + 1)));
      continue;
    }
    std::vector<std::string> fields = Split(raw, '\t');
    if (!have_columns) {
      if (fields.empty() || fields[0] != "id") {
        throw Error(ErrorCode::kFormat, where + ": column row must start with 'id'");
      }
      report.columns.assign(fields.begin() + 1, fields.end());
      have_columns = true;
      continue;
    }
    if (fields.size() != report.columns.size() + 1) {
      throw Error(ErrorCode::kFormat, where + ": expected " +
                                          std::to_string(report.columns.size() + 1) + " fields");
    }
    std::vector<double> row;
    for (std::size_t i = 1; i < fields.size(); ++i) row.push_back(ParseDouble(fields[i], where));
    report.ids.push_back(fields[0]);
    report.rows.push_back(std::move(row));
  }
  if (!have_columns) throw Error(ErrorCode::kFormat, "report: missing column row");
  return report;
}

void WriteReport(const std::string& path, const Report& report) {
  WriteFileAtomically(path, FormatReport(report));
}

Report ReadReport(const std::string& path) {
  const std::vector<std::uint8_t> bytes = ReadFileBytes(path);
  return ParseReport(std::string(bytes.begin(), bytes.end()));
}

}  // namespace progse
