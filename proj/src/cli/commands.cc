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


#include "progse/cli/commands.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "progse/blob_io.h"
#include "progse/cli/run_config.h"
#include "progse/codebook_io.h"
#include "progse/dataset.h"
#include "progse/objectives.h"
#include "progse/pipeline.h"
#include "progse/simulate.h"
#include "progse/text.h"
#include "progse/train.h"
#include "progse/wav.h"

namespace progse::cli {
namespace {

namespace fs = std::filesystem;

struct CommonFlags {
  std::string config_path;
  std::vector<std::string> sets;
  std::string seed;
};

void AddCommon(CLI::App* sub, CommonFlags& f) {
  sub->add_option("-c,--config", f.config_path, "key=value config file");
  sub->add_option("--set", f.sets, "override one config key (key=value), repeatable");
  sub->add_option("--seed", f.seed, "master seed, overrides the config");
}

RunConfig LoadConfig(const CommonFlags& f) {
  RunConfig c;
  if (!f.config_path.empty()) c.LoadFile(f.config_path);
  for (const std::string& s : f.sets) c.SetAssignment(s);
  if (!f.seed.empty()) c.Set("seed", f.seed);
  return c;
}

void RequireFile(const std::string& path, const std::string& what) {
  if (path.empty()) throw Error(ErrorCode::kConfig, what + " path is required");
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kIo, what + " not found: " + path);
  }
}

void RequireDir(const std::string& path, const std::string& what) {
  std::error_code ec;
  if (!fs::is_directory(path, ec)) throw Error(ErrorCode::kIo, what + " not found: " + path);
}

void MakeDirs(const std::string& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create directory " + path + ": " + ec.message());
}

std::vector<std::pair<std::string, std::string>> ReportHeader(const RunConfig& c,
                                                              const std::string& command) {
  std::vector<std::pair<std::string, std::string>> h{{"version", kVersion},
                                                     {"command", command}};
  for (auto& e : c.HeaderEntries()) h.push_back(std::move(e));
  return h;
}

MaskSource MakeMaskSource(const Resolved& r, const std::string& id) {
  MaskSource m;
  m.kind = r.mask_kind;
  m.bound = r.mask_bound;
  if (m.kind == MaskSource::Kind::kFile) {
    m.mask = LoadMaskBlob((fs::path(r.mask_dir) / (id + ".mask")).string());
  }
  return m;
}

RestorationConfig MakeRestoration(const Resolved& r, const QuantizerStack* stack) {
  RestorationConfig rc;
  rc.stack = stack;
  if (r.fusion) {
    FusionConfig f = *r.fusion;
    if (!r.fusion_affine_path.empty()) f.affine = LoadAffineFusion(r.fusion_affine_path);
    rc.fusion = f;
  }
  return rc;
}

void CheckRate(const Waveform& w, const Resolved& r, const std::string& what) {
  if (w.sample_rate != r.sample_rate) {
    throw Error(ErrorCode::kSampleRateMismatch,
                what + ": sample rate " + std::to_string(w.sample_rate) +
                    " differs from configured " + std::to_string(r.sample_rate));
  }
}

std::string FileStem(const std::string& path) { return fs::path(path).stem().string(); }

// ---------------------------------------------------------------- simulate

int CmdSimulate(const CommonFlags& flags, const std::string& out_dir, std::ostream& out) {
  const RunConfig c = LoadConfig(flags);
  const Resolved r = Resolve(c);
  if (out_dir.empty()) throw Error(ErrorCode::kConfig, "--out is required");
  for (const auto& p : r.dataset.speech_paths) RequireFile(p, "speech file");
  for (const auto& p : r.dataset.noise_paths) RequireFile(p, "noise file");
  MakeDirs(out_dir);
  out << SynthesizeDataset(r.dataset, r.seed, out_dir) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------- train-codebook

RealMatrix TrainingFeatures(const Resolved& r, const CodecAdapter& adapter,
                            const Manifest& manifest, const ManifestRow& row) {
  const MixtureRecord rec = LoadRecord(manifest, row);
  CheckRate(rec.mixture, r, row.id);
  if (r.train_source == "dry") return adapter.Encode(rec.dry).z;
  if (r.train_source == "reverb") return adapter.Encode(rec.reverberant).z;
  if (r.train_source == "mix") return adapter.Encode(rec.mixture).z;
  const Waveform den = RunDn(rec.mixture, MakeMaskSource(r, row.id), r.stft, &rec.reverberant);
  return RunRestoration(den, rec.mixture, adapter, MakeRestoration(r, nullptr)).features;
}

int CmdTrain(const CommonFlags& flags, const std::string& manifest_path,
             const std::string& out_path, std::string stats_path, std::ostream& out,
             std::ostream& err) {
  const RunConfig c = LoadConfig(flags);
  const Resolved r = Resolve(c);
  if (out_path.empty()) throw Error(ErrorCode::kConfig, "--out is required");
  RequireFile(manifest_path, "manifest");
  if (!r.fusion_affine_path.empty()) RequireFile(r.fusion_affine_path, "fusion affine file");
  if (stats_path.empty()) stats_path = out_path + ".stats.tsv";

  const Manifest manifest = ReadManifest(manifest_path);
  if (manifest.rows.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "manifest has no rows: " + manifest_path);
  }
  const CodecAdapter adapter(r.adapter);
  std::vector<RealMatrix> data;
  for (const ManifestRow& row : manifest.rows) {
    data.push_back(TrainingFeatures(r, adapter, manifest, row));
  }
  QuantizerStack stack = MakeStack(r.stack);
  const TrainStats stats = TrainCodebooks(stack, data, r.train);
  for (const std::string& w : stats.warnings) err << "warning: " << w << '\n';

  std::ostringstream os;
  for (const auto& [k, v] : ReportHeader(c, "train-codebook")) os << "# " << k << '=' << v << '\n';
  os << "# final_mse=" << FormatDouble(stats.final_mse) << '\n';
  os << "branch\tstage\tepoch\tmse\treseeded\n";
  for (const EpochStat& e : stats.epochs) {
    os << e.branch << '\t' << e.stage << '\t' << e.epoch << '\t' << FormatDouble(e.mse) << '\t'
       << e.reseeded << '\n';
  }
  SaveCodebooks(stack, out_path);
  WriteFileAtomically(stats_path, os.str());
  out << "scheme " << SchemeName(stack.scheme) << " final_mse " << FormatDouble(stats.final_mse)
      << '\n';
  return kExitOk;
}

// --------------------------------------------------------------------- run

struct RunFlags {
  std::string codebook;
  std::string manifest;
  std::string input;
  std::string reference;
  std::string dry;
  std::string out_dir;
};

int CmdRun(const CommonFlags& flags, const RunFlags& f, std::ostream& out) {
  const RunConfig c = LoadConfig(flags);
  const Resolved r = Resolve(c);
  if (f.manifest.empty() == f.input.empty()) {
    throw Error(ErrorCode::kConfig, "run needs exactly one of --manifest or --input");
  }
  if (f.out_dir.empty()) throw Error(ErrorCode::kConfig, "--out is required");
  RequireFile(f.codebook, "codebook");
  if (!f.manifest.empty()) RequireFile(f.manifest, "manifest");
  if (!f.input.empty()) RequireFile(f.input, "input");
  if (!f.reference.empty()) RequireFile(f.reference, "reference");
  if (!f.dry.empty()) RequireFile(f.dry, "dry reference");
  if (r.mask_kind == MaskSource::Kind::kFile) RequireDir(r.mask_dir, "mask directory");
  if (!r.fusion_affine_path.empty()) RequireFile(r.fusion_affine_path, "fusion affine file");

  const QuantizerStack stack = LoadCodebooks(f.codebook);
  const CodecAdapter adapter(r.adapter);
  if (stack.dim != adapter.dim()) {
    throw Error(ErrorCode::kShapeMismatch,
                "codebook " + f.codebook + " has dimension " + std::to_string(stack.dim) +
                    " but the adapter produces " + std::to_string(adapter.dim()));
  }
  PipelineConfig pc;
  pc.dn_stft = r.stft;
  pc.restoration = MakeRestoration(r, &stack);

  Report report;
  report.header = ReportHeader(c, "run");
  report.header.emplace_back("codebook_scheme", SchemeName(stack.scheme));
  MakeDirs(f.out_dir);

  auto emit = [&](const std::string& id, const PipelineOutput& po) {
    WriteWav((fs::path(f.out_dir) / (id + ".wav")).string(), po.restored, r.output_format);
    WriteWav((fs::path(f.out_dir) / (id + "_denoised.wav")).string(), po.denoised,
             r.output_format);
    report.AddRow(id, po.metrics);
  };

  if (!f.manifest.empty()) {
    const Manifest manifest = ReadManifest(f.manifest);
    if (manifest.rows.empty()) throw Error(ErrorCode::kInvalidArgument, "manifest has no rows");
    for (const ManifestRow& row : manifest.rows) {
      const MixtureRecord rec = LoadRecord(manifest, row);
      CheckRate(rec.mixture, r, row.id);
      pc.mask = MakeMaskSource(r, row.id);
      emit(row.id, RunPipeline(rec, pc, adapter));
    }
  } else {
    const std::string id = FileStem(f.input);
    std::error_code ec;
    const fs::path target = fs::path(f.out_dir) / (id + ".wav");
    if (fs::exists(target, ec) && fs::equivalent(target, f.input, ec)) {
      throw Error(ErrorCode::kConfig, "output " + target.string() + " would overwrite the input");
    }
    const Waveform y = ReadWav(f.input);
    CheckRate(y, r, f.input);
    std::optional<Waveform> reference, dry;
    if (!f.reference.empty()) reference = ReadWav(f.reference);
    if (!f.dry.empty()) dry = ReadWav(f.dry);
    pc.mask = MakeMaskSource(r, id);
    emit(id, RunPipeline(y, pc, adapter, reference ? &*reference : nullptr,
                         dry ? &*dry : nullptr));
  }
  const std::string report_path = (fs::path(f.out_dir) / "report.tsv").string();
  WriteReport(report_path, report);
  out << report_path << '\n';
  return kExitOk;
}

// -------------------------------------------------------------------- eval

double Median(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double Mean(const std::vector<double>& v) {
  double acc = 0.0;
  std::size_t n = 0;
  for (double x : v) {
    if (std::isnan(x)) continue;
    acc += x;
    ++n;
  }
  return n ? acc / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

int CmdEval(const CommonFlags& flags, const std::string& estimates, const std::string& manifest_path,
            std::string out_path, std::ostream& out) {
  const RunConfig c = LoadConfig(flags);
  const Resolved r = Resolve(c);
  RequireDir(estimates, "estimates directory");
  RequireFile(manifest_path, "manifest");
  if (out_path.empty()) out_path = (fs::path(estimates) / "eval.tsv").string();

  const Manifest manifest = ReadManifest(manifest_path);
  if (manifest.rows.empty()) throw Error(ErrorCode::kInvalidArgument, "manifest has no rows");
  Report report;
  report.header = ReportHeader(c, "eval");
  std::vector<double> snrs;
  for (const ManifestRow& row : manifest.rows) {
    const std::string path = (fs::path(estimates) / (row.id + ".wav")).string();
    RequireFile(path, "estimate");
    const Waveform est = ReadWav(path);
    const MixtureRecord rec = LoadRecord(manifest, row);
    RequireSameRate(est, rec.dry, row.id.c_str());
    RequireSameLength(est, rec.dry, row.id.c_str());
    report.AddRow(row.id, {{"snr_db", row.snr_db},
                           {"si_sdr_dry", SiSdr(est, rec.dry)},
                           {"si_sdr_reverb", SiSdr(est, rec.reverberant)},
                           {"lsd", LogSpectralDistance(est, rec.dry, r.stft)}});
    snrs.push_back(row.snr_db);
  }

  const std::size_t n_rows = report.rows.size();
  auto aggregate = [&](const std::string& id, const std::vector<std::size_t>& members,
                       bool median) {
    std::vector<double> row;
    for (std::size_t col = 0; col < report.columns.size(); ++col) {
      std::vector<double> v;
      for (std::size_t m : members) v.push_back(report.rows[m][col]);
      row.push_back(median ? Median(v) : Mean(v));
    }
    report.ids.push_back(id);
    report.rows.push_back(row);
  };
  std::vector<std::size_t> all(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) all[i] = i;
  aggregate("mean", all, false);
  aggregate("median", all, true);
  std::map<double, std::vector<std::size_t>> by_snr;
  for (std::size_t i = 0; i < n_rows; ++i) by_snr[snrs[i]].push_back(i);
  for (const auto& [snr, members] : by_snr) aggregate("snr=" + FormatDouble(snr), members, false);

  WriteReport(out_path, report);
  out << FormatReport(report);
  return kExitOk;
}

// --------------------------------------------------------------------- rir

int CmdRir(const CommonFlags& flags, const std::string& out_path, std::ostream& out) {
  const RunConfig c = LoadConfig(flags);
  const Resolved r = Resolve(c);
  if (out_path.empty()) throw Error(ErrorCode::kConfig, "--out is required");
  const Rir rir = GenerateRir(r.rir_room, r.sample_rate);
  WriteWav(out_path, Waveform{rir.taps, r.sample_rate}, WavFormat::kFloat32);
  out << "taps\t" << rir.taps.size() << '\n';
  out << "direct_path_index\t" << rir.direct_path_index << '\n';
  out << "absorption\t" << FormatDouble(r.rir_room.Absorption()) << '\n';
  try {
    out << "rt60_estimate\t" << FormatDouble(EstimateRt60(rir)) << '\n';
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInsufficientDecay) throw;
    out << "rt60_estimate\tnan\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- quantize

int CmdQuantize(const CommonFlags& flags, const std::string& codebook, const std::string& input,
                const std::string& out_path, const std::string& dequantized, std::ostream& out) {
  const RunConfig c = LoadConfig(flags);
  Resolve(c);
  if (out_path.empty()) throw Error(ErrorCode::kConfig, "--out is required");
  RequireFile(codebook, "codebook");
  RequireFile(input, "feature matrix");
  const QuantizerStack stack = LoadCodebooks(codebook);
  const RealMatrix z = LoadMatrixBlob(input);
  const QuantizeResult q = Quantize(stack, z);
  SaveCodesBlob(out_path, q.codes);
  if (!dequantized.empty()) SaveMatrixBlob(dequantized, q.quantized);
  out << "frames\t" << z.rows << '\n' << "mse\t" << FormatDouble(MeanSquaredError(z, q.quantized))
      << '\n';
  return kExitOk;
}

}  // namespace

int Main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"progse: quantization and two-stage speech restoration toolkit", "progse"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  CommonFlags common;
  std::string out_dir, manifest, out_path, stats, estimates, codebook, input, dequantized;
  RunFlags run;

  CLI::App* sim = app.add_subcommand("simulate", "synthesize a noisy reverberant dataset");
  AddCommon(sim, common);
  sim->add_option("-o,--out", out_dir, "output directory")->required();

  CLI::App* train = app.add_subcommand("train-codebook", "train quantizer codebooks");
  AddCommon(train, common);
  train->add_option("-m,--manifest", manifest, "dataset manifest")->required();
  train->add_option("-o,--out", out_path, "codebook file to write")->required();
  train->add_option("--stats", stats, "training statistics TSV (default <out>.stats.tsv)");

  CLI::App* runc = app.add_subcommand("run", "denoise and restore utterances");
  AddCommon(runc, common);
  runc->add_option("-b,--codebook", run.codebook, "trained codebook file")->required();
  runc->add_option("-m,--manifest", run.manifest, "dataset manifest");
  runc->add_option("-i,--input", run.input, "single mixture WAV");
  runc->add_option("--reference", run.reference, "reverberant target for single-file mode");
  runc->add_option("--dry", run.dry, "dry reference for single-file mode");
  runc->add_option("-o,--out", run.out_dir, "output directory")->required();

  CLI::App* eval = app.add_subcommand("eval", "score estimates against manifest references");
  AddCommon(eval, common);
  eval->add_option("-e,--estimates", estimates, "directory holding <id>.wav")->required();
  eval->add_option("-m,--manifest", manifest, "dataset manifest")->required();
  eval->add_option("-o,--out", out_path, "report path (default <estimates>/eval.tsv)");

  CLI::App* rir = app.add_subcommand("rir", "generate one room impulse response");
  AddCommon(rir, common);
  rir->add_option("-o,--out", out_path, "WAV file to write")->required();

  CLI::App* quant = app.add_subcommand("quantize", "quantize a feature matrix blob");
  AddCommon(quant, common);
  quant->add_option("-b,--codebook", codebook, "trained codebook file")->required();
  quant->add_option("-i,--input", input, "feature matrix blob")->required();
  quant->add_option("-o,--out", out_path, "codes blob to write")->required();
  quant->add_option("--dequantized", dequantized, "also write the reconstruction");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sim->parsed()) return CmdSimulate(common, out_dir, out);
    if (train->parsed()) return CmdTrain(common, manifest, out_path, stats, out, err);
    if (runc->parsed()) return CmdRun(common, run, out);
    if (eval->parsed()) return CmdEval(common, estimates, manifest, out_path, out);
    if (rir->parsed()) return CmdRir(common, out_path, out);
    if (quant->parsed()) return CmdQuantize(common, codebook, input, out_path, dequantized, out);
  } catch (const Error& e) {
    err << "error [" << ErrorCodeName(e.code()) << "]: " << e.what() << '\n';
    return e.code() == ErrorCode::kConfig ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace progse::cli
