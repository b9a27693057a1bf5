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

#include "progse/blob_io.h"
#include "progse/dataset.h"
#include "progse/objectives.h"
#include "progse/pipeline.h"

namespace progse {
namespace {

MixtureRecord Record(double snr, std::uint64_t seed) {
  DatasetConfig cfg;
  cfg.segment_seconds = 0.5;
  cfg.rt60 = ValueSampler::Levels({0.4});
  cfg.snr_db = ValueSampler::Levels({snr});
  return SynthesizeRecord(cfg, seed, 0);
}

TEST(RunDn, OracleMaskReachesFortyDb) {
  for (double snr : {-5.0, 0.0, 5.0}) {
    const MixtureRecord rec = Record(snr, 1);
    const Waveform x_hat = RunDn(rec.mixture, MaskSource{}, StftConfig{}, &rec.reverberant);
    EXPECT_GE(SiSdr(x_hat, rec.reverberant), 40.0) << snr;
  }
}

TEST(RunDn, PassthroughAndFileMasks) {
  const MixtureRecord rec = Record(0.0, 2);
  MaskSource pass;
  pass.kind = MaskSource::Kind::kPassthrough;
  EXPECT_GE(SiSdr(RunDn(rec.mixture, pass, StftConfig{}), rec.mixture), 60.0);

  const ComplexSpectrogram spec = Stft(rec.mixture, StftConfig{});
  MaskSource file;
  file.kind = MaskSource::Kind::kFile;
  file.mask = ComplexMask{spec.frames, spec.bins, std::vector<std::complex<double>>(spec.data.size())};
  for (double v : RunDn(rec.mixture, file, StftConfig{}).samples) EXPECT_EQ(v, 0.0);

  file.mask->frames -= 1;
  EXPECT_THROW(RunDn(rec.mixture, file, StftConfig{}), Error);
  try {
    RunDn(rec.mixture, MaskSource{}, StftConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingReference);
  }
}

TEST(Adapter, UnquantizedRoundTrip) {
  const MixtureRecord rec = Record(5.0, 3);
  for (Projection p : {Projection::kIdentity, Projection::kRandomOrthonormal}) {
    for (FeatureDomain d : {FeatureDomain::kLogMagnitude, FeatureDomain::kMagnitude}) {
      CodecAdapterConfig cfg;
      cfg.projection = p;
      cfg.domain = d;
      if (p == Projection::kRandomOrthonormal) cfg.feature_dim = 300;
      const CodecAdapter adapter(cfg);
      const EncodedFeatures enc = adapter.Encode(rec.reverberant);
      EXPECT_EQ(enc.z.cols, adapter.dim());
      EXPECT_GE(SiSdr(adapter.Decode(enc.z, enc.phase), rec.reverberant), 40.0);
    }
  }
}

TEST(Adapter, ProjectionIsOrthonormalAndSeeded) {
  CodecAdapterConfig cfg;
  cfg.stft = {64, 16, WindowType::kSqrtHann, true};
  cfg.projection = Projection::kRandomOrthonormal;
  cfg.feature_dim = 40;
  cfg.seed = 5;
  const CodecAdapter a(cfg), b(cfg);
  EXPECT_EQ(a.projection(), b.projection());
  const RealMatrix& p = a.projection();
  for (std::size_t i = 0; i < p.cols; ++i) {
    for (std::size_t j = 0; j < p.cols; ++j) {
      double dot = 0.0;
      for (std::size_t r = 0; r < p.rows; ++r) dot += p(r, i) * p(r, j);
      EXPECT_NEAR(dot, i == j ? 1.0 : 0.0, 1e-12);
    }
  }
  cfg.seed = 6;
  EXPECT_NE(CodecAdapter(cfg).projection(), p);
}

TEST(Adapter, ConfigAndShapeErrors) {
  CodecAdapterConfig cfg;
  cfg.feature_dim = 256;
  EXPECT_THROW(CodecAdapter{cfg}, Error);
  cfg.projection = Projection::kRandomOrthonormal;
  EXPECT_THROW(CodecAdapter{cfg}, Error);
  cfg = CodecAdapterConfig{};
  cfg.log_floor = 0.0;
  EXPECT_THROW(CodecAdapter{cfg}, Error);
  const CodecAdapter adapter{CodecAdapterConfig{}};
  const EncodedFeatures enc = adapter.Encode(Record(0.0, 4).dry);
  EXPECT_THROW(adapter.Decode(RealMatrix(enc.z.rows, 10), enc.phase), Error);
}

TEST(Adapter, SilenceSitsAtLogFloor) {
  const CodecAdapter adapter{CodecAdapterConfig{}};
  const EncodedFeatures enc = adapter.Encode(Waveform{std::vector<double>(1000, 0.0), 16000});
  for (double v : enc.z.data) EXPECT_EQ(v, std::log(1e-7));
}

TEST(Pipeline, ExactCodesReproduceDenoised) {
  const MixtureRecord rec = Record(0.0, 5);
  const CodecAdapter adapter{CodecAdapterConfig{}};
  PipelineConfig cfg;
  const Waveform x_hat = RunDn(rec.mixture, cfg.mask, cfg.dn_stft, &rec.reverberant);
  const RealMatrix z = adapter.Encode(x_hat).z;

  StackOptions o;
  o.scheme = Scheme::kRvq;
  o.dim = adapter.dim();
  o.n_q = 1;
  o.codebook_size = z.rows + 1;
  QuantizerStack stack = MakeStack(o);
  Codebook& cb = std::get<VqStage>(stack.branches[0][0]).codebook;
  for (std::size_t i = 0; i < z.data.size(); ++i) cb.vectors[cb.dim + i] = static_cast<float>(z.data[i]);
  cfg.restoration.stack = &stack;

  const PipelineOutput out = RunPipeline(rec, cfg, adapter);
  EXPECT_LE(MeanSquaredError(out.features, out.quantized), 1e-6);
  EXPECT_GE(SiSdr(out.restored, out.denoised), 40.0);
}

TEST(Pipeline, FusionEndpointsAndMonotonicity) {
  const MixtureRecord rec = Record(0.0, 6);
  const CodecAdapter adapter{CodecAdapterConfig{CodecAdapterConfig{}.stft, Projection::kIdentity,
                                                0, 0, PhaseSource::kFromInput,
                                                FeatureDomain::kMagnitude, 1e-7}};
  PipelineConfig cfg;
  cfg.restoration.fusion = FusionConfig{0.0, {}};
  const PipelineOutput out = RunPipeline(rec, cfg, adapter);
  EXPECT_EQ(out.features, Stft(rec.mixture, adapter.config().stft).Magnitude());

  const RealMatrix den = Stft(out.denoised, adapter.config().stft).Magnitude();
  double prev = INFINITY;
  for (double beta : {0.0, 0.3, 0.6, 0.9, 1.0}) {
    cfg.restoration.fusion = FusionConfig{beta, {}};
    const RealMatrix f = RunPipeline(rec, cfg, adapter).features;
    double dist = 0.0;
    for (std::size_t i = 0; i < f.data.size(); ++i) dist += std::abs(f.data[i] - den.data[i]);
    EXPECT_LE(dist, prev);
    prev = dist;
  }
  EXPECT_EQ(prev, 0.0);
}

TEST(Pipeline, StagesComposeThroughFiles) {
  const MixtureRecord rec = Record(5.0, 7);
  const CodecAdapter adapter{CodecAdapterConfig{}};
  StackOptions o;
  o.dim = adapter.dim();
  o.n_q = 3;
  o.codebook_size = 8;
  QuantizerStack stack = MakeStack(o);
  RandomizeCodebooks(stack, 1, 0.5);
  PipelineConfig cfg;
  cfg.restoration.stack = &stack;
  cfg.restoration.fusion = FusionConfig{0.7, {}};
  const PipelineOutput whole = RunPipeline(rec, cfg, adapter);

  const std::string path = (std::filesystem::temp_directory_path() / "progse_dn.blob").string();
  SaveWaveformBlob(path, RunDn(rec.mixture, cfg.mask, cfg.dn_stft, &rec.reverberant));
  const RestorationOutput second = RunRestoration(LoadWaveformBlob(path), rec.mixture, adapter, cfg.restoration);
  EXPECT_EQ(second.restored.samples, whole.restored.samples);
  EXPECT_EQ(second.codes->codes, whole.codes->codes);
}

TEST(Pipeline, QuantizationNeverImprovesFeatures) {
  const MixtureRecord rec = Record(0.0, 8);
  const CodecAdapter adapter{CodecAdapterConfig{}};
  PipelineConfig cfg;
  const PipelineOutput plain = RunPipeline(rec, cfg, adapter);
  QuantizerStack stack = MakeStack(StackOptions{Scheme::kSq, adapter.dim()});
  cfg.restoration.stack = &stack;
  const PipelineOutput quant = RunPipeline(rec, cfg, adapter);
  EXPECT_EQ(MeanSquaredError(plain.features, plain.quantized), 0.0);
  EXPECT_GT(MeanSquaredError(quant.features, quant.quantized), 0.0);
}

TEST(Evaluate, CapsAndMissingReferences) {
  const MixtureRecord rec = Record(0.0, 9);
  PipelineOutput out;
  out.denoised = rec.reverberant;
  out.restored = rec.dry;
  out.features = RealMatrix(2, 2, 1.0);
  out.quantized = out.features;
  Metrics m = Evaluate(out, &rec.dry, &rec.reverberant);
  EXPECT_EQ(m[0].first, "si_sdr_dry");
  EXPECT_EQ(m[0].second, kSiSdrCapDb);
  EXPECT_EQ(m[2].second, kSiSdrCapDb);
  EXPECT_EQ(m[3].second, 0.0);
  out.restored = rec.reverberant;
  m = Evaluate(out, nullptr, &rec.reverberant);
  EXPECT_TRUE(std::isnan(m[0].second));
  EXPECT_EQ(m[1].second, kSiSdrCapDb);
  Waveform shorter = rec.dry;
  shorter.samples.pop_back();
  EXPECT_THROW(Evaluate(out, &shorter, nullptr), Error);
}

}  // namespace
}  // namespace progse
