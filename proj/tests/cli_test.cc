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

#include <filesystem>
#include <sstream>

#include "progse/blob_io.h"
#include "progse/cli/commands.h"
#include "progse/cli/run_config.h"
#include "progse/codebook_io.h"
#include "progse/dataset.h"
#include "progse/objectives.h"
#include "progse/pipeline.h"
#include "progse/text.h"
#include "progse/wav.h"

namespace progse::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = Main(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path Fresh(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("progse_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const std::vector<std::string> kSmall = {
    "--set", "sim.count=3",      "--set", "sim.segment_seconds=0.5", "--set", "sim.snr_db=-5,0,5",
    "--set", "quantizer.N=16",   "--set", "quantizer.n_q=3",         "--set", "train.epochs=2"};

std::vector<std::string> With(std::vector<std::string> head) {
  head.insert(head.end(), kSmall.begin(), kSmall.end());
  return head;
}

TEST(Config, UnknownKeyAndBadValuesAreConfigErrors) {
  RunConfig c;
  EXPECT_THROW(c.Set("quantizer.M", "3"), Error);
  c.Set("quantizer.scheme", "nope");
  try {
    Resolve(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
  RunConfig d;
  d.LoadText("# comment\nseed = 12  # trailing\nfusion.beta=0.25\n", "t");
  const Resolved r = Resolve(d);
  EXPECT_EQ(r.seed, 12u);
  ASSERT_TRUE(r.fusion.has_value());
  EXPECT_EQ(r.fusion->beta, 0.25);
  EXPECT_THROW(d.LoadText("novalue\n", "t"), Error);
}

TEST(Config, DefaultsResolve) {
  const Resolved r = Resolve(RunConfig{});
  EXPECT_EQ(r.stack.dim, 257u);
  EXPECT_EQ(r.stack.scheme, Scheme::kSqRvq);
  EXPECT_EQ(r.stack.scalar_k, 8);
  EXPECT_FALSE(r.fusion.has_value());
}

TEST(Cli, ExitCodes) {
  const fs::path dir = Fresh("codes");
  EXPECT_EQ(Invoke({"simulate", "--set", "sim.rt60=-1", "-o", (dir / "x").string()}).code, 2);
  EXPECT_FALSE(fs::exists(dir / "x"));
  EXPECT_EQ(Invoke({"simulate", "--set", "bogus=1", "-o", (dir / "x").string()}).code, 2);
  EXPECT_EQ(Invoke({"simulate"}).code, 2);
  EXPECT_EQ(Invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(Invoke({"--help"}).code, 0);
  const Result missing = Invoke({"run", "-b", (dir / "nope.bin").string(), "-i", "x.wav", "-o",
                              (dir / "o").string()});
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.err.find("nope.bin"), std::string::npos);
}

TEST(Cli, SimulateRoundRobinLevels) {
  const fs::path dir = Fresh("sim");
  const Result r = Invoke(With({"simulate", "--seed", "3", "-o", dir.string()}));
  ASSERT_EQ(r.code, 0) << r.err;
  const Manifest m = ReadManifest((dir / "manifest.tsv").string());
  ASSERT_EQ(m.rows.size(), 3u);
  EXPECT_EQ(m.rows[0].snr_db, -5.0);
  EXPECT_EQ(m.rows[1].snr_db, 0.0);
  EXPECT_EQ(m.rows[2].snr_db, 5.0);
}

TEST(Cli, TrainRunEval) {
  const fs::path dir = Fresh("flow");
  ASSERT_EQ(Invoke(With({"simulate", "-o", (dir / "data").string()})).code, 0);
  const std::string manifest = (dir / "data" / "manifest.tsv").string();
  const std::string cb = (dir / "cb.bin").string();
  Result t = Invoke(With({"train-codebook", "-m", manifest, "-o", cb, "--set", "train.ema_decay=0",
                       "--set", "train.dead_code_fraction=0"}));
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_EQ(LoadCodebooks(cb).scheme, Scheme::kSqRvq);

  // stats rows per (branch, stage) must not increase in mse
  const auto bytes = ReadFileBytes(cb + ".stats.tsv");
  std::string key;
  double prev = INFINITY;
  for (const std::string& line : Split(std::string(bytes.begin(), bytes.end()), '\n')) {
    if (line.empty() || line[0] == '#' || line.rfind("branch", 0) == 0) continue;
    const auto f = Split(line, '\t');
    const std::string k = f[0] + "/" + f[1];
    const double mse = ParseDouble(f[3], "mse");
    if (k == key) EXPECT_LE(mse, prev + 1e-12);
    key = k;
    prev = mse;
  }

  Result r = Invoke(With({"run", "-b", cb, "-m", manifest, "-o", (dir / "out").string()}));
  ASSERT_EQ(r.code, 0) << r.err;
  const Report report = ReadReport((dir / "out" / "report.tsv").string());
  EXPECT_EQ(report.ids.size(), 3u);
  std::vector<std::string> expected{"si_sdr_dry", "si_sdr_reverb", "si_sdr_denoised_reverb",
                                    "lsd", "feature_mse", "residual_energy_1",
                                    "residual_energy_2", "residual_energy_3"};
  EXPECT_EQ(report.columns, expected);
  EXPECT_TRUE(fs::exists(dir / "out" / "rec00000.wav"));
  EXPECT_TRUE(fs::exists(dir / "out" / "rec00000_denoised.wav"));
  bool has_version = false;
  for (const auto& [k, v] : report.header) has_version |= k == "version" && v == kVersion;
  EXPECT_TRUE(has_version);

  // estimates equal to the dry references score at the cap
  const Manifest m = ReadManifest(manifest);
  const fs::path est = dir / "est";
  fs::create_directories(est);
  for (const ManifestRow& row : m.rows) fs::copy_file(m.Resolve(row.dry_path), est / (row.id + ".wav"));
  Result e = Invoke({"eval", "-e", est.string(), "-m", manifest});
  ASSERT_EQ(e.code, 0) << e.err;
  const Report ev = ReadReport((est / "eval.tsv").string());
  ASSERT_EQ(ev.ids.size(), 3u + 2u + 3u);
  EXPECT_EQ(ev.ids[3], "mean");
  EXPECT_EQ(ev.ids[4], "median");
  EXPECT_EQ(ev.ids[5], "snr=-5");
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(ev.rows[i][1], kSiSdrCapDb);
}

TEST(Cli, SingleFileModeAndEmptyManifest) {
  const fs::path dir = Fresh("single");
  ASSERT_EQ(Invoke(With({"simulate", "-o", (dir / "data").string()})).code, 0);
  const std::string manifest = (dir / "data" / "manifest.tsv").string();
  const std::string cb = (dir / "cb.bin").string();
  ASSERT_EQ(Invoke(With({"train-codebook", "-m", manifest, "-o", cb})).code, 0);

  const std::string mix = (dir / "data" / "rec00001_mix.wav").string();
  Result r = Invoke(With({"run", "-b", cb, "-i", mix, "-o", (dir / "out").string(), "--set",
                       "mask.source=passthrough"}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "out" / "rec00001_mix.wav"));
  EXPECT_TRUE(fs::exists(dir / "out" / "report.tsv"));
  // oracle masks need a reference in single-file mode
  EXPECT_EQ(Invoke(With({"run", "-b", cb, "-i", mix, "-o", (dir / "o2").string()})).code, 1);

  WriteFileAtomically((dir / "empty.tsv").string(), std::string(kManifestHeader) + "\n");
  EXPECT_EQ(Invoke(With({"train-codebook", "-m", (dir / "empty.tsv").string(), "-o",
                      (dir / "e.bin").string()})).code,
            1);
}

TEST(Cli, RirAndQuantize) {
  const fs::path dir = Fresh("misc");
  Result r = Invoke({"rir", "-o", (dir / "r.wav").string(), "--set", "rir.max_order=0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("direct_path_index\t160"), std::string::npos);

  StackOptions o;
  o.dim = 4;
  o.n_q = 2;
  o.codebook_size = 4;
  QuantizerStack stack = MakeStack(o);
  RandomizeCodebooks(stack, 2, 1.0);
  SaveCodebooks(stack, (dir / "cb.bin").string());
  RealMatrix z(3, 4, 0.3);
  SaveMatrixBlob((dir / "z.blob").string(), z);
  r = Invoke({"quantize", "-b", (dir / "cb.bin").string(), "-i", (dir / "z.blob").string(), "-o",
           (dir / "codes.blob").string(), "--dequantized", (dir / "zq.blob").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const QuantizeResult q = Quantize(stack, z);
  EXPECT_EQ(LoadCodesBlob((dir / "codes.blob").string()), q.codes);
  EXPECT_EQ(LoadMatrixBlob((dir / "zq.blob").string()), q.quantized);
}

}  // namespace
}  // namespace progse::cli
