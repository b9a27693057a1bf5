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
#include <random>
#include <set>

#include "oracles.h"
#include "progse/quantize.h"

namespace progse {
namespace {

RealMatrix RandomMatrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> g(0.0, sd);
  RealMatrix m(rows, cols);
  for (double& v : m.data) v = g(rng);
  return m;
}

StackOptions SmallOptions(Scheme scheme) {
  StackOptions o;
  o.scheme = scheme;
  o.dim = 8;
  o.n_q = 4;
  o.codebook_size = 16;
  o.group_count = 2;
  return o;
}

TEST(ScalarQuantizer, WorkedValue) { EXPECT_EQ(ScalarQuantize(0.3, 8), 0.25); }

TEST(ScalarQuantizer, MatchesGridFormulaAndBound) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int k : {1, 2, 8, 16}) {
    std::set<double> distinct;
    for (int i = 0; i < 20000; ++i) {
      const double z = g(rng);
      const double r = ScalarQuantize(z, k);
      EXPECT_EQ(r, oracle::ScalarGrid(z, k));
      EXPECT_LE(std::abs(r - std::tanh(z)), 0.5 / k + 1e-15);
      distinct.insert(r);
    }
    EXPECT_LE(distinct.size(), static_cast<std::size_t>(2 * k + 1));
  }
}

TEST(ScalarQuantizer, RejectsBadK) {
  RealMatrix z(1, 1);
  EXPECT_THROW(ScalarQuantize(z, 0), Error);
}

TEST(SchemeNames, RoundTrip) {
  for (Scheme s : kAllSchemes) EXPECT_EQ(ParseScheme(SchemeName(s)), s);
  EXPECT_EQ(ParseScheme("sq_rvq"), Scheme::kSqRvq);
  try {
    ParseScheme("PQ");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
  EXPECT_FALSE(IsAdditive(Scheme::kSqParRvq));
  EXPECT_TRUE(IsAdditive(Scheme::kRvq));
}

TEST(NearestCode, MatchesBruteForce) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    Codebook cb(33, 5, false);
    std::normal_distribution<float> g(0.0f, 1.0f);
    for (float& v : cb.vectors) v = g(rng);
    const RealMatrix pts = RandomMatrix(200, 5, rng);
    for (std::size_t t = 0; t < pts.rows; ++t) {
      EXPECT_EQ(NearestCode(pts.row(t), cb), oracle::Nearest(&pts.data[t * 5], cb.vectors.data(), 33, 5));
    }
  }
}

TEST(NearestCode, TiesGoToLowestIndex) {
  Codebook cb(3, 1, false);
  cb.vectors = {1.0f, -1.0f, 1.0f};
  const std::vector<double> v{0.0};
  EXPECT_EQ(NearestCode(v, cb), 0u);
}

TEST(Quantize, DequantizeReproducesQuantizedOutput) {
  std::mt19937_64 rng(3);
  for (Scheme s : kAllSchemes) {
    QuantizerStack stack = MakeStack(SmallOptions(s));
    RandomizeCodebooks(stack, 11, 0.5);
    const RealMatrix z = RandomMatrix(12, 8, rng);
    const QuantizeResult q = Quantize(stack, z);
    EXPECT_EQ(Dequantize(stack, q.codes), q.quantized) << SchemeName(s);
  }
}

TEST(Quantize, ResidualEnergyNonIncreasingWithReservedZero) {
  std::mt19937_64 rng(4);
  for (Scheme s : kAllSchemes) {
    QuantizerStack stack = MakeStack(SmallOptions(s));
    RandomizeCodebooks(stack, 12, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
      const RealMatrix z = RandomMatrix(10, 8, rng, 1.5);
      const QuantizeResult q = Quantize(stack, z);
      double prev = 0.0;
      for (double v : z.data) prev += v * v;
      for (double e : q.per_stage_residual_energy) {
        EXPECT_LE(e, prev + 1e-9) << SchemeName(s);
        prev = e;
      }
    }
  }
}

TEST(Quantize, SqOutputIsScalarGrid) {
  std::mt19937_64 rng(5);
  QuantizerStack stack = MakeStack(SmallOptions(Scheme::kSq));
  const RealMatrix z = RandomMatrix(6, 8, rng);
  const QuantizeResult q = Quantize(stack, z);
  for (std::size_t i = 0; i < z.data.size(); ++i) {
    EXPECT_EQ(q.quantized.data[i], oracle::ScalarGrid(z.data[i], 8));
  }
}

TEST(Quantize, RvqFirstStageIsNearestCode) {
  std::mt19937_64 rng(6);
  QuantizerStack stack = MakeStack(SmallOptions(Scheme::kRvq));
  RandomizeCodebooks(stack, 13, 1.0);
  const RealMatrix z = RandomMatrix(20, 8, rng);
  const QuantizeResult q = Quantize(stack, z);
  const Codebook& cb = std::get<VqStage>(stack.branches[0][0]).codebook;
  for (std::size_t t = 0; t < z.rows; ++t) {
    EXPECT_EQ(static_cast<std::size_t>(q.codes.branches[0][0][t]),
              oracle::Nearest(&z.data[t * 8], cb.vectors.data(), cb.size, 8));
  }
}

TEST(Quantize, ExactCodesReproduceFeatures) {
  // every row of z is a code vector, so one RVQ stage is lossless
  std::mt19937_64 rng(7);
  StackOptions o = SmallOptions(Scheme::kRvq);
  o.n_q = 2;
  QuantizerStack stack = MakeStack(o);
  RandomizeCodebooks(stack, 14, 1.0);
  const Codebook& cb = std::get<VqStage>(stack.branches[0][0]).codebook;
  RealMatrix z(cb.size, 8);
  for (std::size_t i = 0; i < cb.vectors.size(); ++i) z.data[i] = cb.vectors[i];
  const QuantizeResult q = Quantize(stack, z);
  EXPECT_EQ(MeanSquaredError(q.quantized, z), 0.0);
}

TEST(Quantize, ParallelMixesBranches) {
  std::mt19937_64 rng(8);
  StackOptions o = SmallOptions(Scheme::kSqParRvq);
  o.parallel_weight = 0.25;
  QuantizerStack stack = MakeStack(o);
  RandomizeCodebooks(stack, 15, 1.0);
  const RealMatrix z = RandomMatrix(5, 8, rng);
  const QuantizeResult q = Quantize(stack, z);
  const auto parts = StageReconstructions(stack, q.codes);
  ASSERT_EQ(parts.size(), 2u);
  for (std::size_t i = 0; i < z.data.size(); ++i) {
    double rvq = 0.0;
    for (const RealMatrix& m : parts[1]) rvq += m.data[i];
    EXPECT_NEAR(q.quantized.data[i], 0.25 * parts[0][0].data[i] + 0.75 * rvq, 1e-12);
  }
}

TEST(Quantize, GroupsSplitColumns) {
  std::mt19937_64 rng(9);
  QuantizerStack stack = MakeStack(SmallOptions(Scheme::kGroupSqRvq));
  EXPECT_EQ(stack.branches.size(), 2u);
  EXPECT_EQ(stack.BranchWidth(1), 4u);
  EXPECT_EQ(stack.BranchOffset(1), 4u);
  EXPECT_THROW(
      {
        StackOptions o = SmallOptions(Scheme::kGroupSqRvq);
        o.group_count = 3;
        MakeStack(o);
      },
      Error);
}

TEST(Quantize, FsqAndLfqLevels) {
  std::mt19937_64 rng(10);
  const RealMatrix z = RandomMatrix(4, 8, rng);
  const RealMatrix fsq = QuantizeStage(FsqStage{std::vector<int>(8, 5)}, z);
  for (std::size_t i = 0; i < z.data.size(); ++i) EXPECT_EQ(fsq.data[i], oracle::ScalarGrid(z.data[i], 2));
  const RealMatrix lfq = QuantizeStage(LfqStage{8, 0.5, false}, z);
  for (std::size_t i = 0; i < z.data.size(); ++i) EXPECT_EQ(std::abs(lfq.data[i]), 0.5);
}

TEST(Quantize, ShapeAndCodeErrors) {
  QuantizerStack stack = MakeStack(SmallOptions(Scheme::kRvq));
  EXPECT_THROW(Quantize(stack, RealMatrix(3, 7)), Error);
  Codes codes = Quantize(stack, RealMatrix(2, 8)).codes;
  codes.branches[0][1][0] = 99;
  try {
    Dequantize(stack, codes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfRange);
  }
}

}  // namespace
}  // namespace progse
