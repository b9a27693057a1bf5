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

// Scalar, vector and hybrid quantizers over F x D feature matrices.
//
// A QuantizerStack is a list of branches; each branch is a residual chain of
// stages. Stage i of a chain sees r_i = r_{i-1} - q_{i-1} (r_0 = z) and the
// chain output is sum_i q_i. The schemes map onto branches as follows:
//
//   SQ            one chain: [scalar]
//   RSQ           one chain: [scalar x n_q]
//   RVQ           one chain: [vq x n_q]
//   SQ_RVQ        one chain: [scalar, vq x (n_q - 1)]
//   GROUP_SQ_RVQ  group_count chains, one per contiguous column block, each
//                 [scalar, vq x (n_q - 1)]; outputs are concatenated
//   SQ_PAR_RVQ    two chains fed the same z, [scalar] and [vq x n_q];
//                 output = w * sq + (1 - w) * rvq
//   RFSQ          one chain: [fsq x n_q]
//   RLFQ          one chain: [lfq x n_q], stage i scaled by delta / 2^i
//
// The scalar grid uses K = 8 by default: r = round(tanh(z) * K) / K, which
// takes 2K + 1 distinct values.

#ifndef PROGSE_QUANTIZE_H_
#define PROGSE_QUANTIZE_H_

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "progse/common.h"

namespace progse {

enum class Scheme : std::uint8_t {
  kSq = 0,
  kRsq = 1,
  kRvq = 2,
  kSqRvq = 3,
  kGroupSqRvq = 4,
  kSqParRvq = 5,
  kRfsq = 6,
  kRlfq = 7,
};

inline constexpr Scheme kAllSchemes[] = {Scheme::kSq,         Scheme::kRsq,      Scheme::kRvq,
                                         Scheme::kSqRvq,      Scheme::kGroupSqRvq,
                                         Scheme::kSqParRvq,   Scheme::kRfsq,     Scheme::kRlfq};

const char* SchemeName(Scheme scheme);  // "SQ", "RSQ", ..., "SQ_PAR_RVQ"
Scheme ParseScheme(const std::string& name);  // case-insensitive; kConfig on failure
bool IsAdditive(Scheme scheme);  // every scheme except SQ_PAR_RVQ

// N x D code vectors stored as binary32 so that files round-trip exactly,
// with EMA statistics kept in double precision.
struct Codebook {
  std::size_t size = 0;  // N
  std::size_t dim = 0;   // D
  std::vector<float> vectors;
  std::vector<double> ema_counts;
  std::vector<double> ema_sums;
  bool reserved_zero = true;  // vector 0 is pinned to zero and never trained

  Codebook() = default;
  Codebook(std::size_t n, std::size_t d, bool reserve_zero);

  std::span<const float> code(std::size_t i) const { return {vectors.data() + i * dim, dim}; }
  std::span<float> code(std::size_t i) { return {vectors.data() + i * dim, dim}; }
  void Validate() const;
};

struct ScalarStage {
  int k = 8;
};

struct VqStage {
  Codebook codebook;
};

// Finite scalar quantization: per-dimension odd level counts L_j, output
// round(tanh(r_j) * h_j) / h_j with h_j = (L_j - 1) / 2.
struct FsqStage {
  std::vector<int> levels;
};

// Lookup-free (sign) quantization: output scale * sign(r_j) per component.
// With reserved_zero, a row whose sign code would not reduce its residual is
// emitted as the zero vector instead (all codes 0).
struct LfqStage {
  std::size_t dim = 0;
  double scale = 1.0;
  bool reserved_zero = true;
};

using Stage = std::variant<ScalarStage, VqStage, FsqStage, LfqStage>;
using Chain = std::vector<Stage>;

std::size_t StageDim(const Stage& stage);  // 0 for scalar stages (any width)

struct QuantizerStack {
  Scheme scheme = Scheme::kSqRvq;
  std::size_t dim = 256;
  std::size_t n_q = 8;
  std::size_t group_count = 1;
  double parallel_weight = 0.5;
  std::vector<Chain> branches;

  // kInvalidArgument / kShapeMismatch when branch layout, stage kinds or
  // dimensions disagree with the scheme.
  void Validate() const;
  // Column width seen by branch b.
  std::size_t BranchWidth(std::size_t b) const;
  std::size_t BranchOffset(std::size_t b) const;
  // Index of the chain whose residual energies are reported.
  std::size_t PrimaryBranch() const;
};

struct StackOptions {
  Scheme scheme = Scheme::kSqRvq;
  std::size_t dim = 256;
  std::size_t n_q = 8;
  std::size_t codebook_size = 1024;
  int scalar_k = 8;
  int fsq_levels = 5;
  double lfq_scale = 1.0;
  std::size_t group_count = 2;
  double parallel_weight = 0.5;
  bool reserved_zero = true;
};

// Builds a stack with all-zero codebooks (untrained).
QuantizerStack MakeStack(const StackOptions& options);

// Fills every trainable code vector with N(0, stddev^2) draws; reserved
// zero vectors stay zero.
void RandomizeCodebooks(QuantizerStack& stack, std::uint64_t seed, double stddev);

// Codes of one stage. VQ stages emit one index per row; scalar, FSQ and LFQ
// stages emit one integer level per element (row-major).
using StageCodes = std::vector<std::int32_t>;

struct Codes {
  std::size_t frames = 0;
  std::vector<std::vector<StageCodes>> branches;
  bool operator==(const Codes&) const = default;
};

struct QuantizeResult {
  Codes codes;
  RealMatrix quantized;
  // Sum over rows of the squared residual norm after each stage of the
  // primary chain (summed across groups for the grouped scheme).
  std::vector<double> per_stage_residual_energy;
  std::vector<std::vector<double>> branch_residual_energy;
};

int ScalarLevel(double z, int k);
double ScalarQuantize(double z, int k);
RealMatrix ScalarQuantize(const RealMatrix& z, int k);

// argmin_i ||v - c_i||^2 with ties going to the lowest index.
std::size_t NearestCode(std::span<const double> v, const Codebook& codebook);

// Output q of a single stage applied to `residual` (frames x stage width).
RealMatrix QuantizeStage(const Stage& stage, const RealMatrix& residual);

QuantizeResult Quantize(const QuantizerStack& stack, const RealMatrix& z);
RealMatrix Dequantize(const QuantizerStack& stack, const Codes& codes);

// Per-stage reconstructions q_i of every chain, each frames x branch width.
std::vector<std::vector<RealMatrix>> StageReconstructions(const QuantizerStack& stack,
                                                          const Codes& codes);

double MeanSquaredError(const RealMatrix& a, const RealMatrix& b);

}  // namespace progse

#endif  // PROGSE_QUANTIZE_H_
