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


#include "progse/quantize.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <random>

namespace progse {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::size_t CodesPerStage(const Stage& stage, std::size_t frames, std::size_t width) {
  return std::holds_alternative<VqStage>(stage) ? frames : frames * width;
}

// Reconstruction of one stage from its codes. Quantize() goes through this
// function too, which makes Dequantize() bit-exact by construction.
RealMatrix DecodeStage(const Stage& stage, const StageCodes& codes, std::size_t frames,
                       std::size_t width) {
  RealMatrix q(frames, width);
  std::visit(Overloaded{
                 [&](const ScalarStage& s) {
                   for (std::size_t i = 0; i < q.data.size(); ++i) {
                     q.data[i] = codes[i] / static_cast<double>(s.k);
                   }
                 },
                 [&](const VqStage& s) {
                   for (std::size_t t = 0; t < frames; ++t) {
                     auto c = s.codebook.code(static_cast<std::size_t>(codes[t]));
                     std::copy(c.begin(), c.end(), q.row(t).begin());
                   }
                 },
                 [&](const FsqStage& s) {
                   for (std::size_t t = 0; t < frames; ++t) {
                     for (std::size_t j = 0; j < width; ++j) {
                       const double half = (s.levels[j] - 1) / 2;
                       q(t, j) = codes[t * width + j] / half;
                     }
                   }
                 },
                 [&](const LfqStage& s) {
                   for (std::size_t i = 0; i < q.data.size(); ++i) {
                     q.data[i] = codes[i] * s.scale;
                   }
                 },
             },
             stage);
  return q;
}

StageCodes EncodeStage(const Stage& stage, const RealMatrix& residual) {
  const std::size_t frames = residual.rows;
  const std::size_t width = residual.cols;
  StageCodes codes(CodesPerStage(stage, frames, width));
  std::visit(Overloaded{
                 [&](const ScalarStage& s) {
                   for (std::size_t i = 0; i < codes.size(); ++i) {
                     codes[i] = ScalarLevel(residual.data[i], s.k);
                   }
                 },
                 [&](const VqStage& s) {
                   for (std::size_t t = 0; t < frames; ++t) {
                     codes[t] = static_cast<std::int32_t>(NearestCode(residual.row(t), s.codebook));
                   }
                 },
                 [&](const FsqStage& s) {
                   for (std::size_t t = 0; t < frames; ++t) {
                     for (std::size_t j = 0; j < width; ++j) {
                       codes[t * width + j] = ScalarLevel(residual(t, j), (s.levels[j] - 1) / 2);
                     }
                   }
                 },
                 [&](const LfqStage& s) {
                   for (std::size_t t = 0; t < frames; ++t) {
                     auto r = residual.row(t);
                     double before = 0.0, after = 0.0;
                     for (std::size_t j = 0; j < width; ++j) {
                       const std::int32_t sign = r[j] >= 0.0 ? 1 : -1;
                       codes[t * width + j] = sign;
                       const double d = r[j] - sign * s.scale;
                       before += r[j] * r[j];
                       after += d * d;
                     }
                     if (s.reserved_zero && !(after < before)) {
                       std::fill_n(codes.begin() + static_cast<std::ptrdiff_t>(t * width), width, 0);
                     }
                   }
                 },
             },
             stage);
  return codes;
}

void CheckStageCodes(const Stage& stage, const StageCodes& codes, std::size_t frames,
                     std::size_t width) {
  if (codes.size() != CodesPerStage(stage, frames, width)) {
    throw Error(ErrorCode::kShapeMismatch, "dequantize: stage code count does not match");
  }
  auto out_of_range = [](const std::string& what) {
    return Error(ErrorCode::kOutOfRange, "dequantize: " + what);
  };
  std::visit(Overloaded{
                 [&](const ScalarStage& s) {
                   for (auto c : codes) {
                     if (c < -s.k || c > s.k) throw out_of_range("scalar level out of range");
                   }
                 },
                 [&](const VqStage& s) {
                   for (auto c : codes) {
                     if (c < 0 || static_cast<std::size_t>(c) >= s.codebook.size) {
                       throw out_of_range("code index " + std::to_string(c) + " >= " +
                                          std::to_string(s.codebook.size));
                     }
                   }
                 },
                 [&](const FsqStage& s) {
                   for (std::size_t i = 0; i < codes.size(); ++i) {
                     const int half = (s.levels[i % width] - 1) / 2;
                     if (codes[i] < -half || codes[i] > half) {
                       throw out_of_range("fsq level out of range");
                     }
                   }
                 },
                 [&](const LfqStage& s) {
                   for (std::size_t t = 0; t < frames; ++t) {
                     const auto* row = codes.data() + t * width;
                     const bool zero_row = std::all_of(row, row + width, [](auto c) { return c == 0; });
                     if (zero_row && s.reserved_zero) continue;
                     for (std::size_t j = 0; j < width; ++j) {
                       if (row[j] != 1 && row[j] != -1) throw out_of_range("lfq code not +-1");
                     }
                   }
                 },
             },
             stage);
}

RealMatrix ColumnBlock(const RealMatrix& z, std::size_t offset, std::size_t width) {
  if (offset == 0 && width == z.cols) return z;
  RealMatrix out(z.rows, width);
  for (std::size_t t = 0; t < z.rows; ++t) {
    auto src = z.row(t).subspan(offset, width);
    std::copy(src.begin(), src.end(), out.row(t).begin());
  }
  return out;
}

double SquaredNorm(const RealMatrix& m) {
  double e = 0.0;
  for (double v : m.data) e += v * v;
  return e;
}

std::string Upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

const char* SchemeName(Scheme scheme) {
  switch (scheme) {
    case Scheme::kSq: return "SQ";
    case Scheme::kRsq: return "RSQ";
    case Scheme::kRvq: return "RVQ";
    case Scheme::kSqRvq: return "SQ_RVQ";
    case Scheme::kGroupSqRvq: return "GROUP_SQ_RVQ";
    case Scheme::kSqParRvq: return "SQ_PAR_RVQ";
    case Scheme::kRfsq: return "RFSQ";
    case Scheme::kRlfq: return "RLFQ";
  }
  return "?";
}

Scheme ParseScheme(const std::string& name) {
  std::string upper = Upper(name);
  std::replace(upper.begin(), upper.end(), '-', '_');
  for (Scheme s : kAllSchemes) {
    if (upper == SchemeName(s)) return s;
  }
  throw Error(ErrorCode::kConfig, "unknown quantizer scheme '" + name + "'");
}

bool IsAdditive(Scheme scheme) { return scheme != Scheme::kSqParRvq; }

Codebook::Codebook(std::size_t n, std::size_t d, bool reserve_zero)
    : size(n),
      dim(d),
      vectors(n * d, 0.0f),
      ema_counts(n, 0.0),
      ema_sums(n * d, 0.0),
      reserved_zero(reserve_zero) {}

void Codebook::Validate() const {
  if (size == 0 || dim == 0) throw Error(ErrorCode::kInvalidArgument, "codebook: empty");
  if (vectors.size() != size * dim) {
    throw Error(ErrorCode::kShapeMismatch, "codebook: vector storage does not match N x D");
  }
  for (float v : vectors) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "codebook: non-finite entry");
  }
  if (reserved_zero) {
    for (float v : code(0)) {
      if (v != 0.0f) throw Error(ErrorCode::kInvalidArgument, "codebook: reserved code 0 is not zero");
    }
  }
}

std::size_t StageDim(const Stage& stage) {
  return std::visit(Overloaded{
                        [](const ScalarStage&) -> std::size_t { return 0; },
                        [](const VqStage& s) { return s.codebook.dim; },
                        [](const FsqStage& s) { return s.levels.size(); },
                        [](const LfqStage& s) { return s.dim; },
                    },
                    stage);
}

std::size_t QuantizerStack::BranchWidth(std::size_t) const {
  return scheme == Scheme::kGroupSqRvq ? dim / group_count : dim;
}

std::size_t QuantizerStack::BranchOffset(std::size_t b) const {
  return scheme == Scheme::kGroupSqRvq ? b * BranchWidth(b) : 0;
}

std::size_t QuantizerStack::PrimaryBranch() const { return scheme == Scheme::kSqParRvq ? 1 : 0; }

void QuantizerStack::Validate() const {
  auto bad = [](const std::string& why) { return Error(ErrorCode::kInvalidArgument, "stack: " + why); };
  if (dim == 0) throw bad("dimension must be positive");
  if (n_q == 0) throw bad("n_q must be positive");
  std::size_t expected_branches = 1;
  if (scheme == Scheme::kGroupSqRvq) {
    if (group_count == 0 || dim % group_count != 0) {
      throw bad("dimension " + std::to_string(dim) + " not divisible by group_count " +
                std::to_string(group_count));
    }
    expected_branches = group_count;
  } else if (scheme == Scheme::kSqParRvq) {
    expected_branches = 2;
    if (!(parallel_weight >= 0.0 && parallel_weight <= 1.0)) {
      throw bad("parallel weight must lie in [0, 1]");
    }
  }
  if (branches.size() != expected_branches) throw bad("wrong number of branches");

  for (std::size_t b = 0; b < branches.size(); ++b) {
    const Chain& chain = branches[b];
    std::size_t want = n_q;
    if (scheme == Scheme::kSq || (scheme == Scheme::kSqParRvq && b == 0)) want = 1;
    if (chain.size() != want) {
      throw bad("branch " + std::to_string(b) + " has " + std::to_string(chain.size()) +
                " stages, expected " + std::to_string(want));
    }
    for (std::size_t i = 0; i < chain.size(); ++i) {
      const Stage& st = chain[i];
      bool kind_ok = false;
      switch (scheme) {
        case Scheme::kSq:
        case Scheme::kRsq:
          kind_ok = std::holds_alternative<ScalarStage>(st);
          break;
        case Scheme::kRvq:
          kind_ok = std::holds_alternative<VqStage>(st);
          break;
        case Scheme::kSqRvq:
        case Scheme::kGroupSqRvq:
          kind_ok = i == 0 ? std::holds_alternative<ScalarStage>(st)
                           : std::holds_alternative<VqStage>(st);
          break;
        case Scheme::kSqParRvq:
          kind_ok = b == 0 ? std::holds_alternative<ScalarStage>(st)
                           : std::holds_alternative<VqStage>(st);
          break;
        case Scheme::kRfsq:
          kind_ok = std::holds_alternative<FsqStage>(st);
          break;
        case Scheme::kRlfq:
          kind_ok = std::holds_alternative<LfqStage>(st);
          break;
      }
      if (!kind_ok) throw bad(std::string("stage kind does not fit scheme ") + SchemeName(scheme));
      const std::size_t sd = StageDim(st);
      if (sd != 0 && sd != BranchWidth(b)) {
        throw Error(ErrorCode::kShapeMismatch, "stack: stage dimension " + std::to_string(sd) +
                                                   " != branch width " +
                                                   std::to_string(BranchWidth(b)));
      }
      if (const auto* s = std::get_if<ScalarStage>(&st); s && s->k < 1) throw bad("K must be >= 1");
      if (const auto* v = std::get_if<VqStage>(&st)) v->codebook.Validate();
      if (const auto* f = std::get_if<FsqStage>(&st)) {
        for (int l : f->levels) {
          if (l < 3 || l % 2 == 0) throw bad("fsq level counts must be odd and >= 3");
        }
      }
      if (const auto* l = std::get_if<LfqStage>(&st); l && !(l->scale > 0.0)) {
        throw bad("lfq scale must be positive");
      }
    }
  }
}

QuantizerStack MakeStack(const StackOptions& o) {
  QuantizerStack stack;
  stack.scheme = o.scheme;
  stack.dim = o.dim;
  stack.n_q = o.n_q;
  stack.group_count = o.scheme == Scheme::kGroupSqRvq ? o.group_count : 1;
  stack.parallel_weight = o.parallel_weight;
  if (o.scheme == Scheme::kSq) stack.n_q = 1;
  if (o.dim == 0 || o.n_q == 0 || o.codebook_size == 0) {
    throw Error(ErrorCode::kInvalidArgument, "stack: dim, n_q and codebook size must be positive");
  }
  if (o.scheme == Scheme::kGroupSqRvq && (o.group_count == 0 || o.dim % o.group_count != 0)) {
    throw Error(ErrorCode::kInvalidArgument, "stack: dim not divisible by group_count");
  }

  auto vq = [&](std::size_t width) {
    return Stage{VqStage{Codebook(o.codebook_size, width, o.reserved_zero)}};
  };
  auto scalar = Stage{ScalarStage{o.scalar_k}};
  switch (o.scheme) {
    case Scheme::kSq:
      stack.branches = {Chain{scalar}};
      break;
    case Scheme::kRsq:
      stack.branches = {Chain(o.n_q, scalar)};
      break;
    case Scheme::kRvq:
      stack.branches = {Chain(o.n_q, vq(o.dim))};
      break;
    case Scheme::kSqRvq:
    case Scheme::kGroupSqRvq: {
      const std::size_t width = stack.BranchWidth(0);
      Chain chain{scalar};
      for (std::size_t i = 1; i < o.n_q; ++i) chain.push_back(vq(width));
      stack.branches.assign(stack.group_count, chain);
      break;
    }
    case Scheme::kSqParRvq:
      stack.branches = {Chain{scalar}, Chain(o.n_q, vq(o.dim))};
      break;
    case Scheme::kRfsq:
      stack.branches = {Chain(o.n_q, Stage{FsqStage{std::vector<int>(o.dim, o.fsq_levels)}})};
      break;
    case Scheme::kRlfq: {
      Chain chain;
      for (std::size_t i = 0; i < o.n_q; ++i) {
        chain.push_back(LfqStage{o.dim, std::ldexp(o.lfq_scale, -static_cast<int>(i)), o.reserved_zero});
      }
      stack.branches = {chain};
      break;
    }
  }
  stack.Validate();
  return stack;
}

void RandomizeCodebooks(QuantizerStack& stack, std::uint64_t seed, double stddev) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, stddev);
  for (Chain& chain : stack.branches) {
    for (Stage& st : chain) {
      if (auto* v = std::get_if<VqStage>(&st)) {
        Codebook& cb = v->codebook;
        for (std::size_t i = cb.reserved_zero ? 1 : 0; i < cb.size; ++i) {
          for (float& x : cb.code(i)) x = static_cast<float>(gauss(rng));
        }
      }
    }
  }
}

int ScalarLevel(double z, int k) {
  return static_cast<int>(std::round(std::tanh(z) * k));
}

double ScalarQuantize(double z, int k) { return ScalarLevel(z, k) / static_cast<double>(k); }

RealMatrix ScalarQuantize(const RealMatrix& z, int k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "scalar_quantize: K must be >= 1");
  RealMatrix out(z.rows, z.cols);
  for (std::size_t i = 0; i < z.data.size(); ++i) {
    if (!std::isfinite(z.data[i])) {
      throw Error(ErrorCode::kInvalidArgument, "scalar_quantize: non-finite input");
    }
    out.data[i] = ScalarQuantize(z.data[i], k);
  }
  return out;
}

std::size_t NearestCode(std::span<const double> v, const Codebook& codebook) {
  if (v.size() != codebook.dim) {
    throw Error(ErrorCode::kShapeMismatch, "nearest_code: vector dimension " +
                                               std::to_string(v.size()) + " != codebook dimension " +
                                               std::to_string(codebook.dim));
  }
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < codebook.size; ++i) {
    const float* c = codebook.vectors.data() + i * codebook.dim;
    double dist = 0.0;
    std::size_t j = 0;
    // Partial sums only grow, so stopping once they exceed the best keeps
    // the result identical to a full evaluation.
    for (; j < v.size(); ++j) {
      const double d = v[j] - static_cast<double>(c[j]);
      dist += d * d;
      if (dist > best_dist) break;
    }
    if (j == v.size() && dist < best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  return best;
}

RealMatrix QuantizeStage(const Stage& stage, const RealMatrix& residual) {
  const std::size_t sd = StageDim(stage);
  if (sd != 0 && sd != residual.cols) {
    throw Error(ErrorCode::kShapeMismatch, "quantize_stage: residual width does not match stage");
  }
  return DecodeStage(stage, EncodeStage(stage, residual), residual.rows, residual.cols);
}

QuantizeResult Quantize(const QuantizerStack& stack, const RealMatrix& z) {
  stack.Validate();
  if (z.cols != stack.dim) {
    throw Error(ErrorCode::kShapeMismatch, "quantize: features have " + std::to_string(z.cols) +
                                               " columns, stack expects " +
                                               std::to_string(stack.dim));
  }
  for (double v : z.data) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "quantize: non-finite feature");
  }
  QuantizeResult result;
  result.codes.frames = z.rows;
  result.codes.branches.resize(stack.branches.size());
  result.branch_residual_energy.resize(stack.branches.size());

  for (std::size_t b = 0; b < stack.branches.size(); ++b) {
    const std::size_t width = stack.BranchWidth(b);
    RealMatrix residual = ColumnBlock(z, stack.BranchOffset(b), width);
    for (const Stage& stage : stack.branches[b]) {
      StageCodes codes = EncodeStage(stage, residual);
      RealMatrix q = DecodeStage(stage, codes, z.rows, width);
      for (std::size_t i = 0; i < q.data.size(); ++i) residual.data[i] -= q.data[i];
      result.branch_residual_energy[b].push_back(SquaredNorm(residual));
      result.codes.branches[b].push_back(std::move(codes));
    }
  }

  if (stack.scheme == Scheme::kGroupSqRvq) {
    result.per_stage_residual_energy.assign(stack.n_q, 0.0);
    for (const auto& energies : result.branch_residual_energy) {
      for (std::size_t i = 0; i < energies.size(); ++i) result.per_stage_residual_energy[i] += energies[i];
    }
  } else {
    result.per_stage_residual_energy = result.branch_residual_energy[stack.PrimaryBranch()];
  }
  result.quantized = Dequantize(stack, result.codes);
  return result;
}

std::vector<std::vector<RealMatrix>> StageReconstructions(const QuantizerStack& stack,
                                                          const Codes& codes) {
  stack.Validate();
  if (codes.branches.size() != stack.branches.size()) {
    throw Error(ErrorCode::kShapeMismatch, "dequantize: branch count does not match the stack");
  }
  std::vector<std::vector<RealMatrix>> out(stack.branches.size());
  for (std::size_t b = 0; b < stack.branches.size(); ++b) {
    const Chain& chain = stack.branches[b];
    if (codes.branches[b].size() != chain.size()) {
      throw Error(ErrorCode::kShapeMismatch, "dequantize: stage count does not match the stack");
    }
    const std::size_t width = stack.BranchWidth(b);
    for (std::size_t i = 0; i < chain.size(); ++i) {
      CheckStageCodes(chain[i], codes.branches[b][i], codes.frames, width);
      out[b].push_back(DecodeStage(chain[i], codes.branches[b][i], codes.frames, width));
    }
  }
  return out;
}

RealMatrix Dequantize(const QuantizerStack& stack, const Codes& codes) {
  const auto stages = StageReconstructions(stack, codes);
  std::vector<RealMatrix> sums;
  for (std::size_t b = 0; b < stages.size(); ++b) {
    RealMatrix sum(codes.frames, stack.BranchWidth(b));
    for (const RealMatrix& q : stages[b]) {
      for (std::size_t i = 0; i < sum.data.size(); ++i) sum.data[i] += q.data[i];
    }
    sums.push_back(std::move(sum));
  }
  RealMatrix out(codes.frames, stack.dim);
  if (stack.scheme == Scheme::kSqParRvq) {
    const double w = stack.parallel_weight;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
      out.data[i] = w * sums[0].data[i] + (1.0 - w) * sums[1].data[i];
    }
    return out;
  }
  for (std::size_t b = 0; b < sums.size(); ++b) {
    const std::size_t offset = stack.BranchOffset(b);
    for (std::size_t t = 0; t < codes.frames; ++t) {
      auto src = sums[b].row(t);
      std::copy(src.begin(), src.end(), out.row(t).begin() + static_cast<std::ptrdiff_t>(offset));
    }
  }
  return out;
}

double MeanSquaredError(const RealMatrix& a, const RealMatrix& b) {
  RequireSameShape(a.rows, a.cols, b.rows, b.cols, "mse");
  if (a.data.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.data.size());
}

}  // namespace progse
