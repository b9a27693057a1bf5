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


#include "progse/train.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace progse {
namespace {

RealMatrix Pool(const std::vector<RealMatrix>& data, std::size_t dim) {
  std::size_t rows = 0;
  for (const RealMatrix& m : data) {
    if (m.cols != dim) {
      throw Error(ErrorCode::kShapeMismatch, "train: feature matrix has " +
                                                 std::to_string(m.cols) + " columns, stack expects " +
                                                 std::to_string(dim));
    }
    rows += m.rows;
  }
  if (rows == 0) throw Error(ErrorCode::kInvalidArgument, "train: empty training data");
  RealMatrix pooled(rows, dim);
  std::size_t offset = 0;
  for (const RealMatrix& m : data) {
    std::copy(m.data.begin(), m.data.end(), pooled.data.begin() + static_cast<std::ptrdiff_t>(offset));
    offset += m.data.size();
  }
  return pooled;
}

RealMatrix Columns(const RealMatrix& z, std::size_t offset, std::size_t width) {
  RealMatrix out(z.rows, width);
  for (std::size_t t = 0; t < z.rows; ++t) {
    for (std::size_t j = 0; j < width; ++j) out(t, j) = z(t, offset + j);
  }
  return out;
}

double SquaredDistance(std::span<const double> v, std::span<const float> c) {
  double d = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double e = v[j] - static_cast<double>(c[j]);
    d += e * e;
  }
  return d;
}

std::size_t DistinctRows(const RealMatrix& points) {
  std::vector<std::size_t> order(points.rows);
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    auto ra = points.row(a), rb = points.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  };
  std::sort(order.begin(), order.end(), less);
  std::size_t distinct = points.rows > 0 ? 1 : 0;
  for (std::size_t i = 1; i < order.size(); ++i) distinct += less(order[i - 1], order[i]);
  return distinct;
}

struct Assignment {
  std::vector<std::size_t> index;
  std::vector<double> counts;
  std::vector<double> sums;
  double squared_error = 0.0;
};

// Full-batch assignment; sums accumulate in row order for reproducibility.
Assignment Assign(const RealMatrix& points, const Codebook& cb) {
  Assignment a;
  a.index.resize(points.rows);
  a.counts.assign(cb.size, 0.0);
  a.sums.assign(cb.size * cb.dim, 0.0);
  for (std::size_t t = 0; t < points.rows; ++t) {
    auto row = points.row(t);
    const std::size_t k = NearestCode(row, cb);
    a.index[t] = k;
    a.counts[k] += 1.0;
    double* sum = a.sums.data() + k * cb.dim;
    for (std::size_t j = 0; j < cb.dim; ++j) sum[j] += row[j];
    a.squared_error += SquaredDistance(row, cb.code(k));
  }
  return a;
}

double ResidualMse(const RealMatrix& points, const Codebook& cb) {
  if (points.data.empty()) return 0.0;
  double err = 0.0;
  for (std::size_t t = 0; t < points.rows; ++t) {
    err += SquaredDistance(points.row(t), cb.code(NearestCode(points.row(t), cb)));
  }
  return err / static_cast<double>(points.data.size());
}

double MeanSquare(const RealMatrix& m) {
  if (m.data.empty()) return 0.0;
  double e = 0.0;
  for (double v : m.data) e += v * v;
  return e / static_cast<double>(m.data.size());
}

std::string StageName(std::size_t branch, std::size_t stage) {
  return "branch " + std::to_string(branch) + " stage " + std::to_string(stage);
}

void TrainVqStage(Codebook& cb, const RealMatrix& residual, const TrainConfig& cfg,
                  std::size_t branch, std::size_t stage, TrainStats& stats) {
  if (cb.size > cfg.max_codebook_size) {
    throw Error(ErrorCode::kInvalidArgument,
                "train: codebook size " + std::to_string(cb.size) + " exceeds cap " +
                    std::to_string(cfg.max_codebook_size));
  }
  const std::uint64_t seed = StageSeed(cfg.seed, branch, stage);
  const std::size_t first_free = cb.reserved_zero ? 1 : 0;
  const std::size_t free_codes = cb.size - first_free;
  const std::size_t distinct = DistinctRows(residual);
  if (free_codes > distinct) {
    stats.warnings.push_back(StageName(branch, stage) + ": " + std::to_string(distinct) +
                             " distinct training vectors for " + std::to_string(free_codes) +
                             " trainable codes; " + std::to_string(free_codes - distinct) +
                             " codes will be dead");
  }

  Codebook init = KMeansPlusPlus(residual, cb.size, cb.reserved_zero, seed);
  for (std::size_t it = 0; it < cfg.kmeans_iters; ++it) {
    Assignment a = Assign(residual, init);
    for (std::size_t k = first_free; k < init.size; ++k) {
      if (a.counts[k] == 0.0) continue;
      for (std::size_t j = 0; j < init.dim; ++j) {
        init.vectors[k * init.dim + j] = static_cast<float>(a.sums[k * init.dim + j] / a.counts[k]);
      }
    }
  }
  {
    Assignment a = Assign(residual, init);
    init.ema_counts = a.counts;
    for (std::size_t k = 0; k < init.size; ++k) {
      for (std::size_t j = 0; j < init.dim; ++j) {
        init.ema_sums[k * init.dim + j] = a.counts[k] * init.vectors[k * init.dim + j];
      }
    }
  }
  if (cfg.keep_initial_codebooks) stats.initial_codebooks.push_back(init);
  cb = std::move(init);

  std::mt19937_64 reseed_rng(DeriveSeed(seed, 0x5eed));
  const double gamma = cfg.ema_decay;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Assignment a = Assign(residual, cb);
    for (std::size_t k = first_free; k < cb.size; ++k) {
      cb.ema_counts[k] = gamma * cb.ema_counts[k] + (1.0 - gamma) * a.counts[k];
      for (std::size_t j = 0; j < cb.dim; ++j) {
        double& s = cb.ema_sums[k * cb.dim + j];
        s = gamma * s + (1.0 - gamma) * a.sums[k * cb.dim + j];
      }
      if (cb.ema_counts[k] > 0.0) {
        for (std::size_t j = 0; j < cb.dim; ++j) {
          cb.vectors[k * cb.dim + j] =
              static_cast<float>(cb.ema_sums[k * cb.dim + j] / cb.ema_counts[k]);
        }
      }
    }

    std::size_t reseeded = 0;
    if (free_codes > 0 && cfg.dead_code_fraction > 0.0) {
      double mean = 0.0;
      for (std::size_t k = first_free; k < cb.size; ++k) mean += cb.ema_counts[k];
      mean /= static_cast<double>(free_codes);
      std::uniform_int_distribution<std::size_t> pick(0, residual.rows - 1);
      for (std::size_t k = first_free; k < cb.size; ++k) {
        if (cb.ema_counts[k] < cfg.dead_code_fraction * mean) {
          auto src = residual.row(pick(reseed_rng));
          for (std::size_t j = 0; j < cb.dim; ++j) cb.vectors[k * cb.dim + j] = static_cast<float>(src[j]);
          cb.ema_counts[k] = 0.0;
          std::fill_n(cb.ema_sums.begin() + static_cast<std::ptrdiff_t>(k * cb.dim), cb.dim, 0.0);
          ++reseeded;
        }
      }
    }
    stats.epochs.push_back({branch, stage, epoch, ResidualMse(residual, cb), reseeded});
  }
  if (cfg.epochs == 0) stats.epochs.push_back({branch, stage, 0, ResidualMse(residual, cb), 0});
}

}  // namespace

void TrainConfig::Validate() const {
  if (!(ema_decay >= 0.0 && ema_decay < 1.0)) {
    throw Error(ErrorCode::kConfig, "train: ema_decay must lie in [0, 1)");
  }
  if (!(dead_code_fraction >= 0.0)) {
    throw Error(ErrorCode::kConfig, "train: dead_code_fraction must be >= 0");
  }
}

std::uint64_t StageSeed(std::uint64_t seed, std::size_t branch, std::size_t stage) {
  return DeriveSeed(DeriveSeed(seed, branch), stage);
}

Codebook KMeansPlusPlus(const RealMatrix& points, std::size_t size, bool reserved_zero,
                        std::uint64_t seed) {
  if (points.rows == 0) throw Error(ErrorCode::kInvalidArgument, "kmeans++: no points");
  if (size == 0) throw Error(ErrorCode::kInvalidArgument, "kmeans++: empty codebook");
  Codebook cb(size, points.cols, reserved_zero);
  std::mt19937_64 rng(seed);
  std::vector<double> min_dist(points.rows);
  std::size_t next = 0;
  auto refresh = [&](std::size_t k) {
    for (std::size_t t = 0; t < points.rows; ++t) {
      min_dist[t] = std::min(min_dist[t], SquaredDistance(points.row(t), cb.code(k)));
    }
  };
  std::fill(min_dist.begin(), min_dist.end(), std::numeric_limits<double>::infinity());
  if (reserved_zero) {
    refresh(0);
    next = 1;
  }
  std::uniform_int_distribution<std::size_t> uniform_row(0, points.rows - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t k = next; k < size; ++k) {
    const double total = std::accumulate(min_dist.begin(), min_dist.end(), 0.0);
    std::size_t pick = 0;
    if (k == 0 || !(total > 0.0) || std::isinf(total)) {
      pick = uniform_row(rng);
    } else {
      const double target = unit(rng) * total;
      double acc = 0.0;
      pick = points.rows - 1;
      for (std::size_t t = 0; t < points.rows; ++t) {
        acc += min_dist[t];
        if (acc > target) {
          pick = t;
          break;
        }
      }
    }
    auto src = points.row(pick);
    for (std::size_t j = 0; j < cb.dim; ++j) cb.vectors[k * cb.dim + j] = static_cast<float>(src[j]);
    refresh(k);
  }
  return cb;
}

TrainStats TrainCodebooks(QuantizerStack& stack, const std::vector<RealMatrix>& data,
                          const TrainConfig& cfg) {
  cfg.Validate();
  stack.Validate();
  const RealMatrix pooled = Pool(data, stack.dim);
  TrainStats stats;
  for (std::size_t b = 0; b < stack.branches.size(); ++b) {
    RealMatrix residual = Columns(pooled, stack.BranchOffset(b), stack.BranchWidth(b));
    for (std::size_t i = 0; i < stack.branches[b].size(); ++i) {
      Stage& stage = stack.branches[b][i];
      if (auto* vq = std::get_if<VqStage>(&stage)) {
        TrainVqStage(vq->codebook, residual, cfg, b, i, stats);
      }
      RealMatrix q = QuantizeStage(stage, residual);
      for (std::size_t k = 0; k < q.data.size(); ++k) residual.data[k] -= q.data[k];
      if (!std::holds_alternative<VqStage>(stage)) {
        stats.epochs.push_back({b, i, 0, MeanSquare(residual), 0});
      }
    }
  }
  stats.final_mse = MeanSquaredError(Quantize(stack, pooled).quantized, pooled);
  return stats;
}

}  // namespace progse
