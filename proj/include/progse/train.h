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


#ifndef PROGSE_TRAIN_H_
#define PROGSE_TRAIN_H_

#include <cstdint>
#include <string>
#include <vector>

#include "progse/quantize.h"

namespace progse {

struct TrainConfig {
  std::size_t epochs = 10;
  double ema_decay = 0.99;  // gamma; 0 turns each epoch into a batch k-means step
  std::size_t kmeans_iters = 10;
  std::uint64_t seed = 0;
  // Codes whose EMA count falls below this fraction of the mean count are
  // reseeded from random training residuals after each epoch.
  double dead_code_fraction = 1e-3;
  std::size_t max_codebook_size = 4096;
  bool keep_initial_codebooks = false;

  void Validate() const;
};

// One row per trained stage and epoch. `mse` is the mean squared error of the
// chain truncated after `stage`, over the branch's columns. Non-trainable
// stages report a single row with epoch 0.
struct EpochStat {
  std::size_t branch = 0;
  std::size_t stage = 0;
  std::size_t epoch = 0;
  double mse = 0.0;
  std::size_t reseeded = 0;
};

struct TrainStats {
  std::vector<EpochStat> epochs;
  std::vector<std::string> warnings;
  // Codebooks right after k-means initialisation, in (branch, stage) order;
  // filled only when keep_initial_codebooks is set.
  std::vector<Codebook> initial_codebooks;
  double final_mse = 0.0;  // MSE of Quantize() over all training data
};

// Greedy stage-wise training: each VQ stage is initialised by k-means++ plus
// `kmeans_iters` Lloyd steps on the residuals left by the (already trained)
// stages before it, then refined for `epochs` full-batch EMA updates:
//   counts <- gamma counts + (1 - gamma) assigned_counts
//   sums   <- gamma sums   + (1 - gamma) assigned_sums
//   code   <- sums / counts
TrainStats TrainCodebooks(QuantizerStack& stack, const std::vector<RealMatrix>& data,
                          const TrainConfig& cfg);

// k-means++ seeding over the rows of `points`. A reserved-zero codebook keeps
// code 0 at the origin and seeds the remaining N - 1 codes.
Codebook KMeansPlusPlus(const RealMatrix& points, std::size_t size, bool reserved_zero,
                        std::uint64_t seed);

// Seed used for the stage at (branch, stage) of a stack trained with `seed`.
std::uint64_t StageSeed(std::uint64_t seed, std::size_t branch, std::size_t stage);

}  // namespace progse

#endif  // PROGSE_TRAIN_H_
