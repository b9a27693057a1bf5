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


#include "progse/mask.h"

#include <cmath>
#include <sstream>

#include "progse/text.h"
#include "progse/wav.h"

namespace progse {

ComplexMask ComputeCrm(const ComplexSpectrogram& mixture, const ComplexSpectrogram& target,
                       std::optional<double> bound) {
  RequireSameShape(mixture.frames, mixture.bins, target.frames, target.bins, "compute_crm");
  if (bound && !(*bound > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "compute_crm: bound must be positive");
  }
  ComplexMask mask;
  mask.frames = mixture.frames;
  mask.bins = mixture.bins;
  mask.bound = bound;
  mask.data.resize(mixture.data.size());
  for (std::size_t i = 0; i < mask.data.size(); ++i) {
    const std::complex<double> y = mixture.data[i];
    const double power = std::norm(y);
    if (power <= kMaskEpsilon) {
      mask.data[i] = {0.0, 0.0};
      continue;
    }
    std::complex<double> m = target.data[i] * std::conj(y) / power;
    if (bound) {
      const double mag = std::abs(m);
      if (mag > *bound) m *= *bound / mag;
    }
    mask.data[i] = m;
  }
  return mask;
}

ComplexSpectrogram ApplyMask(const ComplexSpectrogram& mixture, const ComplexMask& mask) {
  RequireSameShape(mixture.frames, mixture.bins, mask.frames, mask.bins, "apply_mask");
  ComplexSpectrogram out = mixture;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = mask.data[i] * mixture.data[i];
  return out;
}

AffineFusion ParseAffineFusion(const std::string& text) {
  AffineFusion fusion;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = Trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::istringstream fields{std::string(body)};
    std::string a, b, c, extra;
    fields >> a >> b >> c;
    const std::string where = "fusion line " + std::to_string(line_no);
    if (c.empty() || (fields >> extra)) {
      throw Error(ErrorCode::kFormat, where + ": expected 'w_denoised w_mixture bias'");
    }
    fusion.w_denoised.push_back(ParseDouble(a, where));
    fusion.w_mixture.push_back(ParseDouble(b, where));
    fusion.bias.push_back(ParseDouble(c, where));
  }
  if (fusion.size() == 0) throw Error(ErrorCode::kFormat, "fusion: no entries");
  return fusion;
}

AffineFusion LoadAffineFusion(const std::string& path) {
  auto bytes = ReadFileBytes(path);
  return ParseAffineFusion(std::string(bytes.begin(), bytes.end()));
}

std::string FormatAffineFusion(const AffineFusion& fusion) {
  std::ostringstream out;
  out << "# w_denoised w_mixture bias (one line per frequency bin)\n";
  for (std::size_t i = 0; i < fusion.size(); ++i) {
    out << FormatDouble(fusion.w_denoised[i]) << ' ' << FormatDouble(fusion.w_mixture[i]) << ' '
        << FormatDouble(fusion.bias[i]) << '\n';
  }
  return out.str();
}

void FusionConfig::Validate() const {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "fusion: beta must lie in [0, 1]");
  }
  if (affine && (affine->w_denoised.size() != affine->size() ||
                 affine->w_mixture.size() != affine->size())) {
    throw Error(ErrorCode::kShapeMismatch, "fusion: ragged affine parameters");
  }
}

RealMatrix FuseFeatures(const RealMatrix& mag_denoised, const RealMatrix& mag_mixture,
                        const FusionConfig& cfg) {
  RequireSameShape(mag_denoised.rows, mag_denoised.cols, mag_mixture.rows, mag_mixture.cols,
                   "fuse_features");
  cfg.Validate();
  RealMatrix out(mag_denoised.rows, mag_denoised.cols);
  if (cfg.affine) {
    const AffineFusion& a = *cfg.affine;
    if (a.size() != out.cols) {
      throw Error(ErrorCode::kShapeMismatch,
                  "fuse_features: affine map has " + std::to_string(a.size()) +
                      " entries for " + std::to_string(out.cols) + " bins");
    }
    for (std::size_t t = 0; t < out.rows; ++t) {
      for (std::size_t f = 0; f < out.cols; ++f) {
        out(t, f) = a.w_denoised[f] * mag_denoised(t, f) + a.w_mixture[f] * mag_mixture(t, f) +
                    a.bias[f];
      }
    }
    return out;
  }
  const double beta = cfg.beta;
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    out.data[i] = beta * mag_denoised.data[i] + (1.0 - beta) * mag_mixture.data[i];
  }
  return out;
}

}  // namespace progse
