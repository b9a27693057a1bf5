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


#ifndef PROGSE_WAVEFORM_H_
#define PROGSE_WAVEFORM_H_

#include <string>
#include <vector>

namespace progse {

// Mono signal with its sample rate. Samples are nominally in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;

  std::size_t size() const { return samples.size(); }

  // Throws kInvalidArgument unless sample_rate > 0, the signal is non-empty
  // and every sample is finite.
  void Validate() const;
};

double Power(const Waveform& w);
double Energy(const Waveform& w);

void RequireSameRate(const Waveform& a, const Waveform& b, const char* what);
void RequireSameLength(const Waveform& a, const Waveform& b, const char* what);

}  // namespace progse

#endif  // PROGSE_WAVEFORM_H_
