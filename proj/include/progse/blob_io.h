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


#ifndef PROGSE_BLOB_IO_H_
#define PROGSE_BLOB_IO_H_

#include <cstdint>
#include <string>
#include <vector>

#include "progse/mask.h"
#include "progse/quantize.h"
#include "progse/stft.h"
#include "progse/waveform.h"

namespace progse {

// Intermediate pipeline artifacts. Layout mirrors the codebook file:
//
//   "RSEB"  u16 version (=1)  u8 kind  payload  u32 CRC-32 of preceding bytes
//
// Payloads (little-endian, reals as binary64 so values survive exactly):
//   kind 1 waveform     u32 sample_rate  u64 n  n * f64
//   kind 2 mask         u64 frames  u64 bins  u8 has_bound  f64 bound
//                       frames*bins * (f64 re, f64 im)
//   kind 3 matrix       u64 rows  u64 cols  rows*cols * f64
//   kind 4 codes        u64 frames  u32 branches
//                       per branch: u32 stages, per stage: u64 n  n * i32
//   kind 5 spectrogram  u32 fft_size  u32 hop  u8 window  u8 center
//                       u64 frames  u64 bins  u64 signal_length
//                       u32 sample_rate  frames*bins * (f64 re, f64 im)
enum class BlobKind : std::uint8_t {
  kWaveform = 1,
  kMask = 2,
  kMatrix = 3,
  kCodes = 4,
  kSpectrogram = 5,
};

inline constexpr char kBlobMagic[4] = {'R', 'S', 'E', 'B'};
inline constexpr std::uint16_t kBlobVersion = 1;

void SaveWaveformBlob(const std::string& path, const Waveform& wave);
Waveform LoadWaveformBlob(const std::string& path);

void SaveMaskBlob(const std::string& path, const ComplexMask& mask);
ComplexMask LoadMaskBlob(const std::string& path);

void SaveMatrixBlob(const std::string& path, const RealMatrix& matrix);
RealMatrix LoadMatrixBlob(const std::string& path);

void SaveCodesBlob(const std::string& path, const Codes& codes);
Codes LoadCodesBlob(const std::string& path);

void SaveSpectrogramBlob(const std::string& path, const ComplexSpectrogram& spec);
ComplexSpectrogram LoadSpectrogramBlob(const std::string& path);

// In-memory forms used by the file functions above.
std::vector<std::uint8_t> EncodeCodesBlob(const Codes& codes);
Codes DecodeCodesBlob(const std::vector<std::uint8_t>& bytes, const std::string& name);

}  // namespace progse

#endif  // PROGSE_BLOB_IO_H_
