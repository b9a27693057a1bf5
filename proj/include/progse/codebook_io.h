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


#ifndef PROGSE_CODEBOOK_IO_H_
#define PROGSE_CODEBOOK_IO_H_

#include <cstdint>
#include <string>
#include <vector>

#include "progse/quantize.h"

namespace progse {

inline constexpr char kCodebookMagic[4] = {'R', 'S', 'E', 'Q'};
inline constexpr std::uint16_t kCodebookVersion = 1;

// Codebook file, all fields little-endian:
//
//   "RSEQ"  u16 version (=1)  u8 scheme  u8 n_q
//   u32 dim  u8 group_count  f64 parallel_weight  u8 branch_count
//   stages, branch-major; stage counts follow from scheme and n_q:
//     u8 kind 0 (scalar)  u32 K
//     u8 kind 1 (vq)      u32 N  u32 D  u8 reserved_zero  N*D binary32
//     u8 kind 2 (fsq)     u32 D  D * u32 level count
//     u8 kind 3 (lfq)     u32 D  f64 scale  u8 reserved_zero
//   u32 CRC-32 (zlib polynomial) of every preceding byte
//
// EMA statistics are not stored.
std::vector<std::uint8_t> SerializeStack(const QuantizerStack& stack);
QuantizerStack DeserializeStack(const std::vector<std::uint8_t>& bytes,
                                const std::string& name = "<memory>");

void SaveCodebooks(const QuantizerStack& stack, const std::string& path);
QuantizerStack LoadCodebooks(const std::string& path);

}  // namespace progse

#endif  // PROGSE_CODEBOOK_IO_H_
