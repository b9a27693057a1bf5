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


#ifndef PROGSE_WAV_H_
#define PROGSE_WAV_H_

#include <cstdint>
#include <string>
#include <vector>

#include "progse/waveform.h"

namespace progse {

enum class WavFormat { kPcm16, kFloat32 };

// Reads a mono RIFF/WAVE file holding 16-bit PCM or IEEE binary32 samples.
// Multichannel files and other encodings are rejected with kFormat.
Waveform ReadWav(const std::string& path);

// Writes atomically (temporary file plus rename). PCM16 output is clipped
// to [-1, 1).
void WriteWav(const std::string& path, const Waveform& wave,
              WavFormat format = WavFormat::kFloat32);

std::vector<std::uint8_t> EncodeWav(const Waveform& wave, WavFormat format);
Waveform DecodeWav(const std::vector<std::uint8_t>& bytes,
                   const std::string& name = "<memory>");

// Writes bytes to `path` through a temporary sibling and rename.
void WriteFileAtomically(const std::string& path,
                         const std::vector<std::uint8_t>& bytes);
void WriteFileAtomically(const std::string& path, const std::string& text);
std::vector<std::uint8_t> ReadFileBytes(const std::string& path);

}  // namespace progse

#endif  // PROGSE_WAV_H_
