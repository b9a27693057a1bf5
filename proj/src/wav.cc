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


#include "progse/wav.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "progse/common.h"

namespace progse {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

static_assert(std::endian::native == std::endian::little,
              "byte order helpers assume a little-endian host");

void PutU16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void PutTag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

std::uint16_t GetU16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t GetU32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void Waveform::Validate() const {
  if (sample_rate <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "waveform: sample rate must be positive");
  }
  if (samples.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "waveform: empty signal");
  }
  for (double s : samples) {
    if (!std::isfinite(s)) {
      throw Error(ErrorCode::kInvalidArgument, "waveform: non-finite sample");
    }
  }
}

double Energy(const Waveform& w) {
  double e = 0.0;
  for (double s : w.samples) e += s * s;
  return e;
}

double Power(const Waveform& w) {
  return w.samples.empty() ? 0.0 : Energy(w) / static_cast<double>(w.size());
}

void RequireSameRate(const Waveform& a, const Waveform& b, const char* what) {
  if (a.sample_rate != b.sample_rate) {
    throw Error(ErrorCode::kSampleRateMismatch,
                std::string(what) + ": sample rates differ (" +
                    std::to_string(a.sample_rate) + " vs " +
                    std::to_string(b.sample_rate) + ")");
  }
}

void RequireSameLength(const Waveform& a, const Waveform& b, const char* what) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                std::string(what) + ": lengths differ (" + std::to_string(a.size()) +
                    " vs " + std::to_string(b.size()) + ")");
  }
}

std::vector<std::uint8_t> EncodeWav(const Waveform& wave, WavFormat format) {
  if (wave.sample_rate <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "wav: sample rate must be positive");
  }
  const bool is_float = format == WavFormat::kFloat32;
  const std::uint16_t bytes_per_sample = is_float ? 4 : 2;
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(wave.size() * bytes_per_sample);
  const std::uint32_t rate = static_cast<std::uint32_t>(wave.sample_rate);

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  PutTag(out, "RIFF");
  PutU32(out, 36 + data_bytes);
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, 16);
  PutU16(out, is_float ? kFormatFloat : kFormatPcm);
  PutU16(out, 1);
  PutU32(out, rate);
  PutU32(out, rate * bytes_per_sample);
  PutU16(out, bytes_per_sample);
  PutU16(out, static_cast<std::uint16_t>(8 * bytes_per_sample));
  PutTag(out, "data");
  PutU32(out, data_bytes);
  for (double s : wave.samples) {
    if (is_float) {
      PutU32(out, std::bit_cast<std::uint32_t>(static_cast<float>(s)));
    } else {
      double clipped = std::clamp(s, -1.0, 32767.0 / 32768.0);
      auto v = static_cast<std::int16_t>(std::lround(clipped * 32768.0));
      PutU16(out, static_cast<std::uint16_t>(v));
    }
  }
  return out;
}

Waveform DecodeWav(const std::vector<std::uint8_t>& bytes, const std::string& name) {
  auto fail = [&](const std::string& why) {
    return Error(ErrorCode::kFormat, "wav " + name + ": " + why);
  };
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw fail("not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  const std::uint8_t* data = nullptr;
  std::uint32_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    std::uint32_t size = GetU32(chunk + 4);
    std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || body + size > bytes.size()) throw fail("truncated fmt chunk");
      format = GetU16(bytes.data() + body);
      channels = GetU16(bytes.data() + body + 2);
      rate = GetU32(bytes.data() + body + 4);
      bits = GetU16(bytes.data() + body + 14);
      if (format == kFormatExtensible && size >= 40) {
        // Sub-format GUID starts at offset 24; its first two bytes carry the tag.
        format = GetU16(bytes.data() + body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (body + size > bytes.size()) {
        // streaming writers leave 0 or 0xffffffff until the stream is closed
        if (size != 0 && size != 0xffffffffu) {
          throw Error(ErrorCode::kTruncated, "wav " + name + ": truncated data chunk");
        }
        size = static_cast<std::uint32_t>(bytes.size() - body);
      }
      data = bytes.data() + body;
      data_size = size;
      break;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) throw fail("missing fmt chunk");
  if (data == nullptr) throw fail("missing data chunk");
  if (channels != 1) {
    throw fail("expected mono audio, found " + std::to_string(channels) + " channels");
  }
  if (rate == 0) throw fail("zero sample rate");

  Waveform wave;
  wave.sample_rate = static_cast<int>(rate);
  if (format == kFormatPcm && bits == 16) {
    wave.samples.resize(data_size / 2);
    for (std::size_t i = 0; i < wave.samples.size(); ++i) {
      auto v = static_cast<std::int16_t>(GetU16(data + 2 * i));
      wave.samples[i] = v / 32768.0;
    }
  } else if (format == kFormatFloat && bits == 32) {
    wave.samples.resize(data_size / 4);
    for (std::size_t i = 0; i < wave.samples.size(); ++i) {
      wave.samples[i] = std::bit_cast<float>(GetU32(data + 4 * i));
    }
  } else {
    throw fail("unsupported encoding (format " + std::to_string(format) + ", " +
               std::to_string(bits) + " bits); expected 16-bit PCM or 32-bit float");
  }
  return wave;
}

std::vector<std::uint8_t> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteFileAtomically(const std::string& path,
                         const std::vector<std::uint8_t>& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot rename " + tmp + ": " + ec.message());
}

void WriteFileAtomically(const std::string& path, const std::string& text) {
  WriteFileAtomically(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

Waveform ReadWav(const std::string& path) { return DecodeWav(ReadFileBytes(path), path); }

void WriteWav(const std::string& path, const Waveform& wave, WavFormat format) {
  WriteFileAtomically(path, EncodeWav(wave, format));
}

}  // namespace progse
