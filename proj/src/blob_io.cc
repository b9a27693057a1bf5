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


#include "progse/blob_io.h"

#include "progse/bytes.h"
#include "progse/wav.h"

namespace progse {
namespace {

ByteWriter StartBlob(BlobKind kind) {
  ByteWriter w;
  w.Raw(kBlobMagic, 4);
  w.U16(kBlobVersion);
  w.U8(static_cast<std::uint8_t>(kind));
  return w;
}

void StartRead(ByteReader& r, BlobKind kind, const std::string& name) {
  r.Expect(kBlobMagic, 4);
  const std::uint16_t version = r.U16();
  if (version != kBlobVersion) {
    throw Error(ErrorCode::kUnsupportedVersion,
                name + ": unsupported blob version " + std::to_string(version));
  }
  const std::uint8_t got = r.U8();
  if (got != static_cast<std::uint8_t>(kind)) {
    throw Error(ErrorCode::kFormat, name + ": blob kind " + std::to_string(got) + ", expected " +
                                        std::to_string(static_cast<int>(kind)));
  }
}

void Finish(ByteWriter& w, const std::string& path) {
  w.Crc32();
  WriteFileAtomically(path, w.bytes());
}

void WriteComplex(ByteWriter& w, const std::vector<std::complex<double>>& data) {
  for (const auto& c : data) {
    w.F64(c.real());
    w.F64(c.imag());
  }
}

std::vector<std::complex<double>> ReadComplex(ByteReader& r, std::uint64_t count) {
  r.NeedItems(count, 16);
  std::vector<std::complex<double>> data(count);
  for (auto& c : data) {
    const double re = r.F64();
    c = {re, r.F64()};
  }
  return data;
}

}  // namespace

void SaveWaveformBlob(const std::string& path, const Waveform& wave) {
  ByteWriter w = StartBlob(BlobKind::kWaveform);
  w.U32(static_cast<std::uint32_t>(wave.sample_rate));
  w.U64(wave.size());
  for (double s : wave.samples) w.F64(s);
  Finish(w, path);
}

Waveform LoadWaveformBlob(const std::string& path) {
  const auto bytes = ReadFileBytes(path);
  ByteReader r(bytes, path);
  StartRead(r, BlobKind::kWaveform, path);
  Waveform wave;
  wave.sample_rate = static_cast<int>(r.U32());
  const std::uint64_t n = r.U64();
  r.NeedItems(n, 8);
  wave.samples.resize(n);
  for (double& s : wave.samples) s = r.F64();
  r.CheckCrc32();
  return wave;
}

void SaveMaskBlob(const std::string& path, const ComplexMask& mask) {
  ByteWriter w = StartBlob(BlobKind::kMask);
  w.U64(mask.frames);
  w.U64(mask.bins);
  w.U8(mask.bound ? 1 : 0);
  w.F64(mask.bound.value_or(0.0));
  WriteComplex(w, mask.data);
  Finish(w, path);
}

ComplexMask LoadMaskBlob(const std::string& path) {
  const auto bytes = ReadFileBytes(path);
  ByteReader r(bytes, path);
  StartRead(r, BlobKind::kMask, path);
  ComplexMask mask;
  mask.frames = r.U64();
  mask.bins = r.U64();
  const bool has_bound = r.U8() != 0;
  const double bound = r.F64();
  if (has_bound) mask.bound = bound;
  mask.data = ReadComplex(r, static_cast<std::uint64_t>(mask.frames) * mask.bins);
  r.CheckCrc32();
  return mask;
}

void SaveMatrixBlob(const std::string& path, const RealMatrix& matrix) {
  ByteWriter w = StartBlob(BlobKind::kMatrix);
  w.U64(matrix.rows);
  w.U64(matrix.cols);
  for (double v : matrix.data) w.F64(v);
  Finish(w, path);
}

RealMatrix LoadMatrixBlob(const std::string& path) {
  const auto bytes = ReadFileBytes(path);
  ByteReader r(bytes, path);
  StartRead(r, BlobKind::kMatrix, path);
  const std::uint64_t rows = r.U64();
  const std::uint64_t cols = r.U64();
  if (cols != 0 && rows > r.remaining() / cols) r.NeedItems(rows, cols);
  r.NeedItems(rows * cols, 8);
  RealMatrix m(rows, cols);
  for (double& v : m.data) v = r.F64();
  r.CheckCrc32();
  return m;
}

std::vector<std::uint8_t> EncodeCodesBlob(const Codes& codes) {
  ByteWriter w = StartBlob(BlobKind::kCodes);
  w.U64(codes.frames);
  w.U32(static_cast<std::uint32_t>(codes.branches.size()));
  for (const auto& branch : codes.branches) {
    w.U32(static_cast<std::uint32_t>(branch.size()));
    for (const StageCodes& stage : branch) {
      w.U64(stage.size());
      for (std::int32_t c : stage) w.I32(c);
    }
  }
  w.Crc32();
  return w.Take();
}

Codes DecodeCodesBlob(const std::vector<std::uint8_t>& bytes, const std::string& name) {
  ByteReader r(bytes, name);
  StartRead(r, BlobKind::kCodes, name);
  Codes codes;
  codes.frames = r.U64();
  const std::uint32_t branches = r.U32();
  for (std::uint32_t b = 0; b < branches; ++b) {
    const std::uint32_t stages = r.U32();
    std::vector<StageCodes> branch;
    for (std::uint32_t i = 0; i < stages; ++i) {
      const std::uint64_t n = r.U64();
      r.NeedItems(n, 4);
      StageCodes stage(n);
      for (auto& c : stage) c = r.I32();
      branch.push_back(std::move(stage));
    }
    codes.branches.push_back(std::move(branch));
  }
  r.CheckCrc32();
  return codes;
}

void SaveCodesBlob(const std::string& path, const Codes& codes) {
  WriteFileAtomically(path, EncodeCodesBlob(codes));
}

Codes LoadCodesBlob(const std::string& path) { return DecodeCodesBlob(ReadFileBytes(path), path); }

void SaveSpectrogramBlob(const std::string& path, const ComplexSpectrogram& spec) {
  ByteWriter w = StartBlob(BlobKind::kSpectrogram);
  w.U32(static_cast<std::uint32_t>(spec.config.fft_size));
  w.U32(static_cast<std::uint32_t>(spec.config.hop));
  w.U8(spec.config.window == WindowType::kHann ? 0 : 1);
  w.U8(spec.config.center ? 1 : 0);
  w.U64(spec.frames);
  w.U64(spec.bins);
  w.U64(spec.signal_length);
  w.U32(static_cast<std::uint32_t>(spec.sample_rate));
  WriteComplex(w, spec.data);
  Finish(w, path);
}

ComplexSpectrogram LoadSpectrogramBlob(const std::string& path) {
  const auto bytes = ReadFileBytes(path);
  ByteReader r(bytes, path);
  StartRead(r, BlobKind::kSpectrogram, path);
  ComplexSpectrogram spec;
  spec.config.fft_size = r.U32();
  spec.config.hop = r.U32();
  spec.config.window = r.U8() == 0 ? WindowType::kHann : WindowType::kSqrtHann;
  spec.config.center = r.U8() != 0;
  spec.frames = r.U64();
  spec.bins = r.U64();
  spec.signal_length = r.U64();
  spec.sample_rate = static_cast<int>(r.U32());
  spec.data = ReadComplex(r, static_cast<std::uint64_t>(spec.frames) * spec.bins);
  r.CheckCrc32();
  return spec;
}

}  // namespace progse
