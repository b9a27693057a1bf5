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


#include "progse/codebook_io.h"

#include <algorithm>
#include <cstring>
#include <zlib.h>

#include "progse/bytes.h"
#include "progse/wav.h"

namespace progse {

std::uint32_t Crc32(const std::uint8_t* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  return static_cast<std::uint32_t>(crc32_z(crc, data, n));
}

void ByteWriter::Crc32() { U32(progse::Crc32(buf_.data(), buf_.size())); }

void ByteReader::Need(std::size_t n) const {
  if (n > remaining()) {
    throw Error(ErrorCode::kTruncated, what_ + ": truncated at byte " + std::to_string(pos_));
  }
}

std::uint64_t ByteReader::Le(int n) {
  Need(static_cast<std::size_t>(n));
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
  pos_ += static_cast<std::size_t>(n);
  return v;
}

void ByteReader::Expect(const char* magic, std::size_t n) {
  const std::size_t have = std::min(remaining(), n);
  if (std::memcmp(bytes_.data() + pos_, magic, have) != 0) {
    throw Error(ErrorCode::kFormat, what_ + ": bad magic bytes");
  }
  Need(n);
  pos_ += n;
}

void ByteReader::CheckCrc32() {
  if (remaining() < 4) {
    throw Error(ErrorCode::kTruncated, what_ + ": truncated before checksum");
  }
  if (remaining() > 4) throw Error(ErrorCode::kFormat, what_ + ": trailing bytes after payload");
  const std::uint32_t expected = progse::Crc32(bytes_.data(), pos_);
  if (U32() != expected) throw Error(ErrorCode::kChecksumMismatch, what_ + ": checksum mismatch");
}

namespace {

enum StageKind : std::uint8_t { kScalarKind = 0, kVqKind = 1, kFsqKind = 2, kLfqKind = 3 };

void WriteStage(ByteWriter& w, const Stage& stage) {
  if (const auto* s = std::get_if<ScalarStage>(&stage)) {
    w.U8(kScalarKind);
    w.U32(static_cast<std::uint32_t>(s->k));
  } else if (const auto* v = std::get_if<VqStage>(&stage)) {
    const Codebook& cb = v->codebook;
    w.U8(kVqKind);
    w.U32(static_cast<std::uint32_t>(cb.size));
    w.U32(static_cast<std::uint32_t>(cb.dim));
    w.U8(cb.reserved_zero ? 1 : 0);
    for (float x : cb.vectors) w.F32(x);
  } else if (const auto* f = std::get_if<FsqStage>(&stage)) {
    w.U8(kFsqKind);
    w.U32(static_cast<std::uint32_t>(f->levels.size()));
    for (int l : f->levels) w.U32(static_cast<std::uint32_t>(l));
  } else {
    const auto& l = std::get<LfqStage>(stage);
    w.U8(kLfqKind);
    w.U32(static_cast<std::uint32_t>(l.dim));
    w.F64(l.scale);
    w.U8(l.reserved_zero ? 1 : 0);
  }
}

Stage ReadStage(ByteReader& r, const std::string& name) {
  const std::uint8_t kind = r.U8();
  switch (kind) {
    case kScalarKind:
      return ScalarStage{static_cast<int>(r.U32())};
    case kVqKind: {
      const std::uint32_t n = r.U32();
      const std::uint32_t d = r.U32();
      const bool reserved = r.U8() != 0;
      r.NeedItems(static_cast<std::uint64_t>(n) * d, 4);
      Codebook cb(n, d, reserved);
      for (float& x : cb.vectors) x = r.F32();
      return VqStage{std::move(cb)};
    }
    case kFsqKind: {
      const std::uint32_t d = r.U32();
      r.NeedItems(d, 4);
      FsqStage f;
      f.levels.resize(d);
      for (int& l : f.levels) l = static_cast<int>(r.U32());
      return f;
    }
    case kLfqKind: {
      LfqStage l;
      l.dim = r.U32();
      l.scale = r.F64();
      l.reserved_zero = r.U8() != 0;
      return l;
    }
    default:
      throw Error(ErrorCode::kFormat, name + ": unknown stage kind " + std::to_string(kind));
  }
}

std::size_t StagesInBranch(Scheme scheme, std::size_t branch, std::size_t n_q) {
  if (scheme == Scheme::kSq) return 1;
  if (scheme == Scheme::kSqParRvq && branch == 0) return 1;
  return n_q;
}

}  // namespace

std::vector<std::uint8_t> SerializeStack(const QuantizerStack& stack) {
  stack.Validate();
  if (stack.n_q > 255 || stack.group_count > 255 || stack.branches.size() > 255) {
    throw Error(ErrorCode::kInvalidArgument, "codebook file: n_q, groups and branches must fit in u8");
  }
  ByteWriter w;
  w.Raw(kCodebookMagic, 4);
  w.U16(kCodebookVersion);
  w.U8(static_cast<std::uint8_t>(stack.scheme));
  w.U8(static_cast<std::uint8_t>(stack.n_q));
  w.U32(static_cast<std::uint32_t>(stack.dim));
  w.U8(static_cast<std::uint8_t>(stack.group_count));
  w.F64(stack.parallel_weight);
  w.U8(static_cast<std::uint8_t>(stack.branches.size()));
  for (const Chain& chain : stack.branches) {
    for (const Stage& stage : chain) WriteStage(w, stage);
  }
  w.Crc32();
  return w.Take();
}

QuantizerStack DeserializeStack(const std::vector<std::uint8_t>& bytes, const std::string& name) {
  ByteReader r(bytes, name);
  r.Expect(kCodebookMagic, 4);
  const std::uint16_t version = r.U16();
  if (version != kCodebookVersion) {
    throw Error(ErrorCode::kUnsupportedVersion,
                name + ": unsupported codebook file version " + std::to_string(version));
  }
  const std::uint8_t scheme_tag = r.U8();
  if (scheme_tag > static_cast<std::uint8_t>(Scheme::kRlfq)) {
    throw Error(ErrorCode::kFormat, name + ": unknown scheme tag " + std::to_string(scheme_tag));
  }
  QuantizerStack stack;
  stack.scheme = static_cast<Scheme>(scheme_tag);
  stack.n_q = r.U8();
  stack.dim = r.U32();
  stack.group_count = r.U8();
  stack.parallel_weight = r.F64();
  const std::size_t branch_count = r.U8();
  for (std::size_t b = 0; b < branch_count; ++b) {
    Chain chain;
    const std::size_t stages = StagesInBranch(stack.scheme, b, stack.n_q);
    for (std::size_t i = 0; i < stages; ++i) chain.push_back(ReadStage(r, name));
    stack.branches.push_back(std::move(chain));
  }
  r.CheckCrc32();
  try {
    stack.Validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kFormat, name + ": inconsistent stack: " + e.what());
  }
  return stack;
}

void SaveCodebooks(const QuantizerStack& stack, const std::string& path) {
  WriteFileAtomically(path, SerializeStack(stack));
}

QuantizerStack LoadCodebooks(const std::string& path) {
  return DeserializeStack(ReadFileBytes(path), path);
}

}  // namespace progse
