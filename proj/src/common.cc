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


#include "progse/common.h"

namespace progse {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kShapeMismatch: return "shape-mismatch";
    case ErrorCode::kSampleRateMismatch: return "sample-rate-mismatch";
    case ErrorCode::kInvalidGeometry: return "invalid-geometry";
    case ErrorCode::kInfeasibleRoom: return "infeasible-room";
    case ErrorCode::kInsufficientDecay: return "insufficient-decay";
    case ErrorCode::kZeroPower: return "zero-power";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kUnsupportedVersion: return "unsupported-version";
    case ErrorCode::kTruncated: return "truncated";
    case ErrorCode::kChecksumMismatch: return "checksum-mismatch";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kMissingReference: return "missing-reference";
    case ErrorCode::kOutOfRange: return "out-of-range";
  }
  return "unknown";
}

}  // namespace progse
