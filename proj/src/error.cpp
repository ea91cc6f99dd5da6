// Copyright 2026 The Endovo Authors
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

#include "endovo/error.hpp"

namespace endovo {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kInvalidDepth: return "invalid depth";
    case ErrorCode::kDegenerateFrame: return "degenerate frame";
    case ErrorCode::kDegenerateGeometry: return "degenerate geometry";
    case ErrorCode::kInitialization: return "initialization error";
    case ErrorCode::kConfig: return "config error";
    case ErrorCode::kIo: return "io error";
    case ErrorCode::kMemoryCap: return "memory cap exceeded";
  }
  return "unknown error";
}

}  // namespace endovo
