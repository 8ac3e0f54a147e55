/* Copyright 2026 The fhop Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "fhop/error.hpp"

namespace fhop {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kValidation: return "validation error";
    case ErrorCode::kIo: return "I/O error";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kGap: return "gap error";
    case ErrorCode::kDuplicate: return "duplication error";
    case ErrorCode::kDecode: return "decode error";
    case ErrorCode::kRange: return "range error";
    case ErrorCode::kDimension: return "dimension mismatch";
    case ErrorCode::kUnsupportedVersion: return "unsupported version";
    case ErrorCode::kCorrupt: return "corrupt artifact";
    case ErrorCode::kEmpty: return "empty input";
    case ErrorCode::kUnderflow: return "underflow";
  }
  return "unknown error";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo:
    case ErrorCode::kDecode:
    case ErrorCode::kCorrupt:
      return 2;
    default:
      return 1;
  }
}

}  // namespace fhop
