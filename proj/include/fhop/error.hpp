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
#ifndef FHOP_ERROR_HPP_
#define FHOP_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace fhop {

// Numeric values are shared with the C API status codes in fhop.h.
enum class ErrorCode : int {
  kValidation = 1,
  kIo = 2,
  kParse = 3,
  kGap = 4,
  kDuplicate = 5,
  kDecode = 6,
  kRange = 7,
  kDimension = 8,
  kUnsupportedVersion = 9,
  kCorrupt = 10,
  kEmpty = 11,
  kUnderflow = 12,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Process exit status for an error: 2 for I/O-class failures, 1 otherwise.
int exit_code_for(ErrorCode code);

}  // namespace fhop

#endif  // FHOP_ERROR_HPP_
