// Copyright 2026 The nlpc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nlpc {

enum class ErrorKind {
  kIo,
  kFormat,
  kEmptyInput,
  kSize,
  kDegenerateFrame,
  kNumericalSingularity,
  kTrainingFailed,
  kConversionSingular,
  kArgument,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo: return "io";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kEmptyInput: return "empty_input";
    case ErrorKind::kSize: return "size";
    case ErrorKind::kDegenerateFrame: return "degenerate_frame";
    case ErrorKind::kNumericalSingularity: return "numerical_singularity";
    case ErrorKind::kTrainingFailed: return "training_failed";
    case ErrorKind::kConversionSingular: return "conversion_singular";
    case ErrorKind::kArgument: return "argument";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-readable category.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nlpc
