// Copyright 2026 The Authors.
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

namespace sensel {

enum class ErrorCode {
  kInvalidMatrix,
  kSingularBlock,
  kNotPositiveDefinite,
  kNotPSD,
  kParseError,
  kInvalidScenario,
  kPerStepCountOutOfRange,
  kInfeasibleConstraints,
  kNotSeparableNoise,
  kSingularNoise,
  kTooLarge,
  kInfeasible,
  kRoundingInfeasible,
  kNotConverged,
  kInternal,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidMatrix: return "InvalidMatrix";
    case ErrorCode::kSingularBlock: return "SingularBlock";
    case ErrorCode::kNotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::kNotPSD: return "NotPSD";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kInvalidScenario: return "InvalidScenario";
    case ErrorCode::kPerStepCountOutOfRange: return "PerStepCountOutOfRange";
    case ErrorCode::kInfeasibleConstraints: return "InfeasibleConstraints";
    case ErrorCode::kNotSeparableNoise: return "NotSeparableNoise";
    case ErrorCode::kSingularNoise: return "SingularNoise";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kRoundingInfeasible: return "RoundingInfeasible";
    case ErrorCode::kNotConverged: return "NotConverged";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Unknown";
}

// Every failure in the library is reported as an Error carrying a code that
// callers (notably the CLI exit-code mapping) can switch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sensel
