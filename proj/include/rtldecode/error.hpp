// Copyright 2026 The rtldecode Authors.
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rtldecode {

enum class Errc {
  UnknownTokenId,
  BackendUnavailable,
  ParseError,
  ValidationError,
  InvalidTemperature,
  InvalidDistribution,
  InvalidK,
  InvalidP,
  InvalidConfig,
  EmptyInput,
  InsufficientSamples,
  CheckerTimeout,
  CheckerSpawnError,
  IoError,
};

inline std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::UnknownTokenId: return "UnknownTokenId";
    case Errc::BackendUnavailable: return "BackendUnavailable";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::InvalidTemperature: return "InvalidTemperature";
    case Errc::InvalidDistribution: return "InvalidDistribution";
    case Errc::InvalidK: return "InvalidK";
    case Errc::InvalidP: return "InvalidP";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::InsufficientSamples: return "InsufficientSamples";
    case Errc::CheckerTimeout: return "CheckerTimeout";
    case Errc::CheckerSpawnError: return "CheckerSpawnError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

// All library failures are reported as Error; code() distinguishes them.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace rtldecode
