// Copyright 2026 The evorepair Authors
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

namespace evorepair {

enum class ErrorKind {
  contract,    // caller broke a documented precondition
  domain,      // argument outside the function's domain
  config,      // bad subject or run configuration
  io,          // filesystem or process failure
  parse,       // malformed input file or record
  protocol,    // malformed test-report stream
  provider,    // candidate provider failure (HTTP, fixtures)
  evaluation,  // fitness evaluation could not be carried out
  budget,      // prompt token budget too small
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorKind::contract, message);
}

}  // namespace evorepair
