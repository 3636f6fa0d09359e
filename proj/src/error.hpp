// Copyright 2026 The ghzqss Authors
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

namespace ghzqss {

/// Error categories surfaced by the core. The C API maps these one-to-one
/// onto its status codes.
enum class ErrorCode {
    InvalidArgument,
    ImpossibleOutcome,
    Config,
    Transport,
    Timeout,
    ProtocolViolation,
    KeyExhausted,
    Io,
    Internal,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string &what) {
    throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string &what) {
    if (!cond) {
        fail(code, what);
    }
}

} // namespace ghzqss
