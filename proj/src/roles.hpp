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

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace ghzqss {

/// Qubit index of each party equals its enum value.
enum class Role : std::uint8_t { Alice = 0, Bob = 1, Charlie = 2 };

inline constexpr std::array<Role, 3> kAllRoles{Role::Alice, Role::Bob, Role::Charlie};

constexpr std::size_t index_of(Role r) { return static_cast<std::size_t>(r); }

std::string_view role_name(Role r);
Role parse_role(std::string_view text); // throws Config

enum class SessionMode : std::uint8_t { Qss, TqcAllow, TqcDeny, DistrustHv };

std::string_view mode_name(SessionMode m);
SessionMode parse_mode(std::string_view text); // throws Config

/// QSS: all three parties hold key material. Every other mode builds an
/// Alice-Bob key only.
constexpr bool three_party_key(SessionMode m) { return m == SessionMode::Qss; }

constexpr bool holds_key(SessionMode m, Role r) {
    return r != Role::Charlie || three_party_key(m);
}

} // namespace ghzqss
