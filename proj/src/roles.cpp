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

#include "roles.hpp"

#include "error.hpp"

namespace ghzqss {

std::string_view role_name(Role r) {
    switch (r) {
    case Role::Alice:
        return "alice";
    case Role::Bob:
        return "bob";
    case Role::Charlie:
        return "charlie";
    }
    return "?";
}

Role parse_role(std::string_view text) {
    for (const auto r : kAllRoles) {
        if (role_name(r) == text) {
            return r;
        }
    }
    fail(ErrorCode::Config, "unknown role '" + std::string(text) + "'");
}

std::string_view mode_name(SessionMode m) {
    switch (m) {
    case SessionMode::Qss:
        return "qss";
    case SessionMode::TqcAllow:
        return "tqc-allow";
    case SessionMode::TqcDeny:
        return "tqc-deny";
    case SessionMode::DistrustHv:
        return "distrust-hv";
    }
    return "?";
}

SessionMode parse_mode(std::string_view text) {
    for (const auto m : {SessionMode::Qss, SessionMode::TqcAllow, SessionMode::TqcDeny,
                         SessionMode::DistrustHv}) {
        if (mode_name(m) == text) {
            return m;
        }
    }
    fail(ErrorCode::Config, "unknown mode '" + std::string(text) +
                                "' (expected qss, tqc-allow, tqc-deny or distrust-hv)");
}

} // namespace ghzqss
