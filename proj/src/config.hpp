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

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "protocol.hpp"

namespace ghzqss {

struct TransportChoice {
    bool tcp = false;
    Role role = Role::Charlie;
    TcpAddress address{"127.0.0.1", 0};
};

/// File form of a session: the SessionConfig fields plus transport
/// selection and output paths.
///
/// {
///   "mode": "qss" | "tqc-allow" | "tqc-deny" | "distrust-hv",
///   "rounds": 800000,
///   "noise": "ideal" | "werner:<v>" | "flip:<p>",
///   "seed": 7,
///   "sample_fraction": 0.1,          optional
///   "block_lengths": [2, 8],         optional
///   "qber_threshold": 0.15,          optional
///   "eavesdropper": false,           optional
///   "session_id": "<32 hex>",        optional
///   "timeout_ms": 30000,             optional
///   "transport": "inproc" | {"tcp": {"role": "alice", "address": "host:port"}},
///   "output": {"report": "report.json", "keys_dir": "keys"}   optional
/// }
///
/// Unknown keys anywhere are rejected.
struct RunConfig {
    SessionConfig session;
    TransportChoice transport;
    std::string report_path;
    std::string keys_dir;
};

/// Throws Config with the offending key in the message.
RunConfig parse_run_config(const nlohmann::json &doc);
RunConfig parse_run_config(std::string_view json_text);

nlohmann::json report_to_json(const SessionReport &report);

} // namespace ghzqss
