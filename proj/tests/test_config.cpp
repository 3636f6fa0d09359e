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

#include <catch_amalgamated.hpp>

#include "config.hpp"
#include "error.hpp"

using namespace ghzqss;

namespace {

ErrorCode code_of(const std::string &text) {
    try {
        parse_run_config(std::string_view(text));
    } catch (const Error &e) {
        return e.code();
    }
    return ErrorCode::Internal;
}

} // namespace

TEST_CASE("a full run config parses") {
    const auto rc = parse_run_config(std::string_view(R"({
        "mode": "tqc-allow", "rounds": 800000, "noise": "flip:0.129", "seed": 7,
        "sample_fraction": 0.2, "block_lengths": [2, 4, 8], "qber_threshold": 0.11,
        "eavesdropper": true, "session_id": "0123456789abcdef0123456789abcdef",
        "timeout_ms": 500,
        "transport": {"tcp": {"role": "bob", "address": "127.0.0.1:4000"}},
        "output": {"report": "r.json", "keys_dir": "k"}
    })"));
    CHECK(rc.session.mode == SessionMode::TqcAllow);
    CHECK(rc.session.num_rounds == 800000);
    CHECK(std::get<TripletFlip>(rc.session.noise).flip_probability == 0.129);
    CHECK(rc.session.seed == 7);
    CHECK(rc.session.sample_fraction == 0.2);
    CHECK(rc.session.block_lengths == std::vector<std::size_t>{2, 4, 8});
    CHECK(rc.session.qber_threshold == 0.11);
    CHECK(rc.session.eavesdropper);
    CHECK(rc.session.timeout == Millis(500));
    CHECK(rc.transport.tcp);
    CHECK(rc.transport.role == Role::Bob);
    CHECK(rc.transport.address.port == 4000);
    CHECK(rc.report_path == "r.json");
    CHECK(rc.keys_dir == "k");
}

TEST_CASE("defaults apply to optional keys") {
    const auto rc = parse_run_config(
        std::string_view(R"({"mode":"qss","rounds":1000,"noise":"ideal","seed":1})"));
    CHECK(rc.session.sample_fraction == 0.10);
    CHECK(rc.session.block_lengths == std::vector<std::size_t>{2, 8});
    CHECK(rc.session.qber_threshold == 0.15);
    CHECK_FALSE(rc.transport.tcp);
}

TEST_CASE("invalid run configs are configuration errors") {
    const auto c = ErrorCode::Config;
    CHECK(code_of("[]") == c);
    CHECK(code_of("{") == c);
    CHECK(code_of(R"({"rounds":1000,"noise":"ideal","seed":1})") == c);
    CHECK(code_of(R"({"mode":"qss","rounds":1000,"noise":"ideal","seed":1,"colour":1})") == c);
    CHECK(code_of(R"({"mode":"qss","rounds":0,"noise":"ideal","seed":1})") == c);
    CHECK(code_of(R"({"mode":"qss","rounds":-5,"noise":"ideal","seed":1})") == c);
    CHECK(code_of(R"({"mode":"qss","rounds":"many","noise":"ideal","seed":1})") == c);
    CHECK(code_of(R"({"mode":"bb84","rounds":1000,"noise":"ideal","seed":1})") == c);
    CHECK(code_of(R"({"mode":"qss","rounds":1000,"noise":"flip:2","seed":1})") == c);
    CHECK(code_of(R"({"mode":"qss","rounds":1000,"noise":"ideal","seed":1,"transport":"udp"})") == c);
    CHECK(code_of(R"({"mode":"qss","rounds":1000,"noise":"ideal","seed":1,
                      "transport":{"tcp":{"role":"eve","address":"h:1"}}})") == c);
    CHECK(code_of(R"({"mode":"qss","rounds":1000,"noise":"ideal","seed":1,
                      "output":{"report":"r","plots":"p"}})") == c);
}

TEST_CASE("report JSON carries a schema tag and every field") {
    SessionReport r;
    r.session_id = std::string(32, 'f');
    r.mode = SessionMode::TqcDeny;
    r.num_rounds = 100;
    r.noise = "ideal";
    r.passes.push_back({2, 10, 5, 3, 3, 0.6, 0.5});
    r.final_qber = 0.5;
    r.aborted = true;
    r.abort_reason = "no secure key: x";
    const auto j = report_to_json(r);
    CHECK(j["schema"] == "ghzqss.session_report");
    CHECK(j["version"] == 1);
    CHECK(j["mode"] == "tqc-deny");
    CHECK(j["secure"] == false);
    CHECK(j["eve_agreement"].is_null());
    CHECK(j["passes"].size() == 1);
    CHECK(j["post_pass_qber"] == nlohmann::json::array({0.5}));
}
