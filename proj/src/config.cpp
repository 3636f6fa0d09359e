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

#include "config.hpp"

#include <set>

#include "error.hpp"

namespace ghzqss {

using nlohmann::json;

namespace {

void reject_unknown(const json &obj, const std::set<std::string> &allowed,
                    const std::string &where) {
    for (const auto &[key, _] : obj.items()) {
        if (!allowed.contains(key)) {
            fail(ErrorCode::Config, "unknown key '" + key + "' in " + where);
        }
    }
}

const json &need(const json &obj, const char *key) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        fail(ErrorCode::Config, std::string("missing required key '") + key + "'");
    }
    return *it;
}

template <class T> T as(const json &v, const char *key) {
    try {
        return v.get<T>();
    } catch (const json::exception &) {
        fail(ErrorCode::Config, std::string("key '") + key + "' has the wrong type");
    }
}

std::uint64_t as_count(const json &v, const char *key) {
    if (!v.is_number_integer()) {
        fail(ErrorCode::Config, std::string("key '") + key + "' must be an integer");
    }
    if (v.is_number_unsigned()) {
        return v.get<std::uint64_t>();
    }
    const auto s = v.get<std::int64_t>();
    if (s < 0) {
        fail(ErrorCode::Config, std::string("key '") + key + "' must not be negative");
    }
    return static_cast<std::uint64_t>(s);
}

TransportChoice parse_transport(const json &t) {
    TransportChoice out;
    if (t.is_string()) {
        if (t.get<std::string>() != "inproc") {
            fail(ErrorCode::Config, "transport must be \"inproc\" or {\"tcp\": {...}}");
        }
        return out;
    }
    if (!t.is_object()) {
        fail(ErrorCode::Config, "transport must be \"inproc\" or {\"tcp\": {...}}");
    }
    reject_unknown(t, {"tcp"}, "transport");
    const auto &tcp = need(t, "tcp");
    if (!tcp.is_object()) {
        fail(ErrorCode::Config, "transport.tcp must be an object");
    }
    reject_unknown(tcp, {"role", "address"}, "transport.tcp");
    out.tcp = true;
    out.role = parse_role(as<std::string>(need(tcp, "role"), "role"));
    out.address = parse_address(as<std::string>(need(tcp, "address"), "address"));
    return out;
}

} // namespace

RunConfig parse_run_config(const json &doc) {
    if (!doc.is_object()) {
        fail(ErrorCode::Config, "run config must be a JSON object");
    }
    reject_unknown(doc,
                   {"mode", "rounds", "noise", "seed", "sample_fraction", "block_lengths",
                    "qber_threshold", "eavesdropper", "session_id", "timeout_ms",
                    "transport", "output"},
                   "run config");
    RunConfig rc;
    auto &s = rc.session;
    s.mode = parse_mode(as<std::string>(need(doc, "mode"), "mode"));
    s.num_rounds = as_count(need(doc, "rounds"), "rounds");
    s.noise = parse_noise(as<std::string>(need(doc, "noise"), "noise"));
    s.seed = as_count(need(doc, "seed"), "seed");
    if (doc.contains("sample_fraction")) {
        s.sample_fraction = as<double>(doc["sample_fraction"], "sample_fraction");
    }
    if (doc.contains("block_lengths")) {
        const auto &bl = doc["block_lengths"];
        if (!bl.is_array()) {
            fail(ErrorCode::Config, "block_lengths must be an array");
        }
        s.block_lengths.clear();
        for (const auto &n : bl) {
            s.block_lengths.push_back(static_cast<std::size_t>(as_count(n, "block_lengths")));
        }
    }
    if (doc.contains("qber_threshold")) {
        s.qber_threshold = as<double>(doc["qber_threshold"], "qber_threshold");
    }
    if (doc.contains("eavesdropper")) {
        s.eavesdropper = as<bool>(doc["eavesdropper"], "eavesdropper");
    }
    if (doc.contains("session_id")) {
        s.session_id = as<std::string>(doc["session_id"], "session_id");
    }
    if (doc.contains("timeout_ms")) {
        s.timeout = Millis(static_cast<Millis::rep>(as_count(doc["timeout_ms"], "timeout_ms")));
    }
    if (doc.contains("transport")) {
        rc.transport = parse_transport(doc["transport"]);
    }
    if (doc.contains("output")) {
        const auto &o = doc["output"];
        if (!o.is_object()) {
            fail(ErrorCode::Config, "output must be an object");
        }
        reject_unknown(o, {"report", "keys_dir"}, "output");
        if (o.contains("report")) {
            rc.report_path = as<std::string>(o["report"], "output.report");
        }
        if (o.contains("keys_dir")) {
            rc.keys_dir = as<std::string>(o["keys_dir"], "output.keys_dir");
        }
    }
    validate(s);
    return rc;
}

RunConfig parse_run_config(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception &e) {
        fail(ErrorCode::Config, std::string("run config is not valid JSON: ") + e.what());
    }
    return parse_run_config(doc);
}

json report_to_json(const SessionReport &r) {
    json passes = json::array();
    for (const auto &p : r.passes) {
        passes.push_back({{"block_length", p.block_length},
                          {"input_length", p.input_length},
                          {"blocks", p.blocks},
                          {"kept_blocks", p.kept_blocks},
                          {"kept_block_fraction", p.kept_block_fraction},
                          {"output_length", p.output_length},
                          {"qber", p.qber}});
    }
    json j{{"schema", "ghzqss.session_report"},
           {"version", 1},
           {"session_id", r.session_id},
           {"mode", mode_name(r.mode)},
           {"num_rounds", r.num_rounds},
           {"noise", r.noise},
           {"seed", r.seed},
           {"eavesdropper", r.eavesdropper},
           {"sifted_count", r.sifted_count},
           {"sample_size", r.sample_size},
           {"qber_estimate", r.qber_estimate},
           {"sifted_qber", r.sifted_qber},
           {"key_length_before_reconcile", r.key_length_before_reconcile},
           {"key_qber_before_reconcile", r.key_qber_before_reconcile},
           {"passes", passes},
           {"post_pass_qber", r.post_pass_qber()},
           {"final_key_length", r.final_key_length},
           {"final_qber", r.final_qber},
           {"key_rate_fraction", r.key_rate_fraction},
           {"aborted", r.aborted},
           {"abort_reason", r.abort_reason},
           {"secure", !r.aborted}};
    j["eve_agreement"] = r.eve_agreement ? json(*r.eve_agreement) : json(nullptr);
    return j;
}

} // namespace ghzqss
