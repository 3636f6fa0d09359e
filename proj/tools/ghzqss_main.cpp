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

// ghzqss command-line tool. Everything goes through the C interface.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ghzqss/ghzqss.h"

using nlohmann::json;

namespace {

enum Exit : int {
    kOk = 0,
    kOther = 1,
    kConfig = 2,
    kAborted = 3,
    kTransport = 4,
    kKeyExhausted = 5,
};

bool g_log_json = false;

void log_line(const char *level, const std::string &event, const std::string &msg) {
    if (g_log_json) {
        std::cerr << json{{"level", level}, {"event", event}, {"message", msg}}.dump() << '\n';
    } else {
        std::cerr << "ghzqss: " << level << ": " << msg << '\n';
    }
}

int exit_for(ghz_status s) {
    switch (s) {
    case GHZ_OK:
        return kOk;
    case GHZ_ERR_CONFIG:
    case GHZ_ERR_INVALID_ARGUMENT:
        return kConfig;
    case GHZ_ERR_TRANSPORT:
    case GHZ_ERR_TIMEOUT:
    case GHZ_ERR_PROTOCOL:
        return kTransport;
    case GHZ_ERR_KEY_EXHAUSTED:
        return kKeyExhausted;
    default:
        return kOther;
    }
}

int report_failure(ghz_status s, const std::string &event) {
    log_line("error", event, std::string(ghz_status_name(s)) + ": " + ghz_last_error());
    return exit_for(s);
}

std::string read_text(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::trunc);
    out << text;
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
}

std::vector<unsigned> parse_blocks(const std::string &text) {
    std::vector<unsigned> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        const unsigned long v = std::stoul(item, &used);
        if (used != item.size()) {
            throw std::invalid_argument("bad block length '" + item + "'");
        }
        out.push_back(static_cast<unsigned>(v));
    }
    return out;
}

std::string fmt(const char *f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

void print_summary(const json &r, std::ostream &os) {
    os << "session " << r["session_id"].get<std::string>() << "  mode "
       << r["mode"].get<std::string>() << "  noise " << r["noise"].get<std::string>()
       << "  seed " << r["seed"].get<std::uint64_t>() << '\n';
    os << "rounds            " << r["num_rounds"].get<std::uint64_t>() << '\n';
    os << "sifted            " << r["sifted_count"].get<std::size_t>() << "  ("
       << fmt("%.4f", r["key_rate_fraction"].get<double>()) << " of rounds)\n";
    os << "sample            " << r["sample_size"].get<std::size_t>() << "  qber estimate "
       << fmt("%.5f", r["qber_estimate"].get<double>()) << '\n';
    os << "key before passes " << r["key_length_before_reconcile"].get<std::size_t>()
       << "  qber " << fmt("%.5f", r["key_qber_before_reconcile"].get<double>()) << '\n';
    if (!r["passes"].empty()) {
        os << "pass  n  input     kept_frac  output    qber\n";
        int i = 1;
        for (const auto &p : r["passes"]) {
            char line[128];
            std::snprintf(line, sizeof line, "%-4d  %-2zu %-9zu %-10.5f %-9zu %.5f\n", i++,
                          p["block_length"].get<std::size_t>(),
                          p["input_length"].get<std::size_t>(),
                          p["kept_block_fraction"].get<double>(),
                          p["output_length"].get<std::size_t>(), p["qber"].get<double>());
            os << line;
        }
    }
    os << "final key         " << r["final_key_length"].get<std::size_t>() << "  qber "
       << fmt("%.5f", r["final_qber"].get<double>()) << '\n';
    if (!r["eve_agreement"].is_null()) {
        os << "eve agreement     " << fmt("%.5f", r["eve_agreement"].get<double>()) << '\n';
    }
    if (r["aborted"].get<bool>()) {
        os << "status            ABORTED: " << r["abort_reason"].get<std::string>() << '\n';
    } else {
        os << "status            ok\n";
    }
}

struct RunFlags {
    std::string config;
    std::string mode;
    long long rounds = -1;
    std::string noise;
    std::string blocks;
    long long seed = -1;
    double sample_fraction = -1;
    double threshold = -1;
    bool eavesdropper = false;
    std::string transport;
    std::string role;
    std::string address;
    std::string session_id;
    long long timeout_ms = -1;
    std::string out;
    std::string keys_dir;
};

json build_run_doc(const RunFlags &f, CLI::App &cmd) {
    json doc = json::object();
    if (!f.config.empty()) {
        try {
            doc = json::parse(read_text(f.config));
        } catch (const json::exception &e) {
            throw CLI::ValidationError("--config", e.what());
        }
    }
    auto given = [&](const char *name) { return cmd.count(name) > 0; };
    if (given("--mode")) {
        doc["mode"] = f.mode;
    }
    if (given("--rounds")) {
        doc["rounds"] = f.rounds;
    }
    if (given("--noise")) {
        doc["noise"] = f.noise;
    }
    if (given("--blocks")) {
        doc["block_lengths"] = parse_blocks(f.blocks);
    }
    if (given("--seed")) {
        doc["seed"] = f.seed;
    }
    if (given("--sample-fraction")) {
        doc["sample_fraction"] = f.sample_fraction;
    }
    if (given("--threshold")) {
        doc["qber_threshold"] = f.threshold;
    }
    if (given("--eavesdropper")) {
        doc["eavesdropper"] = f.eavesdropper;
    }
    if (given("--session-id")) {
        doc["session_id"] = f.session_id;
    }
    if (given("--timeout-ms")) {
        doc["timeout_ms"] = f.timeout_ms;
    }
    if (given("--transport")) {
        if (f.transport == "tcp") {
            doc["transport"] = {{"tcp", {{"role", f.role}, {"address", f.address}}}};
        } else {
            doc["transport"] = f.transport;
        }
    }
    if (given("--out")) {
        doc["output"]["report"] = f.out;
    }
    if (given("--keys-dir")) {
        doc["output"]["keys_dir"] = f.keys_dir;
    }
    if (!doc.contains("mode")) {
        doc["mode"] = "qss";
    }
    if (!doc.contains("noise")) {
        doc["noise"] = "ideal";
    }
    if (!doc.contains("seed")) {
        doc["seed"] = 1;
    }
    return doc;
}

int cmd_run(const RunFlags &f, CLI::App &cmd) {
    json doc;
    try {
        doc = build_run_doc(f, cmd);
    } catch (const std::exception &e) {
        log_line("error", "config", e.what());
        return kConfig;
    }
    ghz_run_config *cfg = nullptr;
    if (auto s = ghz_run_config_parse(doc.dump().c_str(), &cfg); s != GHZ_OK) {
        return report_failure(s, "config");
    }
    log_line("info", "session_start", "running " + doc["mode"].get<std::string>() + " session");
    ghz_session *session = nullptr;
    const auto s = ghz_session_run(cfg, &session);
    ghz_run_config_free(cfg);
    if (s != GHZ_OK) {
        return report_failure(s, "session");
    }

    char *text = nullptr;
    if (auto st = ghz_session_report_json(session, &text); st != GHZ_OK) {
        ghz_session_free(session);
        return report_failure(st, "report");
    }
    const json report = json::parse(text);
    ghz_string_free(text);

    int rc = kOk;
    try {
        const auto output = doc.value("output", json::object());
        if (output.contains("report")) {
            write_text(output["report"].get<std::string>(), report.dump(2) + "\n");
        }
        if (output.contains("keys_dir") && !report["aborted"].get<bool>()) {
            const auto dir = output["keys_dir"].get<std::string>();
            std::filesystem::create_directories(dir);
            const char *names[] = {"alice", "bob", "charlie"};
            for (int r = 0; r < 3; ++r) {
                std::size_t len = 0;
                if (ghz_session_key_length(session, static_cast<ghz_role>(r), &len) != GHZ_OK) {
                    continue;
                }
                const auto path = dir + "/" + names[r] + ".key";
                if (auto st = ghz_session_write_key(session, static_cast<ghz_role>(r),
                                                    path.c_str());
                    st != GHZ_OK) {
                    rc = report_failure(st, "write_key");
                }
            }
        }
    } catch (const std::exception &e) {
        log_line("error", "output", e.what());
        rc = kOther;
    }
    ghz_session_free(session);

    print_summary(report, std::cout);
    if (report["aborted"].get<bool>()) {
        log_line("warn", "session_aborted", report["abort_reason"].get<std::string>());
        return kAborted;
    }
    return rc;
}

int cmd_oracle(double p, const std::string &blocks_text) {
    std::vector<unsigned> blocks;
    try {
        blocks = parse_blocks(blocks_text);
    } catch (const std::exception &e) {
        log_line("error", "usage", e.what());
        return kConfig;
    }
    if (blocks.empty()) {
        log_line("error", "usage", "no block lengths given");
        return kConfig;
    }
    std::cout << "pass  n   input_qber  kept_fraction  residual_qber  key_retention\n";
    double qber = p;
    double retention = 1.0;
    int i = 1;
    for (const unsigned n : blocks) {
        double kept = 0;
        double residual = 0;
        if (auto s = ghz_oracle_parity(qber, n, &kept, &residual); s != GHZ_OK) {
            return report_failure(s, "oracle");
        }
        retention *= kept * (n - 1) / n;
        char line[128];
        std::snprintf(line, sizeof line, "%-4d  %-3u %-11.6f %-14.6f %-14.6f %.6f\n", i++, n,
                      qber, kept, residual, retention);
        std::cout << line;
        qber = residual;
    }
    return kOk;
}

int cmd_correlations() {
    char labels[8][4];
    double values[8];
    if (auto s = ghz_correlation_table(labels, values); s != GHZ_OK) {
        return report_failure(s, "correlations");
    }
    for (int i = 0; i < 8; ++i) {
        // avoid printing -0.000000
        const double v = values[i] == 0.0 ? 0.0 : values[i];
        std::printf("%s %+.6f\n", labels[i], v);
    }
    return kOk;
}

struct OtpFlags {
    std::string in;
    std::string out;
    std::string key;
    std::string alice_key;
    std::string bob_key;
    std::string ref;
};

int print_error_rate(const OtpFlags &f) {
    if (f.ref.empty()) {
        return kOk;
    }
    double ber = 0;
    if (auto s = ghz_bit_error_rate_files(f.out.c_str(), f.ref.c_str(), &ber); s != GHZ_OK) {
        return report_failure(s, "bit_error_rate");
    }
    std::printf("bit error rate vs %s: %.6f\n", f.ref.c_str(), ber);
    return kOk;
}

int load_key(const std::string &path, ghz_key **key) {
    if (auto s = ghz_key_load(path.c_str(), key); s != GHZ_OK) {
        return report_failure(s, "load_key");
    }
    return kOk;
}

int cmd_encrypt(const OtpFlags &f) {
    ghz_key *key = nullptr;
    if (int rc = load_key(f.key, &key); rc != kOk) {
        return rc;
    }
    int rc = kOk;
    if (auto s = ghz_otp_encrypt_file(f.in.c_str(), key, f.out.c_str()); s != GHZ_OK) {
        rc = report_failure(s, "encrypt");
    } else if (auto s2 = ghz_key_save_metadata(key, f.key.c_str()); s2 != GHZ_OK) {
        rc = report_failure(s2, "save_key");
    } else {
        std::printf("encrypted %s -> %s, key offset now %zu of %zu bits\n", f.in.c_str(),
                    f.out.c_str(), ghz_key_offset(key), ghz_key_bit_length(key));
    }
    ghz_key_free(key);
    return rc;
}

int cmd_decrypt_coop(const OtpFlags &f) {
    ghz_key *a = nullptr;
    ghz_key *b = nullptr;
    int rc = load_key(f.alice_key, &a);
    if (rc == kOk) {
        rc = load_key(f.bob_key, &b);
    }
    if (rc == kOk) {
        if (auto s = ghz_otp_decrypt_coop_file(f.in.c_str(), a, b, f.out.c_str()); s != GHZ_OK) {
            rc = report_failure(s, "decrypt_coop");
        } else if (auto s2 = ghz_key_save_metadata(a, f.alice_key.c_str()); s2 != GHZ_OK) {
            rc = report_failure(s2, "save_key");
        } else if (auto s3 = ghz_key_save_metadata(b, f.bob_key.c_str()); s3 != GHZ_OK) {
            rc = report_failure(s3, "save_key");
        } else {
            std::printf("decrypted %s -> %s with both keys\n", f.in.c_str(), f.out.c_str());
            rc = print_error_rate(f);
        }
    }
    ghz_key_free(a);
    ghz_key_free(b);
    return rc;
}

int cmd_decrypt_single(const OtpFlags &f) {
    ghz_key *key = nullptr;
    if (int rc = load_key(f.key, &key); rc != kOk) {
        return rc;
    }
    int rc = kOk;
    if (auto s = ghz_otp_decrypt_single_file(f.in.c_str(), key, f.out.c_str()); s != GHZ_OK) {
        rc = report_failure(s, "decrypt_single");
    } else {
        std::printf("decrypted %s -> %s with one key only\n", f.in.c_str(), f.out.c_str());
        rc = print_error_rate(f);
    }
    ghz_key_free(key);
    return rc;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"GHZ-state quantum secret sharing and third-man cryptography"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ghz_version());
    app.add_flag("--log-json", g_log_json, "Diagnostics as one JSON object per line");

    RunFlags rf;
    auto *run = app.add_subcommand("run", "Run a session");
    run->add_option("--config", rf.config, "JSON run config; flags override it");
    run->add_option("--mode", rf.mode, "qss | tqc-allow | tqc-deny | distrust-hv");
    run->add_option("--rounds", rf.rounds, "Number of emitted triplets");
    run->add_option("--noise", rf.noise, "ideal | werner:<v> | flip:<p>");
    run->add_option("--blocks", rf.blocks, "Parity pass block lengths, e.g. 2,8");
    run->add_option("--seed", rf.seed, "Session seed");
    run->add_option("--sample-fraction", rf.sample_fraction, "Sifted fraction disclosed");
    run->add_option("--threshold", rf.threshold, "QBER abort threshold");
    run->add_flag("--eavesdropper", rf.eavesdropper, "Intercept-resend attack on Charlie");
    run->add_option("--transport", rf.transport, "inproc | tcp")
        ->check(CLI::IsMember({"inproc", "tcp"}));
    run->add_option("--role", rf.role, "alice | bob | charlie (tcp)");
    run->add_option("--address", rf.address, "host:port; Charlie listens there (tcp)");
    run->add_option("--session-id", rf.session_id, "32 hex digits shared by all parties");
    run->add_option("--timeout-ms", rf.timeout_ms, "Per-message receive timeout");
    run->add_option("--out", rf.out, "Report JSON path");
    run->add_option("--keys-dir", rf.keys_dir, "Directory for <role>.key files");
    run->add_flag("--log-json", g_log_json, "Diagnostics as one JSON object per line");

    double oracle_p = 0;
    std::string oracle_blocks;
    auto *oracle = app.add_subcommand("oracle", "Exact parity-pass predictions");
    oracle->add_option("p", oracle_p, "Input error rate")->required()->check(CLI::Range(0.0, 0.5));
    oracle->add_option("blocks", oracle_blocks, "Block lengths, e.g. 2,8")->required();

    auto *corr = app.add_subcommand("correlations", "GHZ correlation table");

    OtpFlags of;
    auto *otp = app.add_subcommand("otp", "One-time pad with session keys");
    otp->require_subcommand(1);
    auto *enc = otp->add_subcommand("encrypt", "Encrypt with one key (advances its offset)");
    enc->add_option("--in", of.in)->required();
    enc->add_option("--key", of.key)->required();
    enc->add_option("--out", of.out)->required();
    auto *coop = otp->add_subcommand("decrypt-coop", "Decrypt with Alice's and Bob's keys");
    coop->add_option("--in", of.in)->required();
    coop->add_option("--alice-key", of.alice_key)->required();
    coop->add_option("--bob-key", of.bob_key)->required();
    coop->add_option("--out", of.out)->required();
    coop->add_option("--ref", of.ref, "Reference file for a bit error rate");
    auto *single = otp->add_subcommand("decrypt-single", "Attempt decryption with one key");
    single->add_option("--in", of.in)->required();
    single->add_option("--key", of.key)->required();
    single->add_option("--out", of.out)->required();
    single->add_option("--ref", of.ref, "Reference file for a bit error rate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    if (run->parsed()) {
        return cmd_run(rf, *run);
    }
    if (oracle->parsed()) {
        return cmd_oracle(oracle_p, oracle_blocks);
    }
    if (corr->parsed()) {
        return cmd_correlations();
    }
    if (enc->parsed()) {
        return cmd_encrypt(of);
    }
    if (coop->parsed()) {
        return cmd_decrypt_coop(of);
    }
    if (single->parsed()) {
        return cmd_decrypt_single(of);
    }
    return kOther;
}
