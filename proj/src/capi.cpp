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

#include "ghzqss/ghzqss.h"

#include <chrono>
#include <cstring>
#include <new>
#include <string>

#include "config.hpp"
#include "error.hpp"
#include "otp.hpp"
#include "protocol.hpp"
#include "qsim.hpp"
#include "reconcile.hpp"
#include "source.hpp"

using namespace ghzqss;

struct ghz_rng {
    Rng rng;
};

struct ghz_state {
    StateVector sv;
};

struct ghz_run_config {
    RunConfig rc;
};

struct ghz_session {
    RunConfig rc;
    SessionResult result;
    double elapsed_ms;
};

struct ghz_key {
    KeyMaterial key;
};

namespace {

thread_local std::string g_last_error;

ghz_status to_status(ErrorCode c) {
    switch (c) {
    case ErrorCode::InvalidArgument:
        return GHZ_ERR_INVALID_ARGUMENT;
    case ErrorCode::ImpossibleOutcome:
        return GHZ_ERR_IMPOSSIBLE_OUTCOME;
    case ErrorCode::Config:
        return GHZ_ERR_CONFIG;
    case ErrorCode::Transport:
        return GHZ_ERR_TRANSPORT;
    case ErrorCode::Timeout:
        return GHZ_ERR_TIMEOUT;
    case ErrorCode::ProtocolViolation:
        return GHZ_ERR_PROTOCOL;
    case ErrorCode::KeyExhausted:
        return GHZ_ERR_KEY_EXHAUSTED;
    case ErrorCode::Io:
        return GHZ_ERR_IO;
    case ErrorCode::Internal:
        return GHZ_ERR_INTERNAL;
    }
    return GHZ_ERR_INTERNAL;
}

template <class F> ghz_status guarded(F &&f) {
    g_last_error.clear();
    try {
        f();
        return GHZ_OK;
    } catch (const Error &e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc &) {
        g_last_error = "out of memory";
        return GHZ_ERR_INTERNAL;
    } catch (const std::exception &e) {
        g_last_error = e.what();
        return GHZ_ERR_INTERNAL;
    }
}

void need(const void *p, const char *name) {
    if (p == nullptr) {
        fail(ErrorCode::InvalidArgument, std::string(name) + " is NULL");
    }
}

Basis to_basis(ghz_basis b) {
    if (b != GHZ_BASIS_X && b != GHZ_BASIS_Y && b != GHZ_BASIS_Z) {
        fail(ErrorCode::InvalidArgument, "unknown basis");
    }
    return static_cast<Basis>(b);
}

Outcome to_outcome(ghz_outcome o) {
    if (o != GHZ_PLUS && o != GHZ_MINUS) {
        fail(ErrorCode::InvalidArgument, "unknown outcome");
    }
    return o == GHZ_PLUS ? Outcome::Plus : Outcome::Minus;
}

Role to_role(ghz_role r) {
    if (r != GHZ_ALICE && r != GHZ_BOB && r != GHZ_CHARLIE) {
        fail(ErrorCode::InvalidArgument, "unknown role");
    }
    return static_cast<Role>(r);
}

char *dup_string(const std::string &s) {
    auto *out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

const BitVec &session_key(const ghz_session *s, ghz_role role) {
    need(s, "session");
    const auto &k = s->result.keys[index_of(to_role(role))];
    if (!k) {
        fail(ErrorCode::InvalidArgument,
             std::string("no key for ") + std::string(role_name(to_role(role))) +
                 " in this session");
    }
    return *k;
}

} // namespace

extern "C" {

const char *ghz_version(void) { return "1.0.0"; }

const char *ghz_status_name(ghz_status status) {
    switch (status) {
    case GHZ_OK:
        return "ok";
    case GHZ_ERR_INVALID_ARGUMENT:
        return "invalid argument";
    case GHZ_ERR_IMPOSSIBLE_OUTCOME:
        return "impossible outcome";
    case GHZ_ERR_CONFIG:
        return "configuration error";
    case GHZ_ERR_TRANSPORT:
        return "transport error";
    case GHZ_ERR_TIMEOUT:
        return "timeout";
    case GHZ_ERR_PROTOCOL:
        return "protocol violation";
    case GHZ_ERR_KEY_EXHAUSTED:
        return "key exhausted";
    case GHZ_ERR_IO:
        return "i/o error";
    case GHZ_ERR_INTERNAL:
        return "internal error";
    }
    return "unknown status";
}

const char *ghz_last_error(void) { return g_last_error.c_str(); }

void ghz_string_free(char *s) { delete[] s; }

ghz_status ghz_rng_create(uint64_t seed, ghz_rng **out) {
    return guarded([&] {
        need(out, "out");
        *out = new ghz_rng{Rng(seed)};
    });
}

void ghz_rng_free(ghz_rng *rng) { delete rng; }

ghz_status ghz_state_ghz(unsigned num_qubits, ghz_state **out) {
    return guarded([&] {
        need(out, "out");
        *out = new ghz_state{make_ghz(num_qubits)};
    });
}

ghz_status ghz_state_basis(ghz_basis basis, ghz_outcome outcome, ghz_state **out) {
    return guarded([&] {
        need(out, "out");
        auto states = basis_states(to_basis(basis));
        *out = new ghz_state{to_outcome(outcome) == Outcome::Plus ? std::move(states.first)
                                                                  : std::move(states.second)};
    });
}

void ghz_state_free(ghz_state *state) { delete state; }

unsigned ghz_state_num_qubits(const ghz_state *state) {
    return state == nullptr ? 0U : static_cast<unsigned>(state->sv.num_qubits());
}

ghz_status ghz_state_amplitudes(const ghz_state *state, double *out, size_t capacity) {
    return guarded([&] {
        need(state, "state");
        need(out, "out");
        const auto amps = state->sv.amplitudes();
        require(capacity >= 2 * amps.size(), ErrorCode::InvalidArgument,
                "output buffer too small");
        for (std::size_t i = 0; i < amps.size(); ++i) {
            out[2 * i] = amps[i].real();
            out[2 * i + 1] = amps[i].imag();
        }
    });
}

ghz_status ghz_outcome_probabilities(const ghz_state *state, unsigned qubit, ghz_basis basis,
                                     double *p_plus, double *p_minus) {
    return guarded([&] {
        need(state, "state");
        need(p_plus, "p_plus");
        need(p_minus, "p_minus");
        const auto p = outcome_probabilities(state->sv, qubit, to_basis(basis));
        *p_plus = p.plus;
        *p_minus = p.minus;
    });
}

ghz_status ghz_project(const ghz_state *state, unsigned qubit, ghz_basis basis,
                       ghz_outcome outcome, double *probability, ghz_state **collapsed) {
    return guarded([&] {
        need(state, "state");
        need(probability, "probability");
        need(collapsed, "collapsed");
        auto pr = project(state->sv, qubit, to_basis(basis), to_outcome(outcome));
        *collapsed = new ghz_state{std::move(pr.state)};
        *probability = pr.probability;
    });
}

ghz_status ghz_measure(const ghz_state *state, unsigned qubit, ghz_basis basis, ghz_rng *rng,
                       ghz_outcome *outcome, ghz_state **collapsed) {
    return guarded([&] {
        need(state, "state");
        need(rng, "rng");
        need(outcome, "outcome");
        need(collapsed, "collapsed");
        auto m = measure(state->sv, qubit, to_basis(basis), rng->rng);
        *collapsed = new ghz_state{std::move(m.state)};
        *outcome = m.outcome == Outcome::Plus ? GHZ_PLUS : GHZ_MINUS;
    });
}

ghz_status ghz_expectation(const ghz_state *state, const ghz_basis *bases, size_t count,
                           double *out) {
    return guarded([&] {
        need(state, "state");
        need(out, "out");
        if (count > 0) {
            need(bases, "bases");
        }
        std::vector<Basis> bs;
        bs.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            bs.push_back(to_basis(bases[i]));
        }
        *out = expectation(state->sv, bs);
    });
}

ghz_status ghz_fidelity(const ghz_state *a, const ghz_state *b, double *out) {
    return guarded([&] {
        need(a, "a");
        need(b, "b");
        need(out, "out");
        *out = fidelity(a->sv, b->sv);
    });
}

ghz_status ghz_four_photon_trigger(ghz_rng *rng, int *accepted, ghz_state **out) {
    return guarded([&] {
        need(rng, "rng");
        need(accepted, "accepted");
        need(out, "out");
        auto t = four_photon_trigger(rng->rng);
        *out = new ghz_state{std::move(t.state)};
        *accepted = t.accepted ? 1 : 0;
    });
}

ghz_status ghz_correlation_table(char labels[8][4], double values[8]) {
    return guarded([&] {
        need(labels, "labels");
        need(values, "values");
        const auto ghz = make_ghz(3);
        for (unsigned row = 0; row < 8; ++row) {
            std::array<Basis, 3> bases{};
            for (unsigned q = 0; q < 3; ++q) {
                bases[q] = ((row >> (2 - q)) & 1U) != 0 ? Basis::Y : Basis::X;
                labels[row][q] = basis_letter(bases[q]);
            }
            labels[row][3] = '\0';
            values[row] = expectation(ghz, bases);
        }
    });
}

ghz_status ghz_oracle_parity(double error_rate, unsigned block_length, double *kept_fraction,
                             double *residual_qber) {
    return guarded([&] {
        need(kept_fraction, "kept_fraction");
        need(residual_qber, "residual_qber");
        const auto o = oracle_parity(error_rate, block_length);
        *kept_fraction = o.kept_fraction;
        *residual_qber = o.residual_qber;
    });
}

ghz_status ghz_run_config_parse(const char *json, ghz_run_config **out) {
    return guarded([&] {
        need(json, "json");
        need(out, "out");
        auto rc = parse_run_config(std::string_view(json));
        rc.session = normalized(rc.session);
        *out = new ghz_run_config{std::move(rc)};
    });
}

void ghz_run_config_free(ghz_run_config *config) { delete config; }

ghz_status ghz_session_run(const ghz_run_config *config, ghz_session **out) {
    return guarded([&] {
        need(config, "config");
        need(out, "out");
        const auto &rc = config->rc;
        const auto start = std::chrono::steady_clock::now();
        SessionResult res = rc.transport.tcp
                                ? run_tcp_party(rc.session, rc.transport.role, rc.transport.address)
                                : run_inproc(rc.session);
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();
        *out = new ghz_session{rc, std::move(res), ms};
    });
}

void ghz_session_free(ghz_session *session) { delete session; }

int ghz_session_aborted(const ghz_session *session) {
    return session != nullptr && session->result.report.aborted ? 1 : 0;
}

ghz_status ghz_session_report_json(const ghz_session *session, char **out) {
    return guarded([&] {
        need(session, "session");
        need(out, "out");
        auto j = report_to_json(session->result.report);
        const auto &t = session->rc.transport;
        nlohmann::json runtime{{"transport", t.tcp ? "tcp" : "inproc"},
                               {"elapsed_ms", session->elapsed_ms}};
        if (t.tcp) {
            runtime["role"] = role_name(t.role);
        }
        j["runtime"] = runtime;
        *out = dup_string(j.dump(2));
    });
}

ghz_status ghz_session_key_length(const ghz_session *session, ghz_role role, size_t *out) {
    return guarded([&] {
        need(out, "out");
        *out = session_key(session, role).size();
    });
}

ghz_status ghz_session_key_bits(const ghz_session *session, ghz_role role, uint8_t *out,
                                size_t capacity) {
    return guarded([&] {
        const auto &k = session_key(session, role);
        need(out, "out");
        require(capacity >= k.size(), ErrorCode::InvalidArgument, "output buffer too small");
        std::memcpy(out, k.data(), k.size());
    });
}

ghz_status ghz_session_write_key(const ghz_session *session, ghz_role role, const char *path) {
    return guarded([&] {
        need(path, "path");
        const auto &k = session_key(session, role);
        KeyMaterial key(k, session->result.report.session_id);
        key.role = std::string(role_name(to_role(role)));
        key.residual_qber = session->result.report.final_qber;
        save_key(key, path);
    });
}

ghz_status ghz_key_load(const char *path, ghz_key **out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new ghz_key{load_key(path)};
    });
}

ghz_status ghz_key_save_metadata(const ghz_key *key, const char *path) {
    return guarded([&] {
        need(key, "key");
        need(path, "path");
        save_key_metadata(key->key, path);
    });
}

void ghz_key_free(ghz_key *key) { delete key; }

size_t ghz_key_bit_length(const ghz_key *key) {
    return key == nullptr ? 0 : key->key.bits().size();
}

size_t ghz_key_offset(const ghz_key *key) {
    return key == nullptr ? 0 : key->key.consumed_offset();
}

ghz_status ghz_otp_encrypt_file(const char *in_path, ghz_key *key, const char *out_path) {
    return guarded([&] {
        need(in_path, "in_path");
        need(key, "key");
        need(out_path, "out_path");
        const auto target = pad_target(read_bytes(in_path));
        const auto pad = key->key.peek(target.bits.size());
        write_bytes(out_path, assemble(target.clear_prefix, pad_xor(target.bits, pad)));
        key->key.take(target.bits.size());
    });
}

ghz_status ghz_otp_decrypt_coop_file(const char *in_path, ghz_key *alice_key, ghz_key *bob_key,
                                     const char *out_path) {
    return guarded([&] {
        need(in_path, "in_path");
        need(alice_key, "alice_key");
        need(bob_key, "bob_key");
        need(out_path, "out_path");
        const auto target = pad_target(read_bytes(in_path));
        const auto n = target.bits.size();
        const auto a = alice_key->key.peek(n);
        const auto b = bob_key->key.peek(n);
        write_bytes(out_path, assemble(target.clear_prefix, cooperative_decrypt(target.bits, a, b)));
        alice_key->key.take(n);
        bob_key->key.take(n);
    });
}

ghz_status ghz_otp_decrypt_single_file(const char *in_path, const ghz_key *key,
                                       const char *out_path) {
    return guarded([&] {
        need(in_path, "in_path");
        need(key, "key");
        need(out_path, "out_path");
        const auto target = pad_target(read_bytes(in_path));
        const auto pad = key->key.peek(target.bits.size());
        write_bytes(out_path, assemble(target.clear_prefix, pad_xor(target.bits, pad)));
    });
}

ghz_status ghz_bit_error_rate_files(const char *a_path, const char *b_path, double *out) {
    return guarded([&] {
        need(a_path, "a_path");
        need(b_path, "b_path");
        need(out, "out");
        const auto a = pad_target(read_bytes(a_path));
        const auto b = pad_target(read_bytes(b_path));
        require(a.bits.size() == b.bits.size(), ErrorCode::InvalidArgument,
                "files differ in padded length");
        *out = disagreement_rate(a.bits, b.bits);
    });
}

} // extern "C"
