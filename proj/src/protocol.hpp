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

/**
 * @file
 * Quantum secret sharing and third-man cryptography sessions.
 *
 * A session has two layers. The quantum layer (simulate_world) draws every
 * emitted triplet, every basis choice and every measurement outcome from the
 * session seed, in a fixed order per round:
 *
 *   source draw, Alice/Bob/Charlie basis, eavesdropper (if enabled),
 *   Alice/Bob/Charlie measurement, noise flip on Charlie's outcome.
 *
 * It stands in for the shared photons: each process of a multi-process run
 * simulates the same world, and each party reads only its own column.
 *
 * The classical layer (run_party) is one state machine per party that talks
 * to the others only through an Endpoint: bases are announced after the
 * whole run, sifted locally, a seeded random sample is disclosed for the
 * error-rate test, and the parity passes follow.
 */

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bits.hpp"
#include "qsim.hpp"
#include "reconcile.hpp"
#include "roles.hpp"
#include "source.hpp"
#include "transport.hpp"

namespace ghzqss {

struct BasisCombo {
    Basis alice;
    Basis bob;
    Basis charlie;
    bool operator==(const BasisCombo &) const = default;
};

/// X or Y with probability 1/2 each (one draw). Alice and Bob in
/// DistrustHv always use Z and draw nothing.
Basis choose_basis(Rng &rng, SessionMode mode, Role role);

/// Key-generating combinations are XXX, XYY, YXY and YYX. Throws
/// InvalidArgument if any basis is Z.
bool sift(const BasisCombo &combo);

/// Charlie flips his bit in XXX rounds (Minus -> 1); every other case maps
/// Plus -> 1. Throws InvalidArgument for a non-sifted combination.
std::uint8_t encode(Role role, const BasisCombo &combo, Outcome outcome);

/// H -> 0, V -> 1; used by DistrustHv, which skips sifting.
constexpr std::uint8_t hv_bit(Outcome o) { return o == Outcome::Minus ? 1 : 0; }

/// Fraction of sampled positions with alice ^ bob != charlie. Throws
/// InvalidArgument on an empty sample.
double estimate_qber(std::span<const std::uint64_t> sample_indices,
                     std::span<const std::uint8_t> alice,
                     std::span<const std::uint8_t> bob,
                     std::span<const std::uint8_t> charlie);

/// Two-party form: fraction of sampled positions with alice != bob.
double estimate_qber_pair(std::span<const std::uint64_t> sample_indices,
                          std::span<const std::uint8_t> alice,
                          std::span<const std::uint8_t> bob);

/// A triplet between the source and the detectors. A mixed triplet may
/// still carry a definite single-qubit state on Charlie's line after an
/// intercept-resend attack.
struct TripletInFlight {
    EmittedTriplet triplet;
    std::optional<StateVector> resent_charlie;
};

/// Measures Charlie's qubit in `eve_basis` and forwards the eigenstate.
/// Consumes one uniform draw. Returns Eve's outcome.
Outcome eavesdrop_intercept_resend(TripletInFlight &t, Basis eve_basis, Rng &rng);

/// Measures the qubit of `role`, collapsing a pure triplet. One uniform draw.
Outcome measure_party(TripletInFlight &t, Role role, Basis basis, Rng &rng);

struct SessionConfig {
    SessionMode mode = SessionMode::Qss;
    std::uint64_t num_rounds = 0;
    NoiseModel noise = IdealNoise{};
    std::uint64_t seed = 0;
    double sample_fraction = 0.10;
    std::vector<std::size_t> block_lengths{2, 8};
    double qber_threshold = 0.15;
    bool eavesdropper = false;
    std::string session_id; ///< 32 hex digits; derived from the rest when empty
    Millis timeout{30000};
};

inline constexpr std::uint64_t kMinRounds = 100;

/// Throws Config.
void validate(const SessionConfig &config);

/// Fills in a derived session id if unset, then validates.
SessionConfig normalized(SessionConfig config);

/// Hex digest over every field that influences the outcome (timeout
/// excluded). Parties compare it during the handshake.
std::string config_digest(const SessionConfig &config);

struct RoundRecord {
    std::uint64_t round_id;
    Basis basis;
    Outcome outcome;
    bool operator==(const RoundRecord &) const = default;
};

struct World {
    std::array<std::vector<RoundRecord>, 3> records; ///< indexed by Role
    std::vector<RoundRecord> eve;                    ///< empty without eavesdropper
    std::vector<std::uint8_t> pure;                  ///< 1 if the triplet was the GHZ state

    [[nodiscard]] const std::vector<RoundRecord> &of(Role r) const {
        return records[index_of(r)];
    }
    [[nodiscard]] std::size_t num_rounds() const { return pure.size(); }
    [[nodiscard]] BasisCombo combo(std::size_t round) const;
};

World simulate_world(const SessionConfig &config);

/// Alice's guesses of Charlie's bits when Charlie stays silent.
BitVec deny_guess_bits(std::uint64_t seed, std::size_t count);

/// round(fraction * sifted), at least 1 when anything was sifted.
std::size_t sample_size(std::size_t sifted, double fraction);

/// Sorted sample of `k` distinct positions in [0, sifted).
std::vector<std::uint64_t> choose_sample(std::size_t sifted, std::size_t k,
                                         std::uint64_t seed);

struct PassReport {
    std::size_t block_length = 0;
    std::size_t input_length = 0;
    std::size_t blocks = 0;
    std::size_t kept_blocks = 0;
    std::size_t output_length = 0;
    double kept_block_fraction = 0.0;
    double qber = 0.0;
    bool operator==(const PassReport &) const = default;
};

/// What a session produced. Every field is either public (derivable from
/// the classical transcript) or ground truth read off the simulated world;
/// all three parties therefore produce the same report.
struct SessionReport {
    std::string session_id;
    SessionMode mode = SessionMode::Qss;
    std::uint64_t num_rounds = 0;
    std::string noise;
    std::uint64_t seed = 0;
    bool eavesdropper = false;

    std::size_t sifted_count = 0;
    std::size_t sample_size = 0;
    double qber_estimate = 0.0; ///< on the disclosed sample
    double sifted_qber = 0.0;   ///< ground truth over every sifted round
    std::size_t key_length_before_reconcile = 0;
    double key_qber_before_reconcile = 0.0;
    std::vector<PassReport> passes;
    std::size_t final_key_length = 0;
    double final_qber = 0.0;
    double key_rate_fraction = 0.0; ///< sifted_count / num_rounds
    bool aborted = false;
    std::string abort_reason;
    std::optional<double> eve_agreement;

    [[nodiscard]] std::vector<double> post_pass_qber() const;
    bool operator==(const SessionReport &) const = default;
};

struct PartyResult {
    SessionReport report;
    std::optional<BitVec> final_key; ///< set for key holders
};

/// Runs one party's state machine to completion over `endpoint`. The caller
/// owns the endpoint and closes it afterwards.
PartyResult run_party(const SessionConfig &config, const World &world, Endpoint &endpoint);

struct SessionResult {
    SessionReport report;
    std::array<std::optional<BitVec>, 3> keys; ///< by Role
};

/// Three party threads over an in-process network.
SessionResult run_inproc(const SessionConfig &config);

/// One party of a TCP session; Charlie listens on `addr`, the others
/// connect to it. Only this party's key is filled in.
SessionResult run_tcp_party(const SessionConfig &config, Role role, const TcpAddress &addr);

} // namespace ghzqss
