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
 * Block-parity error reduction.
 *
 * Each key holder splits its key into consecutive blocks of n bits (a
 * trailing remainder shorter than n is dropped) and publishes one parity bit
 * per block. A block survives when the parities agree: for three holders the
 * relation is parity(a) ^ parity(b) == parity(c), for two holders
 * parity(a) == parity(b). Surviving blocks lose their last bit, which the
 * published parity has exposed.
 *
 * No shuffling happens between passes.
 */

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "bits.hpp"
#include "roles.hpp"
#include "transport.hpp"

namespace ghzqss {

BitVec block_parities(std::span<const std::uint8_t> bits, std::size_t n);

/// Empty `pc` selects the two-party rule.
BitVec keep_mask(std::span<const std::uint8_t> pa, std::span<const std::uint8_t> pb,
                 std::optional<std::span<const std::uint8_t>> pc);

/// First n-1 bits of every kept block.
BitVec retain_kept(std::span<const std::uint8_t> bits, std::size_t n,
                   std::span<const std::uint8_t> mask);

struct PassOutcome {
    std::size_t block_length = 0;
    std::size_t input_length = 0;
    std::size_t blocks = 0;
    std::size_t kept_blocks = 0;
    std::size_t output_length = 0;
    double kept_block_fraction = 0.0; ///< 0 when there are no blocks
    BitVec kept_mask;
    BitVec alice;
    BitVec bob;
    std::optional<BitVec> charlie;
};

/// Local evaluation of one pass over all holders' keys. Throws
/// InvalidArgument on length mismatch or n < 2; input shorter than n yields
/// an empty outcome.
PassOutcome parity_pass(std::span<const std::uint8_t> alice,
                        std::span<const std::uint8_t> bob,
                        std::optional<std::span<const std::uint8_t>> charlie,
                        std::size_t n);

/// Runs parity_pass once per block length, each on the previous output.
std::vector<PassOutcome> cascade(std::span<const std::uint8_t> alice,
                                 std::span<const std::uint8_t> bob,
                                 std::optional<std::span<const std::uint8_t>> charlie,
                                 std::span<const std::size_t> block_lengths);

struct ExchangedPass {
    std::size_t blocks = 0;
    BitVec kept_mask;
    BitVec own_kept; ///< empty for a party holding no key
};

/// One pass as seen by a single party over the transport. Key holders
/// broadcast their parity vector; every party (holder or observer) reads
/// the holders' vectors and derives the same public kept mask.
///
/// `own_key` is ignored when `self` is not a key holder in `mode`;
/// `key_length` is the public length of the holders' keys.
ExchangedPass exchange_parity_pass(Endpoint &endpoint, SessionMode mode,
                                   std::span<const std::uint8_t> own_key,
                                   std::size_t key_length, std::size_t n,
                                   std::uint32_t pass_index, Millis timeout);

struct ParityOracle {
    double kept_fraction;
    double residual_qber;
};

inline constexpr std::size_t kMaxOracleBlock = 24;

/// Exact statistics of one pass on keys with independent triplet error rate
/// p, by enumeration of all 2^n error patterns. `discard_position` selects
/// which bit of a kept block is dropped (default: the last).
ParityOracle oracle_parity(double p, std::size_t n,
                           std::optional<std::size_t> discard_position = std::nullopt);

/// (1 + (1-2p)^n) / 2
double kept_fraction_closed_form(double p, std::size_t n);

} // namespace ghzqss
