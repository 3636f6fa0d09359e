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

#include "reconcile.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "error.hpp"

namespace ghzqss {

namespace {

void check_block_length(std::size_t n) {
    require(n >= 2, ErrorCode::InvalidArgument,
            "block length must be at least 2, got " + std::to_string(n));
}

template <class T>
T expect_from(Endpoint &ep, Role from, Millis timeout) {
    Envelope env = ep.recv(from, timeout);
    auto *msg = std::get_if<T>(&env.payload);
    if (msg == nullptr) {
        fail(ErrorCode::ProtocolViolation,
             "unexpected " + std::string(message_kind(env.payload)) + " from " +
                 std::string(role_name(from)));
    }
    return std::move(*msg);
}

} // namespace

BitVec block_parities(std::span<const std::uint8_t> bits, std::size_t n) {
    check_block_length(n);
    const std::size_t blocks = bits.size() / n;
    BitVec out(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        std::uint8_t p = 0;
        for (std::size_t i = 0; i < n; ++i) {
            p ^= bits[b * n + i];
        }
        out[b] = p & 1U;
    }
    return out;
}

BitVec keep_mask(std::span<const std::uint8_t> pa, std::span<const std::uint8_t> pb,
                 std::optional<std::span<const std::uint8_t>> pc) {
    require(pa.size() == pb.size() && (!pc || pc->size() == pa.size()),
            ErrorCode::InvalidArgument, "parity vectors differ in length");
    BitVec mask(pa.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
        const std::uint8_t rhs = pc ? (*pc)[i] : 0;
        mask[i] = ((pa[i] ^ pb[i]) == rhs) ? 1 : 0;
    }
    return mask;
}

BitVec retain_kept(std::span<const std::uint8_t> bits, std::size_t n,
                   std::span<const std::uint8_t> mask) {
    check_block_length(n);
    require(mask.size() == bits.size() / n, ErrorCode::InvalidArgument,
            "keep mask does not match the block count");
    BitVec out;
    out.reserve(mask.size() * (n - 1));
    for (std::size_t b = 0; b < mask.size(); ++b) {
        if (mask[b] != 0) {
            out.insert(out.end(), bits.begin() + static_cast<std::ptrdiff_t>(b * n),
                       bits.begin() + static_cast<std::ptrdiff_t>(b * n + n - 1));
        }
    }
    return out;
}

PassOutcome parity_pass(std::span<const std::uint8_t> alice,
                        std::span<const std::uint8_t> bob,
                        std::optional<std::span<const std::uint8_t>> charlie,
                        std::size_t n) {
    check_block_length(n);
    require(alice.size() == bob.size() && (!charlie || charlie->size() == alice.size()),
            ErrorCode::InvalidArgument, "keys differ in length");
    PassOutcome out;
    out.block_length = n;
    out.input_length = alice.size();
    const auto pa = block_parities(alice, n);
    const auto pb = block_parities(bob, n);
    std::optional<BitVec> pc;
    if (charlie) {
        pc = block_parities(*charlie, n);
    }
    out.kept_mask = keep_mask(pa, pb, pc ? std::optional<std::span<const std::uint8_t>>(*pc)
                                         : std::nullopt);
    out.blocks = out.kept_mask.size();
    for (const auto k : out.kept_mask) {
        out.kept_blocks += k;
    }
    out.kept_block_fraction =
        out.blocks == 0 ? 0.0
                        : static_cast<double>(out.kept_blocks) / static_cast<double>(out.blocks);
    out.alice = retain_kept(alice, n, out.kept_mask);
    out.bob = retain_kept(bob, n, out.kept_mask);
    if (charlie) {
        out.charlie = retain_kept(*charlie, n, out.kept_mask);
    }
    out.output_length = out.alice.size();
    return out;
}

std::vector<PassOutcome> cascade(std::span<const std::uint8_t> alice,
                                 std::span<const std::uint8_t> bob,
                                 std::optional<std::span<const std::uint8_t>> charlie,
                                 std::span<const std::size_t> block_lengths) {
    require(!block_lengths.empty(), ErrorCode::InvalidArgument,
            "cascade needs at least one block length");
    std::vector<PassOutcome> passes;
    passes.reserve(block_lengths.size());
    for (const auto n : block_lengths) {
        if (passes.empty()) {
            passes.push_back(parity_pass(alice, bob, charlie, n));
        } else {
            const auto &prev = passes.back();
            std::optional<std::span<const std::uint8_t>> c;
            if (prev.charlie) {
                c = *prev.charlie;
            }
            passes.push_back(parity_pass(prev.alice, prev.bob, c, n));
        }
    }
    return passes;
}

ExchangedPass exchange_parity_pass(Endpoint &endpoint, SessionMode mode,
                                   std::span<const std::uint8_t> own_key,
                                   std::size_t key_length, std::size_t n,
                                   std::uint32_t pass_index, Millis timeout) {
    check_block_length(n);
    const Role self = endpoint.self();
    const bool holder = holds_key(mode, self);
    if (holder) {
        require(own_key.size() == key_length, ErrorCode::Internal,
                "local key length differs from the agreed length");
    }
    const std::size_t blocks = key_length / n;

    std::array<BitVec, 3> parities;
    if (holder) {
        parities[index_of(self)] = block_parities(own_key, n);
        endpoint.broadcast(ParityVector{pass_index, parities[index_of(self)]});
    }
    for (const auto r : kAllRoles) {
        if (r == self || !holds_key(mode, r)) {
            continue;
        }
        auto pv = expect_from<ParityVector>(endpoint, r, timeout);
        if (pv.pass != pass_index || pv.parities.size() != blocks) {
            fail(ErrorCode::ProtocolViolation,
                 "parity vector from " + std::string(role_name(r)) +
                     " does not match pass " + std::to_string(pass_index));
        }
        parities[index_of(r)] = std::move(pv.parities);
    }

    ExchangedPass out;
    out.blocks = blocks;
    std::optional<std::span<const std::uint8_t>> pc;
    if (three_party_key(mode)) {
        pc = parities[index_of(Role::Charlie)];
    }
    out.kept_mask = keep_mask(parities[index_of(Role::Alice)],
                              parities[index_of(Role::Bob)], pc);
    if (holder) {
        out.own_kept = retain_kept(own_key, n, out.kept_mask);
    }
    return out;
}

double kept_fraction_closed_form(double p, std::size_t n) {
    return (1.0 + std::pow(1.0 - 2.0 * p, static_cast<double>(n))) / 2.0;
}

ParityOracle oracle_parity(double p, std::size_t n,
                           std::optional<std::size_t> discard_position) {
    require(p >= 0.0 && p <= 0.5, ErrorCode::InvalidArgument,
            "error probability must lie in [0, 0.5]");
    require(n >= 2 && n <= kMaxOracleBlock, ErrorCode::InvalidArgument,
            "oracle block length must lie in [2, " + std::to_string(kMaxOracleBlock) + "]");
    const std::size_t discard = discard_position.value_or(n - 1);
    require(discard < n, ErrorCode::InvalidArgument, "discard position outside the block");

    // A pattern's probability depends only on its error count.
    std::vector<double> weight_by_errors(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        weight_by_errors[k] = std::pow(p, static_cast<double>(k)) *
                              std::pow(1.0 - p, static_cast<double>(n - k));
    }
    double kept = 0.0;
    double retained_errors = 0.0;
    const std::uint32_t patterns = 1U << n;
    for (std::uint32_t pattern = 0; pattern < patterns; ++pattern) {
        const auto k = static_cast<std::size_t>(std::popcount(pattern));
        if (k % 2 != 0) {
            continue;
        }
        const double w = weight_by_errors[k];
        kept += w;
        const std::size_t dropped = (pattern >> discard) & 1U;
        retained_errors += w * static_cast<double>(k - dropped);
    }
    const double residual =
        kept > 0.0 ? retained_errors / (static_cast<double>(n - 1) * kept) : 0.0;
    return {kept, residual};
}

} // namespace ghzqss
