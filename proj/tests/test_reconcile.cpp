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

#include <cmath>
#include <thread>

#include "error.hpp"
#include "oracles.hpp"
#include "random.hpp"
#include "reconcile.hpp"

using namespace ghzqss;

namespace {

struct Keys {
    BitVec a;
    BitVec b;
    BitVec c;
};

// alice ^ bob == charlie except at i.i.d. error positions
Keys noisy_keys(std::size_t len, double p, Rng &rng) {
    Keys k;
    k.a.resize(len);
    k.b.resize(len);
    k.c.resize(len);
    for (std::size_t i = 0; i < len; ++i) {
        k.a[i] = rng.coin() ? 1 : 0;
        k.b[i] = rng.coin() ? 1 : 0;
        k.c[i] = static_cast<std::uint8_t>(k.a[i] ^ k.b[i] ^ (rng.bernoulli(p) ? 1 : 0));
    }
    return k;
}

double triple_error_rate(const BitVec &a, const BitVec &b, const BitVec &c) {
    std::size_t err = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        err += (a[i] ^ b[i]) != c[i] ? 1 : 0;
    }
    return a.empty() ? 0.0 : static_cast<double>(err) / static_cast<double>(a.size());
}

} // namespace

TEST_CASE("worked three-party example") {
    const BitVec a{1, 0, 1, 0};
    const BitVec b{0, 1, 1, 0};
    const BitVec c{1, 1, 0, 0};
    const auto out = parity_pass(a, b, std::optional<std::span<const std::uint8_t>>(c), 2);
    CHECK(out.blocks == 2);
    CHECK(out.kept_blocks == 2);
    CHECK(out.output_length == 2);
    CHECK(out.alice == BitVec{1, 1});
    CHECK(out.bob == BitVec{0, 1});
    CHECK(out.charlie == BitVec{1, 0});
}

TEST_CASE("two-party rule keeps blocks with equal parity") {
    const BitVec a{1, 1, 0, 0, 1};
    const BitVec b{1, 0, 0, 0, 0};
    const auto out = parity_pass(a, b, std::nullopt, 2);
    CHECK(out.blocks == 2); // the fifth bit is a dropped remainder
    CHECK(out.kept_mask == BitVec{0, 1});
    CHECK(out.alice == BitVec{0});
    CHECK(out.bob == BitVec{0});
    CHECK_FALSE(out.charlie.has_value());
}

TEST_CASE("parity pass argument checks") {
    const BitVec a{1, 0, 1};
    CHECK_THROWS_AS(parity_pass(a, BitVec{1, 0}, std::nullopt, 2), Error);
    CHECK_THROWS_AS(parity_pass(a, a, std::nullopt, 1), Error);
    const auto tiny = parity_pass(a, a, std::nullopt, 4);
    CHECK(tiny.blocks == 0);
    CHECK(tiny.output_length == 0);
    CHECK(tiny.kept_block_fraction == 0.0);
}

TEST_CASE("oracle agrees with the closed forms", "[property]") {
    for (int i = 0; i <= 50; ++i) {
        const double p = i / 100.0;
        for (std::size_t n = 2; n <= 12; ++n) {
            const auto got = oracle_parity(p, n);
            const auto ref = oracle::parity_pass(p, n);
            CHECK(std::abs(got.kept_fraction - ref.kept_fraction) < 1e-12);
            CHECK(std::abs(got.residual_qber - ref.residual_qber) < 1e-12);
            CHECK(std::abs(kept_fraction_closed_form(p, n) - ref.kept_fraction) < 1e-12);
        }
    }
}

TEST_CASE("residual error does not depend on which bit is discarded", "[property]") {
    for (const double p : {0.02, 0.129, 0.3}) {
        for (std::size_t n = 2; n <= 8; ++n) {
            const auto last = oracle_parity(p, n);
            for (std::size_t pos = 0; pos < n; ++pos) {
                CHECK(std::abs(oracle_parity(p, n, pos).residual_qber - last.residual_qber) <
                      1e-12);
            }
        }
    }
}

TEST_CASE("a pass never increases the error rate below one half", "[property]") {
    for (std::size_t n = 2; n <= 10; ++n) {
        double prev = -1;
        for (int i = 0; i <= 50; ++i) {
            const double p = i / 100.0;
            const auto o = oracle_parity(p, n);
            CHECK(o.residual_qber <= p + 1e-12);
            CHECK(o.residual_qber >= prev - 1e-12);
            CHECK(o.kept_fraction >= 0.5 - 1e-12);
            CHECK(o.kept_fraction <= 1.0 + 1e-12);
            prev = o.residual_qber;
        }
    }
}

TEST_CASE("error rate one half is a fixed point") {
    for (std::size_t n = 2; n <= 12; ++n) {
        const auto o = oracle_parity(0.5, n);
        CHECK(std::abs(o.kept_fraction - 0.5) < 1e-12);
        CHECK(std::abs(o.residual_qber - 0.5) < 1e-12);
    }
}

TEST_CASE("two-pass predictions for a 12.9% input") {
    const auto first = oracle_parity(0.129, 2);
    CHECK(first.kept_fraction == Catch::Approx(0.775282).margin(1e-6));
    CHECK(first.residual_qber == Catch::Approx(0.021464).margin(1e-6));
    const auto second = oracle_parity(first.residual_qber, 8);
    CHECK(second.kept_fraction == Catch::Approx(0.852).margin(5e-4));
    CHECK(second.residual_qber == Catch::Approx(0.00333).margin(1e-5));
}

TEST_CASE("oracle rejects out-of-range input") {
    CHECK_THROWS_AS(oracle_parity(-0.1, 2), Error);
    CHECK_THROWS_AS(oracle_parity(0.6, 2), Error);
    CHECK_THROWS_AS(oracle_parity(0.1, 1), Error);
    CHECK_THROWS_AS(oracle_parity(0.1, kMaxOracleBlock + 1), Error);
    CHECK_THROWS_AS(oracle_parity(0.1, 4, 4), Error);
}

TEST_CASE("simulated passes match the oracle", "[property]") {
    Rng rng(77);
    for (const double p : {0.05, 0.2}) {
        for (const std::size_t n : {2U, 5U}) {
            const std::size_t blocks = 40000;
            const auto k = noisy_keys(blocks * n, p, rng);
            const auto out =
                parity_pass(k.a, k.b, std::optional<std::span<const std::uint8_t>>(k.c), n);
            const auto ref = oracle::parity_pass(p, n);
            const double residual = triple_error_rate(out.alice, out.bob, *out.charlie);
            CHECK(std::abs(out.kept_block_fraction - ref.kept_fraction) <
                  4 * oracle::binomial_sigma(ref.kept_fraction, blocks));
            CHECK(std::abs(residual - ref.residual_qber) <
                  4 * oracle::residual_sigma(p, n, blocks));
            CHECK(out.output_length == out.kept_blocks * (n - 1));
        }
    }
}

TEST_CASE("cascade chains passes on the previous output") {
    Rng rng(4);
    const auto k = noisy_keys(10000, 0.1, rng);
    const std::optional<std::span<const std::uint8_t>> c(k.c);
    const std::array<std::size_t, 2> lengths{2, 8};
    const auto passes = cascade(k.a, k.b, c, lengths);
    REQUIRE(passes.size() == 2);
    const auto first = parity_pass(k.a, k.b, c, 2);
    const auto second = parity_pass(first.alice, first.bob,
                                     std::optional<std::span<const std::uint8_t>>(*first.charlie), 8);
    CHECK(passes[0].kept_mask == first.kept_mask);
    CHECK(passes[1].alice == second.alice);
    CHECK(passes[1].charlie == second.charlie);
}

TEST_CASE("exchanged pass reproduces the local pass for every party") {
    Rng rng(9);
    const auto k = noisy_keys(999, 0.15, rng);
    const auto local =
        parity_pass(k.a, k.b, std::optional<std::span<const std::uint8_t>>(k.c), 3);

    for (const auto mode : {SessionMode::Qss, SessionMode::TqcAllow}) {
        InProcNetwork net;
        std::array<ExchangedPass, 3> got;
        const std::array<const BitVec *, 3> keys{&k.a, &k.b, &k.c};
        std::vector<std::thread> threads;
        for (const auto r : kAllRoles) {
            threads.emplace_back([&, r] {
                got[index_of(r)] = exchange_parity_pass(net.endpoint(r), mode, *keys[index_of(r)],
                                                        k.a.size(), 3, 0, Millis(5000));
            });
        }
        for (auto &t : threads) {
            t.join();
        }
        const auto expected_mask =
            mode == SessionMode::Qss ? local.kept_mask
                                     : parity_pass(k.a, k.b, std::nullopt, 3).kept_mask;
        for (const auto r : kAllRoles) {
            CHECK(got[index_of(r)].kept_mask == expected_mask);
            CHECK(got[index_of(r)].blocks == local.blocks);
        }
        if (mode == SessionMode::Qss) {
            CHECK(got[0].own_kept == local.alice);
            CHECK(got[1].own_kept == local.bob);
            CHECK(got[2].own_kept == *local.charlie);
        } else {
            CHECK(got[0].own_kept == retain_kept(k.a, 3, expected_mask));
            CHECK(got[2].own_kept.empty());
        }
    }
}
