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

#include <array>
#include <bit>
#include <cmath>

#include "error.hpp"
#include "oracles.hpp"
#include "qsim.hpp"
#include "random.hpp"

using namespace ghzqss;

namespace {

std::vector<oracle::C> amps_of(const StateVector &s) {
    return {s.amplitudes().begin(), s.amplitudes().end()};
}

std::vector<int> ints(std::span<const Basis> bases) {
    std::vector<int> out;
    for (const auto b : bases) {
        out.push_back(static_cast<int>(b));
    }
    return out;
}

StateVector random_state(std::size_t n, Rng &rng) {
    std::vector<Complex> v(std::size_t{1} << n);
    double norm = 0;
    for (auto &a : v) {
        a = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
        norm += std::norm(a);
    }
    for (auto &a : v) {
        a /= std::sqrt(norm);
    }
    return {n, std::move(v)};
}

} // namespace

TEST_CASE("GHZ state has two equal amplitudes") {
    for (std::size_t n = 2; n <= 8; ++n) {
        const auto g = make_ghz(n);
        REQUIRE(g.num_qubits() == n);
        CHECK(std::abs(g[0] - Complex(std::sqrt(0.5), 0)) < 1e-15);
        CHECK(std::abs(g[g.dimension() - 1] - Complex(std::sqrt(0.5), 0)) < 1e-15);
        CHECK(g.norm_squared() == Catch::Approx(1.0).epsilon(1e-14));
    }
    CHECK_THROWS_AS(make_ghz(1), Error);
    CHECK_THROWS_AS(make_ghz(9), Error);
}

TEST_CASE("state vectors reject bad sizes and norms") {
    CHECK_THROWS_AS(StateVector(2, std::vector<Complex>(3, Complex(0.5, 0))), Error);
    CHECK_THROWS_AS(StateVector(1, std::vector<Complex>{Complex(1, 0), Complex(1, 0)}), Error);
}

TEST_CASE("three-photon correlation table matches the Born-rule oracle") {
    const auto g = make_ghz(3);
    for (unsigned row = 0; row < 8; ++row) {
        const std::array<Basis, 3> bases{(row & 4U) != 0 ? Basis::Y : Basis::X,
                                         (row & 2U) != 0 ? Basis::Y : Basis::X,
                                         (row & 1U) != 0 ? Basis::Y : Basis::X};
        const int ys = static_cast<int>(std::popcount(row));
        const double expected = ys == 0 ? 1.0 : (ys == 2 ? -1.0 : 0.0);
        const double got = expectation(g, bases);
        CHECK(std::abs(got - expected) < 1e-12);
        CHECK(std::abs(got - oracle::expectation(amps_of(g), ints(bases))) < 1e-12);
    }
}

TEST_CASE("any two photons of the triplet are uncorrelated") {
    // each joint outcome of two X/Y measurements has probability 1/4
    const auto g = make_ghz(3);
    for (int ba = 0; ba < 2; ++ba) {
        for (int bb = 0; bb < 2; ++bb) {
            for (int oa = 0; oa < 2; ++oa) {
                const auto pa = project(g, 0, static_cast<Basis>(ba),
                                        oa != 0 ? Outcome::Minus : Outcome::Plus);
                const auto pb = outcome_probabilities(pa.state, 1, static_cast<Basis>(bb));
                CHECK(std::abs(pa.probability * pb.plus - 0.25) < 1e-12);
                CHECK(std::abs(pa.probability * pb.minus - 0.25) < 1e-12);
            }
        }
    }
}

TEST_CASE("expectation agrees with the oracle on random states", "[property]") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(4);
        const auto s = random_state(n, rng);
        std::vector<Basis> bases(n);
        for (auto &b : bases) {
            b = static_cast<Basis>(rng.below(3));
        }
        CHECK(std::abs(expectation(s, bases) - oracle::expectation(amps_of(s), ints(bases))) <
              1e-12);
    }
}

TEST_CASE("projection probabilities follow the Born rule", "[property]") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(4);
        const auto s = random_state(n, rng);
        const std::size_t q = rng.below(n);
        const auto b = static_cast<Basis>(rng.below(3));
        const auto p = outcome_probabilities(s, q, b);
        CHECK(std::abs(p.plus + p.minus - 1.0) < 1e-12);

        // single-qubit marginal from the joint oracle
        std::vector<int> bases(n, 2);
        bases[q] = static_cast<int>(b);
        const auto joint = oracle::joint_probabilities(amps_of(s), bases);
        double minus = 0;
        for (unsigned o = 0; o < joint.size(); ++o) {
            if (((o >> (n - 1 - q)) & 1U) != 0) {
                minus += joint[o];
            }
        }
        CHECK(std::abs(p.minus - minus) < 1e-12);

        const auto pr = project(s, q, b, Outcome::Minus);
        CHECK(std::abs(pr.probability - p.minus) < 1e-12);
        CHECK(std::abs(pr.state.norm_squared() - 1.0) < 1e-12);
        // the collapsed qubit is now certain
        CHECK(std::abs(outcome_probabilities(pr.state, q, b).minus - 1.0) < 1e-12);
    }
}

TEST_CASE("projecting onto an orthogonal outcome is impossible") {
    const auto [h, v] = basis_states(Basis::Z);
    CHECK_THROWS_MATCHES(project(h, 0, Basis::Z, Outcome::Minus), Error,
                         Catch::Matchers::Predicate<const Error &>([](const Error &e) {
                             return e.code() == ErrorCode::ImpossibleOutcome;
                         }));
    CHECK(project(v, 0, Basis::Z, Outcome::Minus).probability == Catch::Approx(1.0));
}

TEST_CASE("basis states are eigenstates with the right eigenvalue") {
    for (const auto b : {Basis::X, Basis::Y, Basis::Z}) {
        const auto [plus, minus] = basis_states(b);
        const std::array<Basis, 1> obs{b};
        CHECK(std::abs(expectation(plus, obs) - 1.0) < 1e-12);
        CHECK(std::abs(expectation(minus, obs) + 1.0) < 1e-12);
        CHECK(fidelity(plus, minus) < 1e-12);
    }
}

TEST_CASE("X outcomes on a GHZ photon are fair coins") {
    Rng rng(17);
    const auto g = make_ghz(3);
    const int trials = 20000;
    int plus = 0;
    for (int i = 0; i < trials; ++i) {
        if (measure(g, 0, Basis::X, rng).outcome == Outcome::Plus) {
            ++plus;
        }
    }
    const double f = static_cast<double>(plus) / trials;
    CHECK(std::abs(f - 0.5) < 4 * oracle::binomial_sigma(0.5, trials));
}

TEST_CASE("sampled XXX outcomes always multiply to +1", "[property]") {
    Rng rng(3);
    const auto g = make_ghz(3);
    const std::array<Basis, 3> xxx{Basis::X, Basis::X, Basis::X};
    const std::array<Basis, 3> xyy{Basis::X, Basis::Y, Basis::Y};
    for (int i = 0; i < 2000; ++i) {
        const auto a = measure_all(g, xxx, rng);
        CHECK(eigenvalue(a[0]) * eigenvalue(a[1]) * eigenvalue(a[2]) == 1);
        const auto b = measure_all(g, xyy, rng);
        CHECK(eigenvalue(b[0]) * eigenvalue(b[1]) * eigenvalue(b[2]) == -1);
    }
}

TEST_CASE("removing a measured qubit of GHZ4 leaves GHZ3") {
    const auto g4 = make_ghz(4);
    const auto p = project(g4, 3, Basis::X, Outcome::Plus);
    CHECK(p.probability == Catch::Approx(0.5).epsilon(1e-12));
    const auto three = remove_qubit(p.state, 3, Basis::X, Outcome::Plus);
    CHECK(std::abs(fidelity(three, make_ghz(3)) - 1.0) < 1e-12);
    CHECK_THROWS_AS(remove_qubit(g4, 3, Basis::X, Outcome::Plus), Error);
}

TEST_CASE("fidelity is symmetric and one on identical states", "[property]") {
    Rng rng(8);
    for (int i = 0; i < 50; ++i) {
        const auto a = random_state(3, rng);
        const auto b = random_state(3, rng);
        CHECK(std::abs(fidelity(a, a) - 1.0) < 1e-12);
        CHECK(std::abs(fidelity(a, b) - fidelity(b, a)) < 1e-12);
        CHECK(fidelity(a, b) <= 1.0 + 1e-12);
    }
}
