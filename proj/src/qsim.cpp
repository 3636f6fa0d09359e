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

#include "qsim.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "error.hpp"

namespace ghzqss {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
constexpr Complex kI{0.0, 1.0};

void check_qubit(const StateVector &s, std::size_t q) {
    require(q < s.num_qubits(), ErrorCode::InvalidArgument,
            "qubit index " + std::to_string(q) + " out of range for " +
                std::to_string(s.num_qubits()) + "-qubit state");
}

void check_bases(const StateVector &s, std::span<const Basis> bases) {
    require(bases.size() == s.num_qubits(), ErrorCode::InvalidArgument,
            "expected " + std::to_string(s.num_qubits()) + " bases, got " +
                std::to_string(bases.size()));
}

// <e|(a0, a1)>
Complex overlap(const std::array<Complex, 2> &e, Complex a0, Complex a1) {
    return std::conj(e[0]) * a0 + std::conj(e[1]) * a1;
}

// Applies the +-1 observable of basis b to qubit q in place.
void apply_observable(std::vector<Complex> &amps, std::size_t mask, Basis b) {
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if ((i & mask) != 0) {
            continue;
        }
        const Complex a0 = amps[i];
        const Complex a1 = amps[i | mask];
        switch (b) {
        case Basis::X:
            amps[i] = a1;
            amps[i | mask] = a0;
            break;
        case Basis::Y:
            amps[i] = -kI * a1;
            amps[i | mask] = kI * a0;
            break;
        case Basis::Z:
            amps[i | mask] = -a1;
            break;
        }
    }
}

} // namespace

char basis_letter(Basis b) {
    switch (b) {
    case Basis::X:
        return 'X';
    case Basis::Y:
        return 'Y';
    case Basis::Z:
        return 'Z';
    }
    return '?';
}

StateVector::StateVector(std::size_t num_qubits)
    : num_qubits_(num_qubits) {
    require(num_qubits >= 1 && num_qubits <= kMaxQubits, ErrorCode::InvalidArgument,
            "state vectors support 1.." + std::to_string(kMaxQubits) + " qubits");
    amps_.assign(std::size_t{1} << num_qubits, Complex{});
    amps_[0] = 1.0;
}

StateVector::StateVector(std::size_t num_qubits, std::vector<Complex> amplitudes)
    : num_qubits_(num_qubits), amps_(std::move(amplitudes)) {
    require(num_qubits >= 1 && num_qubits <= kMaxQubits, ErrorCode::InvalidArgument,
            "state vectors support 1.." + std::to_string(kMaxQubits) + " qubits");
    require(amps_.size() == (std::size_t{1} << num_qubits), ErrorCode::InvalidArgument,
            "amplitude count does not match 2^num_qubits");
    require(std::abs(norm_squared() - 1.0) < kNormTolerance,
            ErrorCode::InvalidArgument, "state vector is not normalized");
}

double StateVector::norm_squared() const {
    double n = 0.0;
    for (const auto &a : amps_) {
        n += std::norm(a);
    }
    return n;
}

StateVector make_ghz(std::size_t n) {
    require(n >= 2 && n <= kMaxQubits, ErrorCode::InvalidArgument,
            "GHZ states need 2.." + std::to_string(kMaxQubits) + " qubits, got " +
                std::to_string(n));
    std::vector<Complex> amps(std::size_t{1} << n);
    amps.front() = kInvSqrt2;
    amps.back() = kInvSqrt2;
    return {n, std::move(amps)};
}

BasisPair basis_vectors(Basis b) {
    switch (b) {
    case Basis::X:
        return {{kInvSqrt2, kInvSqrt2}, {kInvSqrt2, -kInvSqrt2}};
    case Basis::Y:
        return {{kInvSqrt2, kI * kInvSqrt2}, {kInvSqrt2, -kI * kInvSqrt2}};
    case Basis::Z:
        return {{1.0, 0.0}, {0.0, 1.0}};
    }
    fail(ErrorCode::InvalidArgument, "unknown basis");
}

std::pair<StateVector, StateVector> basis_states(Basis b) {
    const auto v = basis_vectors(b);
    return {StateVector(1, {v.plus[0], v.plus[1]}),
            StateVector(1, {v.minus[0], v.minus[1]})};
}

OutcomeProbabilities outcome_probabilities(const StateVector &s, std::size_t q,
                                           Basis b) {
    check_qubit(s, q);
    const auto v = basis_vectors(b);
    const std::size_t m = s.mask(q);
    double p_plus = 0.0;
    double p_minus = 0.0;
    for (std::size_t i = 0; i < s.dimension(); ++i) {
        if ((i & m) != 0) {
            continue;
        }
        p_plus += std::norm(overlap(v.plus, s[i], s[i | m]));
        p_minus += std::norm(overlap(v.minus, s[i], s[i | m]));
    }
    return {p_plus, p_minus};
}

Projection project(const StateVector &s, std::size_t q, Basis b, Outcome o) {
    check_qubit(s, q);
    const auto e = basis_vectors(b).of(o);
    const std::size_t m = s.mask(q);
    std::vector<Complex> out(s.dimension());
    double p = 0.0;
    for (std::size_t i = 0; i < s.dimension(); ++i) {
        if ((i & m) != 0) {
            continue;
        }
        const Complex c = overlap(e, s[i], s[i | m]);
        p += std::norm(c);
        out[i] = e[0] * c;
        out[i | m] = e[1] * c;
    }
    if (p < kNormTolerance) {
        fail(ErrorCode::ImpossibleOutcome,
             std::string("outcome ") + (o == Outcome::Plus ? '+' : '-') +
                 " in basis " + basis_letter(b) + " on qubit " + std::to_string(q) +
                 " has zero probability");
    }
    const double scale = 1.0 / std::sqrt(p);
    for (auto &a : out) {
        a *= scale;
    }
    return {p, StateVector(s.num_qubits(), std::move(out))};
}

Measurement measure(const StateVector &s, std::size_t q, Basis b, Rng &rng) {
    const auto probs = outcome_probabilities(s, q, b);
    const double u = rng.uniform();
    const Outcome o = u * (probs.plus + probs.minus) < probs.plus ? Outcome::Plus
                                                                  : Outcome::Minus;
    return {o, project(s, q, b, o).state};
}

std::vector<Outcome> measure_all(const StateVector &s, std::span<const Basis> bases,
                                 Rng &rng) {
    check_bases(s, bases);
    std::vector<Outcome> out;
    out.reserve(bases.size());
    StateVector cur = s;
    for (std::size_t q = 0; q < bases.size(); ++q) {
        auto m = measure(cur, q, bases[q], rng);
        out.push_back(m.outcome);
        cur = std::move(m.state);
    }
    return out;
}

double expectation(const StateVector &s, std::span<const Basis> bases) {
    check_bases(s, bases);
    std::vector<Complex> applied(s.amplitudes().begin(), s.amplitudes().end());
    for (std::size_t q = 0; q < bases.size(); ++q) {
        apply_observable(applied, s.mask(q), bases[q]);
    }
    Complex acc{};
    for (std::size_t i = 0; i < applied.size(); ++i) {
        acc += std::conj(s[i]) * applied[i];
    }
    return acc.real();
}

StateVector remove_qubit(const StateVector &s, std::size_t q, Basis b, Outcome o) {
    check_qubit(s, q);
    require(s.num_qubits() >= 2, ErrorCode::InvalidArgument,
            "cannot remove the only qubit of a state");
    const auto e = basis_vectors(b).of(o);
    const std::size_t n = s.num_qubits();
    const std::size_t low_bits = n - 1 - q;
    const std::size_t low_mask = (std::size_t{1} << low_bits) - 1;
    std::vector<Complex> out(s.dimension() / 2);
    for (std::size_t j = 0; j < out.size(); ++j) {
        const std::size_t i0 = ((j & ~low_mask) << 1) | (j & low_mask);
        out[j] = overlap(e, s[i0], s[i0 | s.mask(q)]);
    }
    double norm = 0.0;
    for (const auto &a : out) {
        norm += std::norm(a);
    }
    require(std::abs(norm - 1.0) < 1e-9, ErrorCode::InvalidArgument,
            "qubit " + std::to_string(q) + " is not in the requested eigenstate");
    const double scale = 1.0 / std::sqrt(norm);
    for (auto &a : out) {
        a *= scale;
    }
    return {n - 1, std::move(out)};
}

double fidelity(const StateVector &a, const StateVector &b) {
    require(a.num_qubits() == b.num_qubits(), ErrorCode::InvalidArgument,
            "fidelity of states with different qubit counts");
    Complex acc{};
    for (std::size_t i = 0; i < a.dimension(); ++i) {
        acc += std::conj(a[i]) * b[i];
    }
    return std::norm(acc);
}

} // namespace ghzqss
