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
 * Dense pure-state simulation of a handful of polarization qubits.
 *
 * Amplitude index is big-endian in qubit order: qubit 0 is the most
 * significant bit. |0> is H and |1> is V. In the three-party protocol qubit 0
 * belongs to Alice, 1 to Bob, 2 to Charlie and 3 (when present) to the
 * trigger detector.
 */

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "random.hpp"

namespace ghzqss {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 8;
inline constexpr double kNormTolerance = 1e-12;

/// x is the linear +-45 degree basis, y the circular basis, z the H/V basis.
enum class Basis : std::uint8_t { X = 0, Y = 1, Z = 2 };

enum class Outcome : std::uint8_t { Plus, Minus };

constexpr int eigenvalue(Outcome o) { return o == Outcome::Plus ? 1 : -1; }

/// Plus maps to 1, Minus to 0. Protocol encoding rules build on this.
constexpr std::uint8_t outcome_bit(Outcome o) { return o == Outcome::Plus ? 1 : 0; }

constexpr Outcome opposite(Outcome o) {
    return o == Outcome::Plus ? Outcome::Minus : Outcome::Plus;
}

char basis_letter(Basis b);

class StateVector {
  public:
    /// |0...0> on `num_qubits` qubits.
    explicit StateVector(std::size_t num_qubits);

    /// Takes ownership of `amplitudes`; validates size and normalization.
    StateVector(std::size_t num_qubits, std::vector<Complex> amplitudes);

    [[nodiscard]] std::size_t num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return amps_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const noexcept {
        return amps_;
    }
    [[nodiscard]] Complex operator[](std::size_t i) const { return amps_[i]; }

    [[nodiscard]] double norm_squared() const;

    /// Bit mask of qubit q inside an amplitude index.
    [[nodiscard]] std::size_t mask(std::size_t q) const {
        return std::size_t{1} << (num_qubits_ - 1 - q);
    }

  private:
    std::size_t num_qubits_;
    std::vector<Complex> amps_;
};

/// Eigenvector pair of a basis: `plus` has eigenvalue +1.
struct BasisPair {
    std::array<Complex, 2> plus;
    std::array<Complex, 2> minus;

    [[nodiscard]] const std::array<Complex, 2> &of(Outcome o) const {
        return o == Outcome::Plus ? plus : minus;
    }
};

struct OutcomeProbabilities {
    double plus;
    double minus;
};

struct Projection {
    double probability;
    StateVector state;
};

struct Measurement {
    Outcome outcome;
    StateVector state;
};

/// (|0...0> + |1...1>)/sqrt(2). Requires 2 <= n <= 8.
StateVector make_ghz(std::size_t n);

BasisPair basis_vectors(Basis b);

/// Eigenstates of `b` as one-qubit state vectors.
std::pair<StateVector, StateVector> basis_states(Basis b);

OutcomeProbabilities outcome_probabilities(const StateVector &s, std::size_t q,
                                           Basis b);

/// Born probability of `o` and the renormalized post-projection state. The
/// measured qubit stays in the register, left in the eigenstate. Throws
/// ImpossibleOutcome when the probability is below 1e-12.
Projection project(const StateVector &s, std::size_t q, Basis b, Outcome o);

/// Samples one outcome from the Born distribution. Consumes exactly one
/// uniform draw.
Measurement measure(const StateVector &s, std::size_t q, Basis b, Rng &rng);

/// Measures every qubit in order 0..n-1 with the given bases.
std::vector<Outcome> measure_all(const StateVector &s, std::span<const Basis> bases,
                                 Rng &rng);

/// Exact expectation of the product of the +-1 outcomes.
double expectation(const StateVector &s, std::span<const Basis> bases);

/// Removes qubit q, which must be in the eigenstate (b, o) already (as after
/// project). Throws InvalidArgument if it is entangled with the rest.
StateVector remove_qubit(const StateVector &s, std::size_t q, Basis b, Outcome o);

/// |<a|b>|^2, the global-phase-invariant comparison.
double fidelity(const StateVector &a, const StateVector &b);

} // namespace ghzqss
