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

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "qsim.hpp"
#include "random.hpp"

namespace ghzqss {

struct IdealNoise {};

/// With probability `visibility` the source emits the GHZ triplet, otherwise
/// a maximally mixed one.
struct WernerVisibility {
    double visibility;
};

/// Always emits the GHZ triplet; Charlie's outcome is flipped with
/// probability `flip_probability` at measurement time.
struct TripletFlip {
    double flip_probability;
};

using NoiseModel = std::variant<IdealNoise, WernerVisibility, TripletFlip>;

/// Validates parameter ranges. Throws InvalidArgument.
void validate(const NoiseModel &model);

/// `ideal`, `werner:<v>` or `flip:<p>`. Throws Config on bad input.
NoiseModel parse_noise(std::string_view text);
std::string format_noise(const NoiseModel &model);

/// Either a pure three-qubit state or the maximally mixed state, which has
/// no amplitudes and yields independent uniform outcomes in every basis.
class EmittedTriplet {
  public:
    static EmittedTriplet pure(StateVector s) { return EmittedTriplet(std::move(s)); }
    static EmittedTriplet maximally_mixed() { return EmittedTriplet(std::nullopt); }

    [[nodiscard]] bool is_pure() const noexcept { return state_.has_value(); }
    [[nodiscard]] const StateVector &state() const { return *state_; }
    StateVector &state() { return *state_; }

  private:
    explicit EmittedTriplet(std::optional<StateVector> s) : state_(std::move(s)) {}

    std::optional<StateVector> state_;
};

/// Draws one uniform under WernerVisibility and nothing otherwise.
EmittedTriplet emit(const NoiseModel &model, Rng &rng);

/// Applies the TripletFlip channel to Charlie's outcome; identity (and no
/// draw) for the other models.
Outcome flip_outcome(const NoiseModel &model, Outcome charlie_outcome, Rng &rng);

struct TriggerResult {
    bool accepted;
    Outcome trigger_outcome;
    StateVector state; ///< remaining three qubits
};

/// Prepares the four-photon GHZ state and measures the trigger photon
/// (qubit 3) in the x basis; x+ heralds the three-photon GHZ state.
TriggerResult four_photon_trigger(Rng &rng);

/// Predicted error rate of the Alice xor Bob = Charlie relation on sifted
/// rounds.
double qber_of_model(const NoiseModel &model);

} // namespace ghzqss
