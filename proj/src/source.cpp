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

#include "source.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "error.hpp"

namespace ghzqss {

namespace {

template <class... Ts> struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

double parse_param(std::string_view text, std::string_view what) {
    double v = 0.0;
    const auto *first = text.data();
    const auto *last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || text.empty()) {
        fail(ErrorCode::Config,
             "invalid " + std::string(what) + " parameter '" + std::string(text) + "'");
    }
    return v;
}

} // namespace

void validate(const NoiseModel &model) {
    std::visit(overloaded{
                   [](const IdealNoise &) {},
                   [](const WernerVisibility &w) {
                       require(w.visibility >= 0.0 && w.visibility <= 1.0,
                               ErrorCode::InvalidArgument,
                               "visibility must lie in [0, 1]");
                   },
                   [](const TripletFlip &f) {
                       require(f.flip_probability >= 0.0 && f.flip_probability <= 0.5,
                               ErrorCode::InvalidArgument,
                               "flip probability must lie in [0, 0.5]");
                   },
               },
               model);
}

NoiseModel parse_noise(std::string_view text) {
    NoiseModel model;
    if (text == "ideal") {
        model = IdealNoise{};
    } else if (text.starts_with("werner:")) {
        model = WernerVisibility{parse_param(text.substr(7), "werner")};
    } else if (text.starts_with("flip:")) {
        model = TripletFlip{parse_param(text.substr(5), "flip")};
    } else {
        fail(ErrorCode::Config, "unknown noise model '" + std::string(text) +
                                    "' (expected ideal, werner:<v> or flip:<p>)");
    }
    try {
        validate(model);
    } catch (const Error &e) {
        fail(ErrorCode::Config, e.what());
    }
    return model;
}

std::string format_noise(const NoiseModel &model) {
    auto shortest = [](double v) {
        std::array<char, 32> buf{};
        const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
        return std::string(buf.data(), res.ptr);
    };
    return std::visit(overloaded{
                          [](const IdealNoise &) { return std::string("ideal"); },
                          [&](const WernerVisibility &w) {
                              return "werner:" + shortest(w.visibility);
                          },
                          [&](const TripletFlip &f) {
                              return "flip:" + shortest(f.flip_probability);
                          },
                      },
                      model);
}

EmittedTriplet emit(const NoiseModel &model, Rng &rng) {
    if (const auto *w = std::get_if<WernerVisibility>(&model)) {
        if (!rng.bernoulli(w->visibility)) {
            return EmittedTriplet::maximally_mixed();
        }
    }
    return EmittedTriplet::pure(make_ghz(3));
}

Outcome flip_outcome(const NoiseModel &model, Outcome charlie_outcome, Rng &rng) {
    if (const auto *f = std::get_if<TripletFlip>(&model)) {
        if (rng.bernoulli(f->flip_probability)) {
            return opposite(charlie_outcome);
        }
    }
    return charlie_outcome;
}

TriggerResult four_photon_trigger(Rng &rng) {
    constexpr std::size_t kTrigger = 3;
    auto m = measure(make_ghz(4), kTrigger, Basis::X, rng);
    auto three = remove_qubit(m.state, kTrigger, Basis::X, m.outcome);
    return {m.outcome == Outcome::Plus, m.outcome, std::move(three)};
}

double qber_of_model(const NoiseModel &model) {
    return std::visit(overloaded{
                          [](const IdealNoise &) { return 0.0; },
                          [](const WernerVisibility &w) { return (1.0 - w.visibility) / 2.0; },
                          [](const TripletFlip &f) { return f.flip_probability; },
                      },
                      model);
}

} // namespace ghzqss
