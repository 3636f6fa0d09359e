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

#include "protocol.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <sstream>
#include <thread>

#include "error.hpp"

namespace ghzqss {

namespace {

// Sub-stream identifiers for derive_seed.
constexpr std::uint64_t kWorldStream = 1;
constexpr std::uint64_t kSampleStream = 2;
constexpr std::uint64_t kGuessStream = 3;
constexpr std::uint64_t kSessionIdStream = 4;

bool is_hex_id(const std::string &s) {
    return s.size() == 32 && std::all_of(s.begin(), s.end(), [](char c) {
               return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
           });
}

std::string digest_text(const SessionConfig &c, bool with_session_id) {
    std::ostringstream os;
    os.precision(17);
    os << "mode=" << mode_name(c.mode) << ";rounds=" << c.num_rounds
       << ";noise=" << format_noise(c.noise) << ";seed=" << c.seed
       << ";sample_fraction=" << c.sample_fraction << ";blocks=";
    for (std::size_t i = 0; i < c.block_lengths.size(); ++i) {
        os << (i ? "," : "") << c.block_lengths[i];
    }
    os << ";threshold=" << c.qber_threshold << ";eve=" << (c.eavesdropper ? 1 : 0);
    if (with_session_id) {
        os << ";session=" << c.session_id;
    }
    return os.str();
}

std::string hex64(std::uint64_t v) {
    std::array<std::uint8_t, 8> b{};
    for (std::size_t i = 0; i < 8; ++i) {
        b[i] = static_cast<std::uint8_t>(v >> (56 - 8 * i));
    }
    return to_hex(b);
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

BitVec gather(std::span<const std::uint8_t> bits, std::span<const std::uint64_t> idx) {
    BitVec out;
    out.reserve(idx.size());
    for (const auto i : idx) {
        require(i < bits.size(), ErrorCode::InvalidArgument, "sample index out of range");
        out.push_back(bits[i]);
    }
    return out;
}

BitVec drop_indices(std::span<const std::uint8_t> bits,
                    std::span<const std::uint64_t> sorted_idx) {
    BitVec out;
    out.reserve(bits.size() - sorted_idx.size());
    std::size_t next = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (next < sorted_idx.size() && sorted_idx[next] == i) {
            ++next;
            continue;
        }
        out.push_back(bits[i]);
    }
    return out;
}

double qber_of_bits(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                    std::optional<std::span<const std::uint8_t>> c) {
    if (a.empty()) {
        return 0.0;
    }
    std::size_t errors = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::uint8_t rhs = c ? (*c)[i] : 0;
        errors += ((a[i] ^ b[i]) != rhs) ? 1 : 0;
    }
    return static_cast<double>(errors) / static_cast<double>(a.size());
}

// Keys every party would hold, computed from the simulated world. Advanced
// in lockstep with the public decisions of the classical transcript.
class GroundTruth {
  public:
    GroundTruth(const SessionConfig &config, const World &world,
                std::span<const std::uint64_t> sifted)
        : mode_(config.mode) {
        auto &a = keys_[index_of(Role::Alice)];
        auto &b = keys_[index_of(Role::Bob)];
        auto &c = keys_[index_of(Role::Charlie)];
        a.reserve(sifted.size());
        b.reserve(sifted.size());
        BitVec guesses;
        if (mode_ == SessionMode::TqcDeny) {
            guesses = deny_guess_bits(config.seed, sifted.size());
        }
        std::size_t agree = 0;
        for (std::size_t k = 0; k < sifted.size(); ++k) {
            const auto r = sifted[k];
            const auto &ra = world.of(Role::Alice)[r];
            const auto &rb = world.of(Role::Bob)[r];
            const auto &rc = world.of(Role::Charlie)[r];
            if (mode_ == SessionMode::DistrustHv) {
                a.push_back(hv_bit(ra.outcome));
                b.push_back(hv_bit(rb.outcome));
                if (!world.eve.empty()) {
                    agree += hv_bit(world.eve[r].outcome) == a.back() ? 1 : 0;
                }
                continue;
            }
            const auto combo = world.combo(r);
            const auto ea = encode(Role::Alice, combo, ra.outcome);
            const auto eb = encode(Role::Bob, combo, rb.outcome);
            const auto ec = encode(Role::Charlie, combo, rc.outcome);
            if (!world.eve.empty()) {
                agree += encode(Role::Charlie, combo, world.eve[r].outcome) == ec ? 1 : 0;
            }
            b.push_back(eb);
            switch (mode_) {
            case SessionMode::Qss:
                a.push_back(ea);
                c.push_back(ec);
                break;
            case SessionMode::TqcAllow:
                a.push_back(ea ^ ec);
                break;
            case SessionMode::TqcDeny:
                a.push_back(ea ^ guesses[k]);
                break;
            case SessionMode::DistrustHv:
                break;
            }
        }
        if (!world.eve.empty() && !sifted.empty()) {
            eve_agreement_ = static_cast<double>(agree) / static_cast<double>(sifted.size());
        }
    }

    [[nodiscard]] double qber() const {
        std::optional<std::span<const std::uint8_t>> c;
        if (three_party_key(mode_)) {
            c = keys_[index_of(Role::Charlie)];
        }
        return qber_of_bits(keys_[index_of(Role::Alice)], keys_[index_of(Role::Bob)], c);
    }

    void drop_sample(std::span<const std::uint64_t> sorted_idx) {
        for (const auto r : kAllRoles) {
            if (holds_key(mode_, r)) {
                keys_[index_of(r)] = drop_indices(keys_[index_of(r)], sorted_idx);
            }
        }
    }

    void apply_pass(std::size_t n, std::span<const std::uint8_t> mask) {
        for (const auto r : kAllRoles) {
            if (holds_key(mode_, r)) {
                keys_[index_of(r)] = retain_kept(keys_[index_of(r)], n, mask);
            }
        }
    }

    void clear() {
        for (auto &k : keys_) {
            k.clear();
        }
    }

    [[nodiscard]] const BitVec &key(Role r) const { return keys_[index_of(r)]; }
    [[nodiscard]] std::optional<double> eve_agreement() const { return eve_agreement_; }

  private:
    SessionMode mode_;
    std::array<BitVec, 3> keys_;
    std::optional<double> eve_agreement_;
};

class Party {
  public:
    Party(const SessionConfig &config, const World &world, Endpoint &endpoint)
        : config_(config), world_(world), ep_(endpoint), self_(endpoint.self()),
          holder_(holds_key(config.mode, endpoint.self())) {}

    PartyResult run() {
        handshake();
        exchange_bases();
        sift_rounds();
        build_raw_key();
        qber_test();
        reconcile();
        say_goodbye();
        return finish();
    }

  private:
    enum class Phase { Handshake, Bases, Sifting, QberTest, Reconcile, Closing, Done };

    void handshake() {
        phase_ = Phase::Handshake;
        const auto digest = config_digest(config_);
        if (self_ == Role::Charlie) {
            ep_.broadcast(Control{config_.mode, digest});
            return;
        }
        const auto ctl = expect<Control>(Role::Charlie);
        if (ctl.mode != config_.mode || ctl.config_digest != digest) {
            fail(ErrorCode::Config, "session configuration differs from charlie's (digest " +
                                        ctl.config_digest + " vs " + digest + ")");
        }
    }

    void exchange_bases() {
        phase_ = Phase::Bases;
        const auto &own = world_.of(self_);
        std::vector<Basis> mine(own.size());
        std::transform(own.begin(), own.end(), mine.begin(),
                       [](const RoundRecord &r) { return r.basis; });
        bases_[index_of(self_)] = mine;
        ep_.broadcast(BasisAnnounce{std::move(mine)});
        for (const auto r : others()) {
            auto ann = expect<BasisAnnounce>(r);
            if (ann.bases.size() != config_.num_rounds) {
                fail(ErrorCode::ProtocolViolation,
                     std::string(role_name(r)) + " announced " +
                         std::to_string(ann.bases.size()) + " bases for " +
                         std::to_string(config_.num_rounds) + " rounds");
            }
            bases_[index_of(r)] = std::move(ann.bases);
        }
    }

    [[nodiscard]] BasisCombo combo(std::size_t r) const {
        return {bases_[0][r], bases_[1][r], bases_[2][r]};
    }

    void sift_rounds() {
        phase_ = Phase::Sifting;
        sifted_.reserve(config_.num_rounds / 2 + 16);
        for (std::uint64_t r = 0; r < config_.num_rounds; ++r) {
            if (config_.mode == SessionMode::DistrustHv) {
                const auto c = combo(r);
                if (c.alice != Basis::Z || c.bob != Basis::Z) {
                    fail(ErrorCode::ProtocolViolation,
                         "distrust mode requires H/V measurements from alice and bob");
                }
                sifted_.push_back(r);
            } else if (sift(combo(r))) {
                sifted_.push_back(r);
            }
        }
        truth_.emplace(config_, world_, sifted_);
    }

    void build_raw_key() {
        const auto &own = world_.of(self_);
        if (config_.mode == SessionMode::TqcAllow && self_ == Role::Charlie) {
            BitVec outcomes(own.size());
            for (std::size_t r = 0; r < own.size(); ++r) {
                outcomes[r] = outcome_bit(own[r].outcome);
            }
            ep_.broadcast(ResultAnnounce{ResultScope::Rounds, std::move(outcomes)});
        }
        BitVec charlie_outcomes;
        if (config_.mode == SessionMode::TqcAllow && self_ != Role::Charlie) {
            auto res = expect<ResultAnnounce>(Role::Charlie);
            if (res.scope != ResultScope::Rounds || res.bits.size() != config_.num_rounds) {
                fail(ErrorCode::ProtocolViolation, "malformed result announcement from charlie");
            }
            charlie_outcomes = std::move(res.bits);
        }
        if (!holder_) {
            return;
        }
        BitVec guesses;
        if (config_.mode == SessionMode::TqcDeny && self_ == Role::Alice) {
            guesses = deny_guess_bits(config_.seed, sifted_.size());
        }
        key_.reserve(sifted_.size());
        for (std::size_t k = 0; k < sifted_.size(); ++k) {
            const auto r = sifted_[k];
            const Outcome o = own[r].outcome;
            if (config_.mode == SessionMode::DistrustHv) {
                key_.push_back(hv_bit(o));
                continue;
            }
            std::uint8_t bit = encode(self_, combo(r), o);
            if (self_ == Role::Alice && config_.mode == SessionMode::TqcAllow) {
                const Outcome co = charlie_outcomes[r] ? Outcome::Plus : Outcome::Minus;
                bit ^= encode(Role::Charlie, combo(r), co);
            } else if (self_ == Role::Alice && config_.mode == SessionMode::TqcDeny) {
                bit ^= guesses[k];
            }
            key_.push_back(bit);
        }
        check_against_truth();
    }

    void qber_test() {
        phase_ = Phase::QberTest;
        const std::size_t k = sample_size(sifted_.size(), config_.sample_fraction);
        const std::uint64_t sample_seed = derive_seed(config_.seed, kSampleStream);
        if (self_ == Role::Charlie) {
            sample_ = choose_sample(sifted_.size(), k, sample_seed);
            ep_.broadcast(SampleIndices{sample_, sample_seed});
        } else {
            auto si = expect<SampleIndices>(Role::Charlie);
            if (si.indices != choose_sample(sifted_.size(), si.indices.size(), si.seed) ||
                si.indices.size() != k) {
                fail(ErrorCode::ProtocolViolation,
                     "sample indices do not match the announced seed");
            }
            sample_ = std::move(si.indices);
        }

        std::array<BitVec, 3> disclosed;
        if (holder_) {
            disclosed[index_of(self_)] = gather(key_, sample_);
            ep_.broadcast(ResultAnnounce{ResultScope::Sample, disclosed[index_of(self_)]});
        }
        for (const auto r : others()) {
            if (!holds_key(config_.mode, r)) {
                continue;
            }
            auto res = expect<ResultAnnounce>(r);
            if (res.scope != ResultScope::Sample || res.bits.size() != sample_.size()) {
                fail(ErrorCode::ProtocolViolation, "malformed sample disclosure from " +
                                                       std::string(role_name(r)));
            }
            disclosed[index_of(r)] = std::move(res.bits);
        }
        std::vector<std::uint64_t> identity(sample_.size());
        std::iota(identity.begin(), identity.end(), 0);
        if (three_party_key(config_.mode)) {
            qber_estimate_ = estimate_qber(identity, disclosed[0], disclosed[1], disclosed[2]);
        } else {
            qber_estimate_ = estimate_qber_pair(identity, disclosed[0], disclosed[1]);
        }
        aborted_ = qber_estimate_ > config_.qber_threshold;

        if (self_ == Role::Charlie) {
            ep_.broadcast(QberVerdict{qber_estimate_, aborted_});
        } else {
            const auto verdict = expect<QberVerdict>(Role::Charlie);
            if (verdict.value != qber_estimate_ || verdict.abort != aborted_) {
                fail(ErrorCode::ProtocolViolation, "charlie's QBER verdict disagrees with the sample");
            }
        }

        sifted_qber_ = truth_->qber();
        if (holder_) {
            key_ = drop_indices(key_, sample_);
        }
        truth_->drop_sample(sample_);
        key_length_ = sifted_.size() - sample_.size();
        key_qber_before_ = truth_->qber();
        check_against_truth();
    }

    void reconcile() {
        phase_ = Phase::Reconcile;
        if (aborted_ && config_.mode != SessionMode::TqcDeny) {
            key_.clear();
            truth_->clear();
            key_length_ = 0;
            return;
        }
        std::uint32_t index = 0;
        for (const auto n : config_.block_lengths) {
            const auto ex = exchange_parity_pass(ep_, config_.mode, key_, key_length_, n,
                                                 index++, config_.timeout);
            PassReport pr;
            pr.block_length = n;
            pr.input_length = key_length_;
            pr.blocks = ex.blocks;
            pr.kept_blocks = static_cast<std::size_t>(
                std::count(ex.kept_mask.begin(), ex.kept_mask.end(), std::uint8_t{1}));
            pr.output_length = pr.kept_blocks * (n - 1);
            pr.kept_block_fraction =
                pr.blocks == 0 ? 0.0
                               : static_cast<double>(pr.kept_blocks) / static_cast<double>(pr.blocks);
            truth_->apply_pass(n, ex.kept_mask);
            pr.qber = truth_->qber();
            passes_.push_back(pr);
            if (holder_) {
                key_ = ex.own_kept;
            }
            key_length_ = pr.output_length;
            check_against_truth();
        }
    }

    void say_goodbye() {
        phase_ = Phase::Closing;
        ep_.broadcast(Bye{});
        for (const auto r : others()) {
            expect<Bye>(r);
        }
        phase_ = Phase::Done;
    }

    PartyResult finish() {
        SessionReport rep;
        rep.session_id = config_.session_id;
        rep.mode = config_.mode;
        rep.num_rounds = config_.num_rounds;
        rep.noise = format_noise(config_.noise);
        rep.seed = config_.seed;
        rep.eavesdropper = config_.eavesdropper;
        rep.sifted_count = sifted_.size();
        rep.sample_size = sample_.size();
        rep.qber_estimate = qber_estimate_;
        rep.sifted_qber = sifted_qber_;
        rep.key_length_before_reconcile = sifted_.size() - sample_.size();
        rep.key_qber_before_reconcile = key_qber_before_;
        rep.passes = passes_;
        rep.final_key_length = key_length_;
        rep.final_qber = passes_.empty() ? key_qber_before_ : passes_.back().qber;
        rep.key_rate_fraction = static_cast<double>(sifted_.size()) /
                                static_cast<double>(config_.num_rounds);
        rep.aborted = aborted_;
        if (aborted_) {
            std::ostringstream os;
            os << (config_.mode == SessionMode::TqcDeny ? "no secure key: " : "")
               << "estimated QBER " << qber_estimate_ << " exceeds threshold "
               << config_.qber_threshold;
            rep.abort_reason = os.str();
        }
        rep.eve_agreement = truth_->eve_agreement();

        PartyResult out;
        out.report = std::move(rep);
        if (holder_) {
            out.final_key = std::move(key_);
        }
        return out;
    }

    void check_against_truth() const {
        if (holder_ && key_ != truth_->key(self_)) {
            fail(ErrorCode::Internal, std::string(role_name(self_)) +
                                          "'s key diverged from the simulated ground truth");
        }
    }

    template <class T> T expect(Role from) { return expect_from<T>(ep_, from, config_.timeout); }

    [[nodiscard]] std::array<Role, 2> others() const {
        std::array<Role, 2> out{};
        std::size_t i = 0;
        for (const auto r : kAllRoles) {
            if (r != self_) {
                out[i++] = r;
            }
        }
        return out;
    }

    const SessionConfig &config_;
    const World &world_;
    Endpoint &ep_;
    Role self_;
    bool holder_;
    Phase phase_ = Phase::Handshake;

    std::array<std::vector<Basis>, 3> bases_;
    std::vector<std::uint64_t> sifted_;
    std::vector<std::uint64_t> sample_;
    BitVec key_;
    std::size_t key_length_ = 0;
    double qber_estimate_ = 0.0;
    double sifted_qber_ = 0.0;
    double key_qber_before_ = 0.0;
    bool aborted_ = false;
    std::vector<PassReport> passes_;
    std::optional<GroundTruth> truth_;
};

} // namespace

Basis choose_basis(Rng &rng, SessionMode mode, Role role) {
    if (mode == SessionMode::DistrustHv && role != Role::Charlie) {
        return Basis::Z;
    }
    return rng.coin() ? Basis::Y : Basis::X;
}

bool sift(const BasisCombo &c) {
    if (c.alice == Basis::Z || c.bob == Basis::Z || c.charlie == Basis::Z) {
        fail(ErrorCode::InvalidArgument, "sifting is undefined for H/V measurements");
    }
    const int ys = (c.alice == Basis::Y) + (c.bob == Basis::Y) + (c.charlie == Basis::Y);
    return ys == 0 || ys == 2;
}

std::uint8_t encode(Role role, const BasisCombo &combo, Outcome outcome) {
    if (!sift(combo)) {
        fail(ErrorCode::InvalidArgument, std::string("combination ") +
                                             basis_letter(combo.alice) +
                                             basis_letter(combo.bob) +
                                             basis_letter(combo.charlie) +
                                             " does not generate key");
    }
    const bool all_x = combo.alice == Basis::X && combo.bob == Basis::X &&
                       combo.charlie == Basis::X;
    const std::uint8_t bit = outcome_bit(outcome);
    return (role == Role::Charlie && all_x) ? bit ^ 1U : bit;
}

double estimate_qber(std::span<const std::uint64_t> sample_indices,
                     std::span<const std::uint8_t> alice, std::span<const std::uint8_t> bob,
                     std::span<const std::uint8_t> charlie) {
    require(!sample_indices.empty(), ErrorCode::InvalidArgument, "empty QBER sample");
    require(alice.size() == bob.size() && bob.size() == charlie.size(),
            ErrorCode::InvalidArgument, "keys differ in length");
    const auto a = gather(alice, sample_indices);
    const auto b = gather(bob, sample_indices);
    const auto c = gather(charlie, sample_indices);
    return qber_of_bits(a, b, std::span<const std::uint8_t>(c));
}

double estimate_qber_pair(std::span<const std::uint64_t> sample_indices,
                          std::span<const std::uint8_t> alice,
                          std::span<const std::uint8_t> bob) {
    require(!sample_indices.empty(), ErrorCode::InvalidArgument, "empty QBER sample");
    require(alice.size() == bob.size(), ErrorCode::InvalidArgument, "keys differ in length");
    return qber_of_bits(gather(alice, sample_indices), gather(bob, sample_indices),
                        std::nullopt);
}

Outcome eavesdrop_intercept_resend(TripletInFlight &t, Basis eve_basis, Rng &rng) {
    constexpr auto kCharlie = index_of(Role::Charlie);
    if (t.triplet.is_pure()) {
        auto m = measure(t.triplet.state(), kCharlie, eve_basis, rng);
        t.triplet.state() = std::move(m.state);
        return m.outcome;
    }
    Outcome o = Outcome::Plus;
    if (t.resent_charlie) {
        auto m = measure(*t.resent_charlie, 0, eve_basis, rng);
        o = m.outcome;
    } else {
        o = rng.uniform() < 0.5 ? Outcome::Plus : Outcome::Minus;
    }
    auto states = basis_states(eve_basis);
    t.resent_charlie = o == Outcome::Plus ? std::move(states.first) : std::move(states.second);
    return o;
}

Outcome measure_party(TripletInFlight &t, Role role, Basis basis, Rng &rng) {
    if (t.triplet.is_pure()) {
        auto m = measure(t.triplet.state(), index_of(role), basis, rng);
        t.triplet.state() = std::move(m.state);
        return m.outcome;
    }
    if (role == Role::Charlie && t.resent_charlie) {
        auto m = measure(*t.resent_charlie, 0, basis, rng);
        t.resent_charlie = std::move(m.state);
        return m.outcome;
    }
    return rng.uniform() < 0.5 ? Outcome::Plus : Outcome::Minus;
}

void validate(const SessionConfig &c) {
    require(c.num_rounds >= kMinRounds, ErrorCode::Config,
            "num_rounds must be at least " + std::to_string(kMinRounds));
    require(c.sample_fraction > 0.0 && c.sample_fraction < 1.0, ErrorCode::Config,
            "sample_fraction must lie in (0, 1)");
    require(!c.block_lengths.empty(), ErrorCode::Config, "block_lengths must not be empty");
    for (const auto n : c.block_lengths) {
        require(n >= 2, ErrorCode::Config, "every block length must be at least 2");
    }
    require(c.qber_threshold >= 0.0 && c.qber_threshold <= 1.0, ErrorCode::Config,
            "qber_threshold must lie in [0, 1]");
    require(c.timeout.count() > 0, ErrorCode::Config, "timeout must be positive");
    try {
        validate(c.noise);
    } catch (const Error &e) {
        fail(ErrorCode::Config, e.what());
    }
    require(c.session_id.empty() || is_hex_id(c.session_id), ErrorCode::Config,
            "session id must be 32 lowercase hex digits");
}

SessionConfig normalized(SessionConfig config) {
    validate(config);
    if (config.session_id.empty()) {
        const auto base = fnv1a64(digest_text(config, false));
        config.session_id = hex64(derive_seed(base, kSessionIdStream)) +
                            hex64(derive_seed(base, kSessionIdStream + 1));
    }
    return config;
}

std::string config_digest(const SessionConfig &config) {
    return hex64(fnv1a64(digest_text(config, true)));
}

BasisCombo World::combo(std::size_t round) const {
    return {records[0][round].basis, records[1][round].basis, records[2][round].basis};
}

World simulate_world(const SessionConfig &config) {
    validate(config);
    World w;
    const auto n = static_cast<std::size_t>(config.num_rounds);
    for (auto &r : w.records) {
        r.reserve(n);
    }
    w.pure.reserve(n);
    if (config.eavesdropper) {
        w.eve.reserve(n);
    }
    Rng rng(derive_seed(config.seed, kWorldStream));
    std::array<Basis, 3> bases{};
    std::array<Outcome, 3> outcomes{};
    for (std::size_t round = 0; round < n; ++round) {
        TripletInFlight t{emit(config.noise, rng), std::nullopt};
        w.pure.push_back(t.triplet.is_pure() ? 1 : 0);
        for (const auto r : kAllRoles) {
            bases[index_of(r)] = choose_basis(rng, config.mode, r);
        }
        if (config.eavesdropper) {
            const Basis eb = config.mode == SessionMode::DistrustHv
                                 ? Basis::Z
                                 : choose_basis(rng, SessionMode::Qss, Role::Charlie);
            w.eve.push_back({round, eb, eavesdrop_intercept_resend(t, eb, rng)});
        }
        for (const auto r : kAllRoles) {
            outcomes[index_of(r)] = measure_party(t, r, bases[index_of(r)], rng);
        }
        outcomes[2] = flip_outcome(config.noise, outcomes[2], rng);
        for (const auto r : kAllRoles) {
            w.records[index_of(r)].push_back({round, bases[index_of(r)], outcomes[index_of(r)]});
        }
    }
    return w;
}

BitVec deny_guess_bits(std::uint64_t seed, std::size_t count) {
    Rng rng(derive_seed(seed, kGuessStream));
    BitVec out(count);
    for (auto &b : out) {
        b = rng.coin() ? 1 : 0;
    }
    return out;
}

std::size_t sample_size(std::size_t sifted, double fraction) {
    if (sifted == 0) {
        return 0;
    }
    const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(sifted)));
    return std::clamp<std::size_t>(k, 1, sifted);
}

std::vector<std::uint64_t> choose_sample(std::size_t sifted, std::size_t k,
                                         std::uint64_t seed) {
    require(k <= sifted, ErrorCode::InvalidArgument, "sample larger than the sifted key");
    std::vector<std::uint64_t> pool(sifted);
    std::iota(pool.begin(), pool.end(), 0);
    Rng rng(seed);
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + rng.below(sifted - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

std::vector<double> SessionReport::post_pass_qber() const {
    std::vector<double> out;
    out.reserve(passes.size());
    for (const auto &p : passes) {
        out.push_back(p.qber);
    }
    return out;
}

PartyResult run_party(const SessionConfig &config, const World &world, Endpoint &endpoint) {
    require(world.num_rounds() == config.num_rounds, ErrorCode::InvalidArgument,
            "world does not match the session configuration");
    Party party(config, world, endpoint);
    return party.run();
}

SessionResult run_inproc(const SessionConfig &config) {
    const SessionConfig cfg = normalized(config);
    const World world = simulate_world(cfg);
    InProcNetwork net;
    std::array<std::optional<PartyResult>, 3> results;
    std::array<std::exception_ptr, 3> errors;
    std::vector<std::thread> threads;
    for (const auto r : kAllRoles) {
        threads.emplace_back([&, r] {
            auto &ep = net.endpoint(r);
            try {
                results[index_of(r)] = run_party(cfg, world, ep);
            } catch (...) {
                errors[index_of(r)] = std::current_exception();
            }
            ep.close();
        });
    }
    for (auto &t : threads) {
        t.join();
    }

    // A failing party makes its peers see a closed channel; report the cause.
    std::exception_ptr first;
    for (const auto &e : errors) {
        if (!e) {
            continue;
        }
        try {
            std::rethrow_exception(e);
        } catch (const Error &err) {
            if (err.code() != ErrorCode::Transport && err.code() != ErrorCode::Timeout) {
                throw;
            }
        } catch (...) {
            throw;
        }
        if (!first) {
            first = e;
        }
    }
    if (first) {
        std::rethrow_exception(first);
    }

    SessionResult out;
    out.report = results[index_of(Role::Charlie)]->report;
    for (const auto r : kAllRoles) {
        if (!(results[index_of(r)]->report == out.report)) {
            fail(ErrorCode::Internal, "parties disagree on the session report");
        }
        out.keys[index_of(r)] = std::move(results[index_of(r)]->final_key);
    }
    return out;
}

SessionResult run_tcp_party(const SessionConfig &config, Role role, const TcpAddress &addr) {
    const SessionConfig cfg = normalized(config);
    std::unique_ptr<TcpEndpoint> ep;
    if (role == Role::Charlie) {
        ep = TcpEndpoint::listen(addr, cfg.session_id);
        ep->accept_peers(cfg.timeout);
    } else {
        ep = TcpEndpoint::connect(role, addr, cfg.session_id, cfg.timeout);
    }
    const World world = simulate_world(cfg);
    PartyResult res = run_party(cfg, world, *ep);
    ep->close();
    SessionResult out;
    out.report = std::move(res.report);
    out.keys[index_of(role)] = std::move(res.final_key);
    return out;
}

} // namespace ghzqss
