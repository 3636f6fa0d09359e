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

#include <chrono>
#include <future>
#include <thread>

#include "error.hpp"
#include "random.hpp"
#include "transport.hpp"

using namespace ghzqss;

namespace {

ErrorCode code_of(const std::function<void()> &f) {
    try {
        f();
    } catch (const Error &e) {
        return e.code();
    }
    FAIL("no ghzqss::Error thrown");
    return ErrorCode::Internal;
}

BitVec random_bits(Rng &rng, std::size_t n) {
    BitVec out(n);
    for (auto &b : out) {
        b = rng.coin() ? 1 : 0;
    }
    return out;
}

Message random_message(Rng &rng) {
    const auto len = static_cast<std::size_t>(rng.below(40));
    switch (rng.below(8)) {
    case 0:
        return Hello{static_cast<Role>(rng.below(3)), "0123456789abcdef0123456789abcdef"};
    case 1: {
        BasisAnnounce m;
        for (std::size_t i = 0; i < len; ++i) {
            m.bases.push_back(static_cast<Basis>(rng.below(3)));
        }
        return m;
    }
    case 2:
        return ResultAnnounce{rng.coin() ? ResultScope::Sample : ResultScope::Rounds,
                              random_bits(rng, len)};
    case 3: {
        SampleIndices m{{}, rng.next()};
        for (std::size_t i = 0; i < len; ++i) {
            m.indices.push_back(rng.next() >> 20);
        }
        return m;
    }
    case 4:
        return QberVerdict{rng.uniform(), rng.coin()};
    case 5:
        return ParityVector{static_cast<std::uint32_t>(rng.below(10)), random_bits(rng, len)};
    case 6:
        return Control{static_cast<SessionMode>(rng.below(4)), "00ff00ff00ff00ff"};
    default:
        return Bye{};
    }
}

} // namespace

TEST_CASE("frames round-trip every message kind", "[property]") {
    Rng rng(31);
    for (int i = 0; i < 500; ++i) {
        Envelope env{static_cast<Role>(rng.below(3)), rng.next() >> 1, std::nullopt,
                     random_message(rng)};
        if (rng.coin()) {
            env.to = static_cast<Role>(rng.below(3));
        }
        const auto frame = encode_frame(env);
        const std::uint32_t n = (std::uint32_t{frame[0]} << 24) | (std::uint32_t{frame[1]} << 16) |
                                (std::uint32_t{frame[2]} << 8) | frame[3];
        CHECK(n + 4 == frame.size());
        CHECK(decode_frame(frame) == env);
    }
}

TEST_CASE("frame bodies are versioned JSON") {
    const Envelope env{Role::Bob, 3, std::nullopt, ParityVector{1, {1, 0, 1}}};
    const auto body = encode_payload(env);
    CHECK(body.find("\"v\":1") != std::string::npos);
    CHECK(body.find("\"kind\":\"parity_vector\"") != std::string::npos);
    CHECK(message_kind(env.payload) == "parity_vector");
}

TEST_CASE("malformed frames are protocol violations") {
    const auto violation = ErrorCode::ProtocolViolation;
    CHECK(code_of([] { decode_frame(std::vector<std::uint8_t>{0, 0}); }) == violation);
    CHECK(code_of([] { decode_frame(std::vector<std::uint8_t>{0, 0, 0, 9, '{', '}'}); }) ==
          violation);
    CHECK(code_of([] { decode_payload("not json"); }) == violation);
    CHECK(code_of([] { decode_payload(R"({"v":2,"sender":"alice","seq":1,"kind":"bye","data":{}})"); }) ==
          violation);
    CHECK(code_of([] { decode_payload(R"({"v":1,"sender":"eve","seq":1,"kind":"bye","data":{}})"); }) ==
          violation);
    CHECK(code_of([] { decode_payload(R"({"v":1,"sender":"alice","seq":1,"kind":"shout","data":{}})"); }) ==
          violation);
    CHECK(code_of([] {
              decode_payload(
                  R"({"v":1,"sender":"alice","seq":1,"kind":"parity_vector","data":{"pass":0,"n":3,"bits":"@@"}})");
          }) == violation);
}

TEST_CASE("in-process delivery is FIFO per sender") {
    InProcNetwork net;
    auto &alice = net.endpoint(Role::Alice);
    auto &bob = net.endpoint(Role::Bob);
    auto &charlie = net.endpoint(Role::Charlie);
    for (std::uint32_t i = 0; i < 50; ++i) {
        alice.broadcast(ParityVector{i, {}});
        if (i % 2 == 0) {
            charlie.send(Role::Bob, ParityVector{100 + i, {}});
        }
    }
    for (std::uint32_t i = 0; i < 50; ++i) {
        CHECK(std::get<ParityVector>(bob.recv(Role::Alice, Millis(100)).payload).pass == i);
        CHECK(std::get<ParityVector>(charlie.recv(Role::Alice, Millis(100)).payload).pass == i);
    }
    for (std::uint32_t i = 0; i < 50; i += 2) {
        const auto env = bob.recv(Role::Charlie, Millis(100));
        CHECK(env.to == Role::Bob);
        CHECK(std::get<ParityVector>(env.payload).pass == 100 + i);
    }
    // the directed messages never reached Alice
    CHECK(code_of([&] { alice.recv(Role::Charlie, Millis(10)); }) == ErrorCode::Timeout);
}

TEST_CASE("receive times out") {
    InProcNetwork net;
    const auto start = std::chrono::steady_clock::now();
    CHECK(code_of([&] { net.endpoint(Role::Alice).recv(Role::Bob, Millis(10)); }) ==
          ErrorCode::Timeout);
    CHECK(std::chrono::steady_clock::now() - start >= Millis(10));
}

TEST_CASE("closing drains queued messages, then reports the loss") {
    InProcNetwork net;
    net.endpoint(Role::Bob).send(Role::Alice, Bye{});
    net.endpoint(Role::Bob).close();
    CHECK(std::holds_alternative<Bye>(net.endpoint(Role::Alice).recv(Role::Bob, Millis(50)).payload));
    CHECK(code_of([&] { net.endpoint(Role::Alice).recv(Role::Bob, Millis(50)); }) ==
          ErrorCode::Transport);
}

TEST_CASE("bounded queues apply back-pressure") {
    InProcNetwork net(4);
    auto &alice = net.endpoint(Role::Alice);
    auto &bob = net.endpoint(Role::Bob);
    auto producer = std::async(std::launch::async, [&] {
        for (std::uint32_t i = 0; i < 100; ++i) {
            alice.send(Role::Bob, ParityVector{i, {}});
        }
    });
    for (std::uint32_t i = 0; i < 100; ++i) {
        CHECK(std::get<ParityVector>(bob.recv(Role::Alice, Millis(2000)).payload).pass == i);
    }
    producer.get();
}

TEST_CASE("address parsing") {
    const auto a = parse_address("127.0.0.1:9000");
    CHECK(a.host == "127.0.0.1");
    CHECK(a.port == 9000);
    for (const char *bad : {"", "localhost", "host:", ":80", "h:99999", "h:12x"}) {
        INFO(bad);
        CHECK(code_of([&] { parse_address(bad); }) == ErrorCode::Config);
    }
}

TEST_CASE("tcp star relays between Alice and Bob") {
    const std::string sid(32, 'a');
    auto charlie = TcpEndpoint::listen({"127.0.0.1", 0}, sid);
    const TcpAddress addr{"127.0.0.1", charlie->bound_port()};
    auto fa = std::async(std::launch::async, [&] {
        return TcpEndpoint::connect(Role::Alice, addr, sid, Millis(5000));
    });
    auto fb = std::async(std::launch::async, [&] {
        return TcpEndpoint::connect(Role::Bob, addr, sid, Millis(5000));
    });
    charlie->accept_peers(Millis(5000));
    auto alice = fa.get();
    auto bob = fb.get();

    alice->broadcast(BasisAnnounce{{Basis::X, Basis::Y}});
    bob->send(Role::Alice, ResultAnnounce{ResultScope::Sample, {1, 0, 1}});
    charlie->broadcast(Bye{});

    CHECK(std::get<BasisAnnounce>(bob->recv(Role::Alice, Millis(2000)).payload).bases.size() == 2);
    CHECK(std::get<BasisAnnounce>(charlie->recv(Role::Alice, Millis(2000)).payload).bases[1] ==
          Basis::Y);
    CHECK(std::get<ResultAnnounce>(alice->recv(Role::Bob, Millis(2000)).payload).bits ==
          BitVec{1, 0, 1});
    CHECK(std::holds_alternative<Bye>(alice->recv(Role::Charlie, Millis(2000)).payload));
    CHECK(std::holds_alternative<Bye>(bob->recv(Role::Charlie, Millis(2000)).payload));
    // the directed message to Alice was not shown to Charlie
    CHECK(code_of([&] { charlie->recv(Role::Bob, Millis(50)); }) == ErrorCode::Timeout);

    alice->close();
    bob->close();
    charlie->close();
}

TEST_CASE("tcp listener rejects role collisions and foreign sessions") {
    const std::string sid(32, 'b');
    {
        auto charlie = TcpEndpoint::listen({"127.0.0.1", 0}, sid);
        const TcpAddress addr{"127.0.0.1", charlie->bound_port()};
        auto a1 = TcpEndpoint::connect(Role::Alice, addr, sid, Millis(5000));
        auto a2 = TcpEndpoint::connect(Role::Alice, addr, sid, Millis(5000));
        CHECK(code_of([&] { charlie->accept_peers(Millis(5000)); }) == ErrorCode::Config);
    }
    {
        auto charlie = TcpEndpoint::listen({"127.0.0.1", 0}, sid);
        const TcpAddress addr{"127.0.0.1", charlie->bound_port()};
        auto a = TcpEndpoint::connect(Role::Alice, addr, std::string(32, 'c'), Millis(5000));
        CHECK(code_of([&] { charlie->accept_peers(Millis(5000)); }) == ErrorCode::Config);
    }
}

TEST_CASE("connecting to nobody times out") {
    auto probe = TcpEndpoint::listen({"127.0.0.1", 0}, std::string(32, 'd'));
    const TcpAddress addr{"127.0.0.1", probe->bound_port()};
    probe->close();
    const auto code = code_of(
        [&] { TcpEndpoint::connect(Role::Bob, addr, std::string(32, 'd'), Millis(200)); });
    CHECK((code == ErrorCode::Timeout || code == ErrorCode::Transport));
}
