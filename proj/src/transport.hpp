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
 * Classical channel between the three parties.
 *
 * The channel is public and assumed authentic: anyone may read it, nobody can
 * alter it. There is no MAC and no signature on any frame.
 *
 * Wire frame: 4-byte big-endian payload length, then a UTF-8 JSON object
 * {"v":1, "sender", "seq", "kind", "data"}. Bit-packed lists travel as base64
 * strings inside "data". A directed (non-broadcast) frame additionally
 * carries "to", which the relaying listener uses for routing.
 */

#include <array>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bits.hpp"
#include "qsim.hpp"
#include "roles.hpp"

namespace ghzqss {

struct Hello {
    Role role;
    std::string session_id;
    bool operator==(const Hello &) const = default;
};

struct BasisAnnounce {
    std::vector<Basis> bases;
    bool operator==(const BasisAnnounce &) const = default;
};

enum class ResultScope : std::uint8_t { Sample, Rounds };

/// Sample: encoded key bits at the agreed sample positions.
/// Rounds: raw outcome bits (Plus = 1) for every round.
struct ResultAnnounce {
    ResultScope scope;
    BitVec bits;
    bool operator==(const ResultAnnounce &) const = default;
};

struct SampleIndices {
    std::vector<std::uint64_t> indices;
    std::uint64_t seed;
    bool operator==(const SampleIndices &) const = default;
};

struct QberVerdict {
    double value;
    bool abort;
    bool operator==(const QberVerdict &) const = default;
};

struct ParityVector {
    std::uint32_t pass;
    BitVec parities;
    bool operator==(const ParityVector &) const = default;
};

struct Control {
    SessionMode mode;
    std::string config_digest;
    bool operator==(const Control &) const = default;
};

struct Bye {
    bool operator==(const Bye &) const = default;
};

using Message = std::variant<Hello, BasisAnnounce, ResultAnnounce, SampleIndices,
                             QberVerdict, ParityVector, Control, Bye>;

std::string_view message_kind(const Message &m);

struct Envelope {
    Role sender;
    std::uint64_t seq;
    std::optional<Role> to; ///< unset for broadcasts
    Message payload;
    bool operator==(const Envelope &) const = default;
};

inline constexpr std::size_t kMaxFrameBytes = std::size_t{64} << 20;

/// JSON text of an envelope (the frame body).
std::string encode_payload(const Envelope &env);
Envelope decode_payload(std::string_view json);

/// Length-prefixed frame.
std::vector<std::uint8_t> encode_frame(const Envelope &env);
Envelope decode_frame(std::span<const std::uint8_t> frame);

using Millis = std::chrono::milliseconds;

/// Per-sender FIFO queue feeding one endpoint. A capacity of zero means
/// unbounded.
class Inbox {
  public:
    explicit Inbox(std::size_t capacity = 0) : capacity_(capacity) {}

    /// Blocks while full. Throws Transport if the inbox was closed.
    void push(Envelope env);
    /// Throws Timeout when nothing arrives in time, Transport when the
    /// sender is gone and the queue is drained.
    Envelope pop(Millis timeout);
    void close(std::string reason);

  private:
    std::size_t capacity_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<Envelope> queue_;
    bool closed_ = false;
    std::string reason_;
};

/// One party's view of the channel.
///
/// One thread may send while another receives; concurrent sends need
/// external ordering.
class Endpoint {
  public:
    virtual ~Endpoint() = default;

    [[nodiscard]] Role self() const noexcept { return self_; }

    void send(Role to, Message msg);
    void broadcast(Message msg);
    /// Next envelope from `from`, in send order. Throws ProtocolViolation if
    /// the sequence number does not increase.
    Envelope recv(Role from, Millis timeout);

    virtual void close() = 0;

  protected:
    explicit Endpoint(Role self) : self_(self) {}

    std::uint64_t next_seq() { return ++seq_; }
    virtual void deliver(const Envelope &env) = 0;
    virtual Inbox &inbox(Role from) = 0;

  private:
    Role self_;
    std::uint64_t seq_ = 0;
    std::array<std::uint64_t, 3> last_seen_{};
};

/// Three connected endpoints inside one process, for deterministic
/// simulation. Every (sender, receiver) pair has its own bounded queue.
class InProcNetwork {
  public:
    explicit InProcNetwork(std::size_t capacity = 1024);
    ~InProcNetwork();
    InProcNetwork(const InProcNetwork &) = delete;
    InProcNetwork &operator=(const InProcNetwork &) = delete;

    Endpoint &endpoint(Role r);

  private:
    class Link;
    std::array<std::array<Inbox, 3>, 3> queues_; // [receiver][sender]
    std::array<std::unique_ptr<Link>, 3> links_;
};

struct TcpAddress {
    std::string host;
    std::uint16_t port;
};

/// host:port. Throws Config.
TcpAddress parse_address(std::string_view text);

/// TCP star: Charlie listens, Alice and Bob connect and announce themselves
/// with Hello. Charlie forwards frames between Alice and Bob unchanged.
class TcpEndpoint final : public Endpoint {
  public:
    /// Binds and listens; accept_peers() completes the handshake.
    static std::unique_ptr<TcpEndpoint> listen(const TcpAddress &addr,
                                               std::string session_id);
    /// Connects (retrying until `timeout`) and sends Hello.
    static std::unique_ptr<TcpEndpoint> connect(Role self, const TcpAddress &addr,
                                                std::string session_id, Millis timeout);

    ~TcpEndpoint() override;

    /// Charlie only: waits for Alice and Bob. Throws Config on a role
    /// collision or session id mismatch.
    void accept_peers(Millis timeout);

    /// Port actually bound (useful with port 0).
    [[nodiscard]] std::uint16_t bound_port() const noexcept { return bound_port_; }

    void close() override;

  protected:
    void deliver(const Envelope &env) override;
    Inbox &inbox(Role from) override { return inboxes_[index_of(from)]; }

  private:
    struct Peer;

    TcpEndpoint(Role self, std::string session_id);
    void start_reader(Role peer);
    void reader_loop(Role peer);
    void write_to(Role peer, std::span<const std::uint8_t> frame);

    std::string session_id_;
    int listen_fd_ = -1;
    std::uint16_t bound_port_ = 0;
    std::array<std::unique_ptr<Peer>, 3> peers_; // by role, own slot unused
    std::array<Inbox, 3> inboxes_;
    bool closed_ = false;
};

} // namespace ghzqss
