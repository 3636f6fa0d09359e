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

#include "transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <thread>

#include <nlohmann/json.hpp>

#include "error.hpp"

namespace ghzqss {

using nlohmann::json;

namespace {

template <class... Ts> struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void violation(const std::string &what) {
    fail(ErrorCode::ProtocolViolation, "malformed frame: " + what);
}

std::string bits_to_b64(const BitVec &bits) { return base64_encode(pack_bits(bits)); }

BitVec b64_to_bits(const json &data, const char *bits_key) {
    const auto count = data.at("count").get<std::uint64_t>();
    const auto bytes = base64_decode(data.at(bits_key).get<std::string>());
    if (bytes.size() != (count + 7) / 8) {
        violation("packed length does not match count");
    }
    return unpack_bits(bytes, count);
}

// Two bits per basis: X=00, Y=01, Z=10.
std::string bases_to_b64(const std::vector<Basis> &bases) {
    BitVec bits(bases.size() * 2);
    for (std::size_t i = 0; i < bases.size(); ++i) {
        const auto v = static_cast<std::uint8_t>(bases[i]);
        bits[2 * i] = (v >> 1) & 1U;
        bits[2 * i + 1] = v & 1U;
    }
    return bits_to_b64(bits);
}

std::vector<Basis> b64_to_bases(const json &data) {
    const auto count = data.at("count").get<std::uint64_t>();
    const auto bytes = base64_decode(data.at("bases").get<std::string>());
    if (bytes.size() != (2 * count + 7) / 8) {
        violation("packed basis length does not match count");
    }
    const auto bits = unpack_bits(bytes, 2 * count);
    std::vector<Basis> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        const int v = (bits[2 * i] << 1) | bits[2 * i + 1];
        if (v > 2) {
            violation("invalid basis code");
        }
        out[i] = static_cast<Basis>(v);
    }
    return out;
}

json encode_data(const Message &m) {
    return std::visit(
        overloaded{
            [](const Hello &h) {
                return json{{"role", role_name(h.role)}, {"session_id", h.session_id}};
            },
            [](const BasisAnnounce &b) {
                return json{{"count", b.bases.size()}, {"bases", bases_to_b64(b.bases)}};
            },
            [](const ResultAnnounce &r) {
                return json{{"scope", r.scope == ResultScope::Sample ? "sample" : "rounds"},
                            {"count", r.bits.size()},
                            {"bits", bits_to_b64(r.bits)}};
            },
            [](const SampleIndices &s) {
                return json{{"seed", s.seed}, {"indices", s.indices}};
            },
            [](const QberVerdict &q) {
                return json{{"value", q.value}, {"abort", q.abort}};
            },
            [](const ParityVector &p) {
                return json{{"pass", p.pass},
                            {"count", p.parities.size()},
                            {"bits", bits_to_b64(p.parities)}};
            },
            [](const Control &c) {
                return json{{"mode", mode_name(c.mode)}, {"config_digest", c.config_digest}};
            },
            [](const Bye &) { return json::object(); },
        },
        m);
}

Message decode_data(std::string_view kind, const json &d) {
    if (kind == "hello") {
        return Hello{parse_role(d.at("role").get<std::string>()),
                     d.at("session_id").get<std::string>()};
    }
    if (kind == "basis_announce") {
        return BasisAnnounce{b64_to_bases(d)};
    }
    if (kind == "result_announce") {
        const auto scope = d.at("scope").get<std::string>();
        if (scope != "sample" && scope != "rounds") {
            violation("unknown result scope '" + scope + "'");
        }
        return ResultAnnounce{scope == "sample" ? ResultScope::Sample : ResultScope::Rounds,
                              b64_to_bits(d, "bits")};
    }
    if (kind == "sample_indices") {
        return SampleIndices{d.at("indices").get<std::vector<std::uint64_t>>(),
                             d.at("seed").get<std::uint64_t>()};
    }
    if (kind == "qber_verdict") {
        return QberVerdict{d.at("value").get<double>(), d.at("abort").get<bool>()};
    }
    if (kind == "parity_vector") {
        return ParityVector{d.at("pass").get<std::uint32_t>(), b64_to_bits(d, "bits")};
    }
    if (kind == "control") {
        return Control{parse_mode(d.at("mode").get<std::string>()),
                       d.at("config_digest").get<std::string>()};
    }
    if (kind == "bye") {
        return Bye{};
    }
    violation("unknown message kind '" + std::string(kind) + "'");
}

} // namespace

std::string_view message_kind(const Message &m) {
    static constexpr std::array<std::string_view, 8> kKinds{
        "hello",        "basis_announce", "result_announce", "sample_indices",
        "qber_verdict", "parity_vector",  "control",         "bye"};
    return kKinds[m.index()];
}

std::string encode_payload(const Envelope &env) {
    json j{{"v", 1},
           {"sender", role_name(env.sender)},
           {"seq", env.seq},
           {"kind", message_kind(env.payload)},
           {"data", encode_data(env.payload)}};
    if (env.to) {
        j["to"] = role_name(*env.to);
    }
    return j.dump();
}

Envelope decode_payload(std::string_view text) {
    try {
        const auto j = json::parse(text);
        if (j.at("v").get<int>() != 1) {
            violation("unsupported frame version");
        }
        Envelope env{parse_role(j.at("sender").get<std::string>()),
                     j.at("seq").get<std::uint64_t>(), std::nullopt, Bye{}};
        if (const auto it = j.find("to"); it != j.end()) {
            env.to = parse_role(it->get<std::string>());
        }
        env.payload = decode_data(j.at("kind").get<std::string>(), j.at("data"));
        return env;
    } catch (const json::exception &e) {
        violation(e.what());
    } catch (const Error &e) {
        if (e.code() == ErrorCode::ProtocolViolation) {
            throw;
        }
        violation(e.what());
    }
}

std::vector<std::uint8_t> encode_frame(const Envelope &env) {
    const auto body = encode_payload(env);
    require(body.size() <= kMaxFrameBytes, ErrorCode::InvalidArgument,
            "frame exceeds maximum size");
    const auto n = static_cast<std::uint32_t>(body.size());
    std::vector<std::uint8_t> out;
    out.reserve(4 + body.size());
    out.push_back(static_cast<std::uint8_t>(n >> 24));
    out.push_back(static_cast<std::uint8_t>(n >> 16));
    out.push_back(static_cast<std::uint8_t>(n >> 8));
    out.push_back(static_cast<std::uint8_t>(n));
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

Envelope decode_frame(std::span<const std::uint8_t> frame) {
    if (frame.size() < 4) {
        violation("truncated length prefix");
    }
    const std::uint32_t n = (std::uint32_t{frame[0]} << 24) |
                            (std::uint32_t{frame[1]} << 16) |
                            (std::uint32_t{frame[2]} << 8) | frame[3];
    if (frame.size() != 4 + std::size_t{n}) {
        violation("length prefix does not match frame size");
    }
    return decode_payload(
        std::string_view(reinterpret_cast<const char *>(frame.data()) + 4, n));
}

// Inbox ---------------------------------------------------------------------

void Inbox::push(Envelope env) {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return closed_ || capacity_ == 0 || queue_.size() < capacity_; });
    if (closed_) {
        fail(ErrorCode::Transport, "peer closed: " + reason_);
    }
    queue_.push_back(std::move(env));
    cv_.notify_all();
}

Envelope Inbox::pop(Millis timeout) {
    std::unique_lock lock(mu_);
    if (!cv_.wait_for(lock, timeout, [&] { return closed_ || !queue_.empty(); })) {
        fail(ErrorCode::Timeout,
             "no message within " + std::to_string(timeout.count()) + " ms");
    }
    if (queue_.empty()) {
        fail(ErrorCode::Transport, "connection lost: " + reason_);
    }
    Envelope env = std::move(queue_.front());
    queue_.pop_front();
    cv_.notify_all();
    return env;
}

void Inbox::close(std::string reason) {
    std::lock_guard lock(mu_);
    if (!closed_) {
        closed_ = true;
        reason_ = std::move(reason);
    }
    cv_.notify_all();
}

// Endpoint ------------------------------------------------------------------

void Endpoint::send(Role to, Message msg) {
    require(to != self_, ErrorCode::InvalidArgument, "cannot send to self");
    deliver(Envelope{self_, next_seq(), to, std::move(msg)});
}

void Endpoint::broadcast(Message msg) {
    deliver(Envelope{self_, next_seq(), std::nullopt, std::move(msg)});
}

Envelope Endpoint::recv(Role from, Millis timeout) {
    require(from != self_, ErrorCode::InvalidArgument, "cannot receive from self");
    Envelope env = inbox(from).pop(timeout);
    auto &last = last_seen_[index_of(from)];
    if (env.sender != from || env.seq <= last) {
        fail(ErrorCode::ProtocolViolation,
             "out-of-order frame from " + std::string(role_name(from)) + " (seq " +
                 std::to_string(env.seq) + " after " + std::to_string(last) + ")");
    }
    last = env.seq;
    return env;
}

// In-process ----------------------------------------------------------------

class InProcNetwork::Link final : public Endpoint {
  public:
    Link(Role self, InProcNetwork &net) : Endpoint(self), net_(net) {}

    void close() override {
        const auto me = index_of(self());
        for (std::size_t other = 0; other < 3; ++other) {
            net_.queues_[me][other].close(std::string(role_name(self())) + " closed");
            net_.queues_[other][me].close(std::string(role_name(self())) + " closed");
        }
    }

  protected:
    void deliver(const Envelope &env) override {
        for (const auto r : kAllRoles) {
            if (r == self() || (env.to && *env.to != r)) {
                continue;
            }
            net_.queues_[index_of(r)][index_of(self())].push(env);
        }
    }

    Inbox &inbox(Role from) override {
        return net_.queues_[index_of(self())][index_of(from)];
    }

  private:
    InProcNetwork &net_;
};

InProcNetwork::InProcNetwork(std::size_t capacity)
    : queues_{{{Inbox(capacity), Inbox(capacity), Inbox(capacity)},
               {Inbox(capacity), Inbox(capacity), Inbox(capacity)},
               {Inbox(capacity), Inbox(capacity), Inbox(capacity)}}} {
    for (const auto r : kAllRoles) {
        links_[index_of(r)] = std::make_unique<Link>(r, *this);
    }
}

InProcNetwork::~InProcNetwork() {
    for (auto &l : links_) {
        l->close();
    }
}

Endpoint &InProcNetwork::endpoint(Role r) { return *links_[index_of(r)]; }

// TCP -----------------------------------------------------------------------

namespace {

[[noreturn]] void sys_fail(const std::string &what) {
    fail(ErrorCode::Transport, what + ": " + std::strerror(errno));
}

void write_all(int fd, std::span<const std::uint8_t> data) {
    std::size_t done = 0;
    while (done < data.size()) {
        const ssize_t n = ::send(fd, data.data() + done, data.size() - done, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            sys_fail("send");
        }
        done += static_cast<std::size_t>(n);
    }
}

// false on clean EOF before the first byte.
bool read_exact(int fd, std::uint8_t *buf, std::size_t len) {
    std::size_t done = 0;
    while (done < len) {
        const ssize_t n = ::recv(fd, buf + done, len - done, 0);
        if (n == 0) {
            if (done == 0) {
                return false;
            }
            fail(ErrorCode::Transport, "connection closed mid-frame");
        }
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            sys_fail("recv");
        }
        done += static_cast<std::size_t>(n);
    }
    return true;
}

std::optional<std::vector<std::uint8_t>> read_frame(int fd) {
    std::vector<std::uint8_t> frame(4);
    if (!read_exact(fd, frame.data(), 4)) {
        return std::nullopt;
    }
    const std::uint32_t n = (std::uint32_t{frame[0]} << 24) |
                            (std::uint32_t{frame[1]} << 16) |
                            (std::uint32_t{frame[2]} << 8) | frame[3];
    if (n > kMaxFrameBytes) {
        fail(ErrorCode::ProtocolViolation, "frame of " + std::to_string(n) + " bytes");
    }
    frame.resize(4 + std::size_t{n});
    if (n > 0 && !read_exact(fd, frame.data() + 4, n)) {
        fail(ErrorCode::Transport, "connection closed mid-frame");
    }
    return frame;
}

bool wait_readable(int fd, Millis timeout) {
    pollfd p{fd, POLLIN, 0};
    int rc = 0;
    do {
        rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
    } while (rc < 0 && errno == EINTR);
    if (rc < 0) {
        sys_fail("poll");
    }
    return rc > 0;
}

sockaddr_in resolve(const TcpAddress &addr) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo *res = nullptr;
    const auto port = std::to_string(addr.port);
    if (const int rc = ::getaddrinfo(addr.host.c_str(), port.c_str(), &hints, &res); rc != 0) {
        fail(ErrorCode::Transport,
             "cannot resolve '" + addr.host + "': " + ::gai_strerror(rc));
    }
    sockaddr_in out{};
    std::memcpy(&out, res->ai_addr, sizeof(out));
    ::freeaddrinfo(res);
    return out;
}

Role other_user(Role r) { return r == Role::Alice ? Role::Bob : Role::Alice; }

} // namespace

TcpAddress parse_address(std::string_view text) {
    const auto colon = text.rfind(':');
    if (colon == std::string_view::npos || colon == 0) {
        fail(ErrorCode::Config, "address '" + std::string(text) + "' is not host:port");
    }
    unsigned port = 0;
    const auto digits = text.substr(colon + 1);
    const auto [ptr, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), port);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || port > 65535) {
        fail(ErrorCode::Config, "invalid port in '" + std::string(text) + "'");
    }
    return {std::string(text.substr(0, colon)), static_cast<std::uint16_t>(port)};
}

struct TcpEndpoint::Peer {
    int fd = -1;
    std::mutex write_mu;
    std::thread reader;
};

TcpEndpoint::TcpEndpoint(Role self, std::string session_id)
    : Endpoint(self), session_id_(std::move(session_id)) {}

TcpEndpoint::~TcpEndpoint() { close(); }

std::unique_ptr<TcpEndpoint> TcpEndpoint::listen(const TcpAddress &addr,
                                                 std::string session_id) {
    std::unique_ptr<TcpEndpoint> ep(new TcpEndpoint(Role::Charlie, std::move(session_id)));
    ep->listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (ep->listen_fd_ < 0) {
        sys_fail("socket");
    }
    const int one = 1;
    ::setsockopt(ep->listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in sa = resolve(addr);
    if (::bind(ep->listen_fd_, reinterpret_cast<sockaddr *>(&sa), sizeof(sa)) < 0) {
        sys_fail("bind " + addr.host + ":" + std::to_string(addr.port));
    }
    if (::listen(ep->listen_fd_, 4) < 0) {
        sys_fail("listen");
    }
    socklen_t len = sizeof(sa);
    ::getsockname(ep->listen_fd_, reinterpret_cast<sockaddr *>(&sa), &len);
    ep->bound_port_ = ntohs(sa.sin_port);
    return ep;
}

void TcpEndpoint::accept_peers(Millis timeout) {
    require(self() == Role::Charlie && listen_fd_ >= 0, ErrorCode::InvalidArgument,
            "accept_peers on a non-listening endpoint");
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    int accepted = 0;
    while (accepted < 2) {
        const auto left = std::chrono::duration_cast<Millis>(
            deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0 || !wait_readable(listen_fd_, left)) {
            fail(ErrorCode::Timeout, "peers did not connect within " +
                                         std::to_string(timeout.count()) + " ms");
        }
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            sys_fail("accept");
        }
        const int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
        const auto hello_left = std::chrono::duration_cast<Millis>(
            deadline - std::chrono::steady_clock::now());
        if (hello_left.count() <= 0 || !wait_readable(fd, hello_left)) {
            ::close(fd);
            fail(ErrorCode::Timeout, "peer connected but sent no Hello");
        }
        std::optional<std::vector<std::uint8_t>> frame;
        try {
            frame = read_frame(fd);
        } catch (...) {
            ::close(fd);
            throw;
        }
        if (!frame) {
            ::close(fd);
            continue; // connection probe without a Hello
        }
        const Envelope env = decode_frame(*frame);
        const auto *hello = std::get_if<Hello>(&env.payload);
        if (hello == nullptr || env.sender != hello->role) {
            ::close(fd);
            fail(ErrorCode::ProtocolViolation, "first frame from a peer must be Hello");
        }
        if (hello->session_id != session_id_) {
            ::close(fd);
            fail(ErrorCode::Config, "session id mismatch: expected " + session_id_ +
                                        ", got " + hello->session_id);
        }
        if (hello->role == Role::Charlie || peers_[index_of(hello->role)]) {
            ::close(fd);
            fail(ErrorCode::Config, "role collision: " + std::string(role_name(hello->role)) +
                                        " is already taken");
        }
        auto peer = std::make_unique<Peer>();
        peer->fd = fd;
        peers_[index_of(hello->role)] = std::move(peer);
        ++accepted;
    }
    ::close(listen_fd_);
    listen_fd_ = -1;
    start_reader(Role::Alice);
    start_reader(Role::Bob);
}

std::unique_ptr<TcpEndpoint> TcpEndpoint::connect(Role self, const TcpAddress &addr,
                                                  std::string session_id,
                                                  Millis timeout) {
    require(self != Role::Charlie, ErrorCode::Config,
            "charlie is the listener and cannot connect");
    std::unique_ptr<TcpEndpoint> ep(new TcpEndpoint(self, std::move(session_id)));
    const sockaddr_in sa = resolve(addr);
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    int fd = -1;
    while (true) {
        fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0) {
            sys_fail("socket");
        }
        if (::connect(fd, reinterpret_cast<const sockaddr *>(&sa), sizeof(sa)) == 0) {
            break;
        }
        const int err = errno;
        ::close(fd);
        if (std::chrono::steady_clock::now() >= deadline) {
            errno = err;
            sys_fail("connect " + addr.host + ":" + std::to_string(addr.port));
        }
        std::this_thread::sleep_for(Millis(50));
    }
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    auto peer = std::make_unique<Peer>();
    peer->fd = fd;
    ep->peers_[index_of(Role::Charlie)] = std::move(peer);
    const Envelope hello{self, ep->next_seq(), Role::Charlie, Hello{self, ep->session_id_}};
    ep->write_to(Role::Charlie, encode_frame(hello));
    ep->start_reader(Role::Charlie);
    return ep;
}

void TcpEndpoint::start_reader(Role peer) {
    peers_[index_of(peer)]->reader = std::thread([this, peer] { reader_loop(peer); });
}

void TcpEndpoint::reader_loop(Role peer) {
    const int fd = peers_[index_of(peer)]->fd;
    std::string reason = "eof from " + std::string(role_name(peer));
    try {
        while (auto frame = read_frame(fd)) {
            Envelope env = decode_frame(*frame);
            if (self() == Role::Charlie) {
                if (env.sender != peer) {
                    fail(ErrorCode::ProtocolViolation, "spoofed sender on " +
                                                           std::string(role_name(peer)) +
                                                           "'s connection");
                }
                const Role other = other_user(peer);
                if (!env.to || *env.to == other) {
                    try {
                        write_to(other, *frame);
                    } catch (const Error &) {
                        // the other user is gone; its own reader reports that
                    }
                }
                if (!env.to || *env.to == Role::Charlie) {
                    inboxes_[index_of(peer)].push(std::move(env));
                }
            } else {
                inboxes_[index_of(env.sender)].push(std::move(env));
            }
        }
    } catch (const std::exception &e) {
        reason = e.what();
    }
    if (self() == Role::Charlie) {
        inboxes_[index_of(peer)].close(reason);
    } else {
        inboxes_[index_of(Role::Charlie)].close(reason);
        inboxes_[index_of(other_user(self()))].close(reason);
    }
}

void TcpEndpoint::write_to(Role peer, std::span<const std::uint8_t> frame) {
    auto &p = peers_[index_of(peer)];
    if (!p || p->fd < 0) {
        fail(ErrorCode::Transport, "no connection to " + std::string(role_name(peer)));
    }
    std::lock_guard lock(p->write_mu);
    write_all(p->fd, frame);
}

void TcpEndpoint::deliver(const Envelope &env) {
    const auto frame = encode_frame(env);
    if (self() != Role::Charlie) {
        write_to(Role::Charlie, frame);
        return;
    }
    for (const auto r : {Role::Alice, Role::Bob}) {
        if (!env.to || *env.to == r) {
            write_to(r, frame);
        }
    }
}

void TcpEndpoint::close() {
    if (closed_) {
        return;
    }
    closed_ = true;
    for (auto &p : peers_) {
        if (p && p->fd >= 0) {
            ::shutdown(p->fd, SHUT_RDWR);
        }
    }
    for (auto &p : peers_) {
        if (p && p->reader.joinable()) {
            p->reader.join();
        }
    }
    for (auto &p : peers_) {
        if (p && p->fd >= 0) {
            ::close(p->fd);
            p->fd = -1;
        }
    }
    if (listen_fd_ >= 0) {
        ::close(listen_fd_);
        listen_fd_ = -1;
    }
    for (auto &in : inboxes_) {
        in.close("endpoint closed");
    }
}

} // namespace ghzqss
