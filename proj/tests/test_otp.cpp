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

#include <filesystem>

#include <unistd.h>

#include "error.hpp"
#include "oracles.hpp"
#include "otp.hpp"
#include "random.hpp"

using namespace ghzqss;
namespace fs = std::filesystem;

namespace {

BitVec random_bits(Rng &rng, std::size_t n) {
    BitVec out(n);
    for (auto &b : out) {
        b = rng.coin() ? 1 : 0;
    }
    return out;
}

std::vector<std::uint8_t> pbm(std::size_t w, std::size_t h, Rng &rng) {
    const std::string header = "P4\n# test\n" + std::to_string(w) + " " + std::to_string(h) + "\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    for (std::size_t i = 0; i < (w + 7) / 8 * h; ++i) {
        out.push_back(static_cast<std::uint8_t>(rng.below(256)));
    }
    return out;
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("ghzqss_otp_" + std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("the pad is an involution", "[property]") {
    Rng rng(1);
    for (int i = 0; i < 50; ++i) {
        const auto n = static_cast<std::size_t>(rng.below(300));
        const auto m = random_bits(rng, n);
        const auto k = random_bits(rng, n + rng.below(5));
        CHECK(pad_xor(pad_xor(m, k), k) == m);
    }
}

TEST_CASE("cooperative decryption needs both shares", "[property]") {
    Rng rng(2);
    const std::size_t n = 76160;
    const auto m = random_bits(rng, n);
    const auto a = random_bits(rng, n);
    const auto b = random_bits(rng, n);
    const auto c = xor_bits(a, b);
    const auto cipher = pad_xor(m, c);
    CHECK(cooperative_decrypt(cipher, a, b) == m);
    const double single = 1.0 - disagreement_rate(pad_xor(cipher, a), m);
    CHECK(std::abs(single - 0.5) < 4 * oracle::binomial_sigma(0.5, n));
}

TEST_CASE("short keys are exhausted, not wrapped") {
    const BitVec m(10, 1);
    CHECK_THROWS_MATCHES(pad_xor(m, BitVec(9, 0)), Error,
                         Catch::Matchers::Predicate<const Error &>([](const Error &e) {
                             return e.code() == ErrorCode::KeyExhausted;
                         }));
    KeyMaterial key(BitVec{1, 0, 1, 1}, "s");
    CHECK(key.peek(3) == BitVec{1, 0, 1});
    CHECK(key.consumed_offset() == 0);
    CHECK(key.take(3) == BitVec{1, 0, 1});
    CHECK(key.consumed_offset() == 3);
    CHECK(key.take(1) == BitVec{1});
    CHECK_THROWS_AS(key.take(1), Error);
    CHECK(key.take(0).empty());
}

TEST_CASE("PBM parsing isolates the raster") {
    Rng rng(3);
    const auto bytes = pbm(280, 272, rng);
    const auto img = parse_pbm(bytes);
    REQUIRE(img);
    CHECK(img->width == 280);
    CHECK(img->height == 272);
    CHECK(img->raster.size() == 9520);
    const auto target = pad_target(bytes);
    CHECK(target.bits.size() == 76160);
    CHECK(assemble(target.clear_prefix, target.bits) == bytes);

    const std::string odd = "P4 9 2\n";
    std::vector<std::uint8_t> small(odd.begin(), odd.end());
    small.insert(small.end(), {0xff, 0x80, 0x00, 0x00});
    const auto s = parse_pbm(small);
    REQUIRE(s);
    CHECK(s->raster.size() == 4);

    for (const std::string bad : {"P5 2 2\n\x01\x02", "P4 8 2\n\x01", "P4 x 2\n\x01\x02", "P4"}) {
        const std::vector<std::uint8_t> b(bad.begin(), bad.end());
        CHECK_FALSE(parse_pbm(b));
        CHECK(pad_target(b).bits.size() == b.size() * 8);
    }
}

TEST_CASE("empty files pad to empty files") {
    const auto target = pad_target(std::vector<std::uint8_t>{});
    CHECK(target.bits.empty());
    CHECK(assemble(target.clear_prefix, pad_xor(target.bits, BitVec{})).empty());
}

TEST_CASE("key files round-trip with their sidecar") {
    TempDir dir;
    Rng rng(4);
    KeyMaterial key(random_bits(rng, 1001), std::string(32, 'e'), 17);
    key.role = "bob";
    key.residual_qber = 0.0033;
    const auto path = dir.path / "bob.key";
    save_key(key, path);
    CHECK(fs::file_size(path) == 126);
    CHECK(fs::exists(sidecar_path(path)));
    const auto back = load_key(path);
    CHECK(back.bits() == key.bits());
    CHECK(back.consumed_offset() == 17);
    CHECK(back.role == "bob");
    CHECK(back.source_session() == key.source_session());
    REQUIRE(back.residual_qber);
    CHECK(*back.residual_qber == 0.0033);

    // a truncated key file no longer matches its sidecar
    write_bytes(path, std::vector<std::uint8_t>(10, 0));
    CHECK_THROWS_MATCHES(load_key(path), Error,
                         Catch::Matchers::Predicate<const Error &>(
                             [](const Error &e) { return e.code() == ErrorCode::Io; }));
    CHECK_THROWS_AS(load_key(dir.path / "missing.key"), Error);
}
