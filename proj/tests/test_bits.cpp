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

#include "bits.hpp"
#include "error.hpp"
#include "random.hpp"

using namespace ghzqss;

TEST_CASE("pack and unpack are inverse for every length") {
    Rng rng(5);
    for (std::size_t len = 0; len < 70; ++len) {
        BitVec bits(len);
        for (auto &b : bits) {
            b = rng.coin() ? 1 : 0;
        }
        const auto packed = pack_bits(bits);
        CHECK(packed.size() == (len + 7) / 8);
        CHECK(unpack_bits(packed, len) == bits);
    }
}

TEST_CASE("packing is most significant bit first") {
    const BitVec bits{1, 0, 0, 0, 0, 0, 0, 1, 1};
    const auto packed = pack_bits(bits);
    REQUIRE(packed.size() == 2);
    CHECK(packed[0] == 0x81);
    CHECK(packed[1] == 0x80);
}

TEST_CASE("base64 matches the RFC 4648 vectors") {
    const std::pair<const char *, const char *> cases[] = {
        {"", ""},         {"f", "Zg=="},         {"fo", "Zm8="},        {"foo", "Zm9v"},
        {"foob", "Zm9vYg=="}, {"fooba", "Zm9vYmE="}, {"foobar", "Zm9vYmFy"},
    };
    for (const auto &[plain, encoded] : cases) {
        const std::string p(plain);
        const std::vector<std::uint8_t> bytes(p.begin(), p.end());
        CHECK(base64_encode(bytes) == encoded);
        CHECK(base64_decode(encoded) == bytes);
    }
}

TEST_CASE("base64 rejects malformed text") {
    CHECK_THROWS_AS(base64_decode("Zm9"), Error);
    CHECK_THROWS_AS(base64_decode("Zm9v!A=="), Error);
}

TEST_CASE("hamming distance and xor agree") {
    const BitVec a{1, 0, 1, 1, 0};
    const BitVec b{0, 0, 1, 0, 1};
    CHECK(hamming_distance(a, b) == 3);
    CHECK(xor_bits(a, b) == BitVec{1, 0, 0, 1, 1});
    CHECK(disagreement_rate(a, b) == Catch::Approx(0.6));
    CHECK_THROWS_AS(hamming_distance(a, BitVec{1}), Error);
}

TEST_CASE("fnv1a64 reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("rng draws are reproducible and in range") {
    Rng a(42);
    Rng b(42);
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(a.below(7) < 7);
        b.below(7);
    }
    CHECK(derive_seed(1, 1) != derive_seed(1, 2));
}
