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

#include "bits.hpp"

#include <array>

#include "error.hpp"

namespace ghzqss {

namespace {

constexpr std::string_view kAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_char(char c) {
    if (c >= 'A' && c <= 'Z') {
        return c - 'A';
    }
    if (c >= 'a' && c <= 'z') {
        return c - 'a' + 26;
    }
    if (c >= '0' && c <= '9') {
        return c - '0' + 52;
    }
    if (c == '+') {
        return 62;
    }
    if (c == '/') {
        return 63;
    }
    return -1;
}

void check_same_length(std::span<const std::uint8_t> a,
                       std::span<const std::uint8_t> b) {
    require(a.size() == b.size(), ErrorCode::InvalidArgument,
            "bit arrays differ in length (" + std::to_string(a.size()) +
                " vs " + std::to_string(b.size()) + ")");
}

} // namespace

std::vector<std::uint8_t> pack_bits(std::span<const std::uint8_t> bits) {
    std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != 0) {
            out[i / 8] |= static_cast<std::uint8_t>(0x80U >> (i % 8));
        }
    }
    return out;
}

BitVec unpack_bits(std::span<const std::uint8_t> bytes, std::size_t bit_count) {
    require(bytes.size() * 8 >= bit_count, ErrorCode::InvalidArgument,
            "packed buffer holds fewer than " + std::to_string(bit_count) +
                " bits");
    BitVec out(bit_count);
    for (std::size_t i = 0; i < bit_count; ++i) {
        out[i] = (bytes[i / 8] >> (7 - i % 8)) & 1U;
    }
    return out;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const std::uint32_t v = (std::uint32_t{bytes[i]} << 16) |
                                (std::uint32_t{bytes[i + 1]} << 8) | bytes[i + 2];
        out.push_back(kAlphabet[(v >> 18) & 63]);
        out.push_back(kAlphabet[(v >> 12) & 63]);
        out.push_back(kAlphabet[(v >> 6) & 63]);
        out.push_back(kAlphabet[v & 63]);
    }
    const std::size_t rest = bytes.size() - i;
    if (rest == 1) {
        const std::uint32_t v = std::uint32_t{bytes[i]} << 16;
        out.push_back(kAlphabet[(v >> 18) & 63]);
        out.push_back(kAlphabet[(v >> 12) & 63]);
        out.append("==");
    } else if (rest == 2) {
        const std::uint32_t v =
            (std::uint32_t{bytes[i]} << 16) | (std::uint32_t{bytes[i + 1]} << 8);
        out.push_back(kAlphabet[(v >> 18) & 63]);
        out.push_back(kAlphabet[(v >> 12) & 63]);
        out.push_back(kAlphabet[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
    require(text.size() % 4 == 0, ErrorCode::InvalidArgument,
            "base64 length is not a multiple of 4");
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        std::array<int, 4> q{};
        int pad = 0;
        for (std::size_t j = 0; j < 4; ++j) {
            const char c = text[i + j];
            if (c == '=') {
                require(i + 4 == text.size() && j >= 2, ErrorCode::InvalidArgument,
                        "misplaced base64 padding");
                q[j] = 0;
                ++pad;
            } else {
                require(pad == 0, ErrorCode::InvalidArgument,
                        "data after base64 padding");
                q[j] = decode_char(c);
                require(q[j] >= 0, ErrorCode::InvalidArgument,
                        "invalid base64 character");
            }
        }
        const std::uint32_t v = (static_cast<std::uint32_t>(q[0]) << 18) |
                                (static_cast<std::uint32_t>(q[1]) << 12) |
                                (static_cast<std::uint32_t>(q[2]) << 6) |
                                static_cast<std::uint32_t>(q[3]);
        out.push_back(static_cast<std::uint8_t>(v >> 16));
        if (pad < 2) {
            out.push_back(static_cast<std::uint8_t>(v >> 8));
        }
        if (pad < 1) {
            out.push_back(static_cast<std::uint8_t>(v));
        }
    }
    return out;
}

std::size_t hamming_distance(std::span<const std::uint8_t> a,
                             std::span<const std::uint8_t> b) {
    check_same_length(a, b);
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d += static_cast<std::size_t>((a[i] ^ b[i]) & 1U);
    }
    return d;
}

double disagreement_rate(std::span<const std::uint8_t> a,
                         std::span<const std::uint8_t> b) {
    if (a.empty() && b.empty()) {
        return 0.0;
    }
    return static_cast<double>(hamming_distance(a, b)) /
           static_cast<double>(a.size());
}

BitVec xor_bits(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    check_same_length(a, b);
    BitVec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = (a[i] ^ b[i]) & 1U;
    }
    return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (const auto b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 15]);
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : data) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace ghzqss
