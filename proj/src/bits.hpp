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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ghzqss {

/// One bit per element, values 0 or 1.
using BitVec = std::vector<std::uint8_t>;

/// Packs bits MSB-first; trailing pad bits of the last byte are zero.
std::vector<std::uint8_t> pack_bits(std::span<const std::uint8_t> bits);

/// Inverse of pack_bits. Throws InvalidArgument if `bytes` is too short.
BitVec unpack_bits(std::span<const std::uint8_t> bytes, std::size_t bit_count);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

std::size_t hamming_distance(std::span<const std::uint8_t> a,
                             std::span<const std::uint8_t> b);

/// Fraction of positions where a and b differ; 0 for empty input.
double disagreement_rate(std::span<const std::uint8_t> a,
                         std::span<const std::uint8_t> b);

BitVec xor_bits(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

std::string to_hex(std::span<const std::uint8_t> bytes);

/// 64-bit FNV-1a. Used for config digests, not for anything adversarial.
std::uint64_t fnv1a64(std::string_view data);

} // namespace ghzqss
