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
 * One-time pad over session keys.
 *
 * Key files hold raw packed bits (MSB-first) next to a JSON sidecar
 * `<key>.json` with {"session_id", "role", "bit_length", "residual_qber",
 * "consumed_offset"}.
 */

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bits.hpp"

namespace ghzqss {

/// Key bits plus the position up to which they have been used. Bits before
/// the offset are never handed out again.
class KeyMaterial {
  public:
    KeyMaterial() = default;
    KeyMaterial(BitVec bits, std::string source_session, std::size_t consumed_offset = 0);

    [[nodiscard]] const BitVec &bits() const noexcept { return bits_; }
    [[nodiscard]] const std::string &source_session() const noexcept { return session_; }
    [[nodiscard]] std::size_t consumed_offset() const noexcept { return offset_; }
    [[nodiscard]] std::size_t remaining() const noexcept { return bits_.size() - offset_; }

    /// Next `count` unused bits, advancing the offset. Throws KeyExhausted.
    BitVec take(std::size_t count);
    /// Same bits take() would return, without advancing.
    [[nodiscard]] BitVec peek(std::size_t count) const;

    std::string role;
    std::optional<double> residual_qber;

  private:
    BitVec bits_;
    std::string session_;
    std::size_t offset_ = 0;
};

/// out[i] = message[i] ^ key[i]. Throws KeyExhausted if the key is shorter.
BitVec pad_xor(std::span<const std::uint8_t> message, std::span<const std::uint8_t> key);

/// cipher ^ alice_key ^ bob_key.
BitVec cooperative_decrypt(std::span<const std::uint8_t> cipher,
                           std::span<const std::uint8_t> alice_key,
                           std::span<const std::uint8_t> bob_key);

struct PadMessage {
    std::vector<std::uint8_t> payload;
    std::size_t bit_length = 0;

    [[nodiscard]] BitVec bits() const { return unpack_bits(payload, bit_length); }
};

PadMessage file_to_bits(const std::filesystem::path &path);
void bits_to_file(std::span<const std::uint8_t> bits, const std::filesystem::path &path);

void write_bytes(const std::filesystem::path &path, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path &path);

/// Binary PBM (P4) split into header and raster. The pad only covers the
/// raster, so an encrypted image stays viewable.
struct PbmImage {
    std::vector<std::uint8_t> header;
    std::vector<std::uint8_t> raster;
    std::size_t width = 0;
    std::size_t height = 0;
};

/// nullopt if the bytes are not a P4 image.
std::optional<PbmImage> parse_pbm(std::span<const std::uint8_t> bytes);

/// Splits a file into a clear prefix and the bits the pad applies to: the
/// raster for a P4 image, everything otherwise.
struct PadTarget {
    std::vector<std::uint8_t> clear_prefix;
    BitVec bits;
};
PadTarget pad_target(std::span<const std::uint8_t> file_bytes);
std::vector<std::uint8_t> assemble(const std::vector<std::uint8_t> &clear_prefix,
                                   std::span<const std::uint8_t> bits);

std::filesystem::path sidecar_path(const std::filesystem::path &key_path);
void save_key(const KeyMaterial &key, const std::filesystem::path &path);
KeyMaterial load_key(const std::filesystem::path &path);
/// Rewrites only the sidecar (after the offset moved).
void save_key_metadata(const KeyMaterial &key, const std::filesystem::path &path);

} // namespace ghzqss
