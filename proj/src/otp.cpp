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

#include "otp.hpp"

#include <cctype>
#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>

#include "error.hpp"

namespace ghzqss {

namespace fs = std::filesystem;
using nlohmann::json;

KeyMaterial::KeyMaterial(BitVec bits, std::string source_session, std::size_t consumed_offset)
    : bits_(std::move(bits)), session_(std::move(source_session)), offset_(consumed_offset) {
    require(offset_ <= bits_.size(), ErrorCode::InvalidArgument,
            "consumed offset beyond the key length");
}

BitVec KeyMaterial::peek(std::size_t count) const {
    if (count > remaining()) {
        fail(ErrorCode::KeyExhausted, "need " + std::to_string(count) + " key bits, only " +
                                          std::to_string(remaining()) + " unused");
    }
    const auto first = bits_.begin() + static_cast<std::ptrdiff_t>(offset_);
    return {first, first + static_cast<std::ptrdiff_t>(count)};
}

BitVec KeyMaterial::take(std::size_t count) {
    BitVec out = peek(count);
    offset_ += count;
    return out;
}

BitVec pad_xor(std::span<const std::uint8_t> message, std::span<const std::uint8_t> key) {
    if (key.size() < message.size()) {
        fail(ErrorCode::KeyExhausted, "key of " + std::to_string(key.size()) +
                                          " bits cannot cover a " +
                                          std::to_string(message.size()) + "-bit message");
    }
    return xor_bits(message, key.first(message.size()));
}

BitVec cooperative_decrypt(std::span<const std::uint8_t> cipher,
                           std::span<const std::uint8_t> alice_key,
                           std::span<const std::uint8_t> bob_key) {
    return pad_xor(pad_xor(cipher, alice_key), bob_key);
}

std::vector<std::uint8_t> read_bytes(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
    }
    std::vector<std::uint8_t> out((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
    if (in.bad()) {
        fail(ErrorCode::Io, "read error on '" + path.string() + "'");
    }
    return out;
}

void write_bytes(const fs::path &path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        fail(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
    }
    out.write(reinterpret_cast<const char *>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        fail(ErrorCode::Io, "write error on '" + path.string() + "'");
    }
}

PadMessage file_to_bits(const fs::path &path) {
    PadMessage m;
    m.payload = read_bytes(path);
    m.bit_length = m.payload.size() * 8;
    return m;
}

void bits_to_file(std::span<const std::uint8_t> bits, const fs::path &path) {
    write_bytes(path, pack_bits(bits));
}

std::optional<PbmImage> parse_pbm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '4') {
        return std::nullopt;
    }
    std::size_t pos = 2;
    auto skip_space = [&] {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') {
                    ++pos;
                }
            } else if (std::isspace(bytes[pos]) != 0) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto number = [&]() -> std::optional<std::size_t> {
        skip_space();
        std::size_t v = 0;
        const std::size_t start = pos;
        while (pos < bytes.size() && std::isdigit(bytes[pos]) != 0) {
            v = v * 10 + (bytes[pos] - '0');
            ++pos;
        }
        if (pos == start) {
            return std::nullopt;
        }
        return v;
    };
    const auto w = number();
    const auto h = number();
    // exactly one whitespace byte separates the header from the raster
    if (!w || !h || *w == 0 || *h == 0 || pos >= bytes.size() ||
        std::isspace(bytes[pos]) == 0) {
        return std::nullopt;
    }
    ++pos;
    const std::size_t raster_len = (*w + 7) / 8 * *h;
    if (bytes.size() - pos != raster_len) {
        return std::nullopt;
    }
    PbmImage img;
    img.width = *w;
    img.height = *h;
    img.header.assign(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(pos));
    img.raster.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
    return img;
}

PadTarget pad_target(std::span<const std::uint8_t> file_bytes) {
    if (auto img = parse_pbm(file_bytes)) {
        return {std::move(img->header), unpack_bits(img->raster, img->raster.size() * 8)};
    }
    return {{}, unpack_bits(file_bytes, file_bytes.size() * 8)};
}

std::vector<std::uint8_t> assemble(const std::vector<std::uint8_t> &clear_prefix,
                                   std::span<const std::uint8_t> bits) {
    std::vector<std::uint8_t> out = clear_prefix;
    const auto packed = pack_bits(bits);
    out.insert(out.end(), packed.begin(), packed.end());
    return out;
}

fs::path sidecar_path(const fs::path &key_path) {
    fs::path p = key_path;
    p += ".json";
    return p;
}

void save_key_metadata(const KeyMaterial &key, const fs::path &path) {
    json meta{{"session_id", key.source_session()},
              {"role", key.role},
              {"bit_length", key.bits().size()},
              {"consumed_offset", key.consumed_offset()}};
    meta["residual_qber"] = key.residual_qber ? json(*key.residual_qber) : json(nullptr);
    const auto text = meta.dump(2) + "\n";
    write_bytes(sidecar_path(path),
                std::span(reinterpret_cast<const std::uint8_t *>(text.data()), text.size()));
}

void save_key(const KeyMaterial &key, const fs::path &path) {
    bits_to_file(key.bits(), path);
    save_key_metadata(key, path);
}

KeyMaterial load_key(const fs::path &path) {
    const auto raw = read_bytes(path);
    const auto meta_bytes = read_bytes(sidecar_path(path));
    json meta;
    try {
        meta = json::parse(meta_bytes.begin(), meta_bytes.end());
        const auto bit_length = meta.at("bit_length").get<std::size_t>();
        if (raw.size() != (bit_length + 7) / 8) {
            fail(ErrorCode::Io, "key file '" + path.string() + "' holds " +
                                    std::to_string(raw.size()) + " bytes, sidecar says " +
                                    std::to_string(bit_length) + " bits");
        }
        KeyMaterial key(unpack_bits(raw, bit_length), meta.at("session_id").get<std::string>(),
                        meta.at("consumed_offset").get<std::size_t>());
        key.role = meta.value("role", std::string{});
        if (meta.contains("residual_qber") && !meta["residual_qber"].is_null()) {
            key.residual_qber = meta["residual_qber"].get<double>();
        }
        return key;
    } catch (const json::exception &e) {
        fail(ErrorCode::Io, "bad key sidecar '" + sidecar_path(path).string() + "': " + e.what());
    } catch (const Error &e) {
        if (e.code() == ErrorCode::Io) {
            throw;
        }
        fail(ErrorCode::Io, "bad key file '" + path.string() + "': " + e.what());
    }
}

} // namespace ghzqss
