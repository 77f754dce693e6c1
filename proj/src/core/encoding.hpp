#pragma once

#include "core/bigint.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace zerotwo::core {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView as_bytes(std::string_view text) {
    return {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()};
}

// Canonical integer encoding: minimal big-endian, zero is [0x00].
Bytes encode_int(const BigInt& value);
BigInt decode_int(ByteView bytes);

// 4-byte big-endian length prefix followed by the payload. Payloads of
// 2^32 bytes or more throw Errc::encoding.
Bytes frame(ByteView payload);

Bytes be64(std::uint64_t value);

std::string hex_encode(ByteView bytes);
// Even-length hex only; throws Errc::parse.
Bytes hex_decode(std::string_view hex);

// Overwrites the buffer in a way the optimizer may not elide.
void secure_wipe(std::span<std::uint8_t> bytes) noexcept;
void secure_wipe(std::string& text) noexcept;

} // namespace zerotwo::core
