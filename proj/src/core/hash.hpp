#pragma once

#include "core/bigint.hpp"
#include "core/encoding.hpp"

#include <array>
#include <initializer_list>

namespace zerotwo::core {

using Digest = std::array<std::uint8_t, 32>;

// H(parts...) = SHA-256(frame(part_0) || frame(part_1) || ...).
Digest hash_digest(std::span<const ByteView> parts);
Digest hash_digest(std::initializer_list<ByteView> parts);

// H_K(parts...) = HMAC-SHA-256 keyed with K over the same framed concatenation.
Digest hmac_digest(ByteView key, std::span<const ByteView> parts);
Digest hmac_digest(ByteView key, std::initializer_list<ByteView> parts);

inline BigInt int_from_digest(const Digest& digest) { return BigInt::from_bytes(digest); }

Digest xor_digests(const Digest& a, const Digest& b);

// Single pass with an accumulated XOR; the running time depends only on the
// lengths.
bool constant_time_equals(ByteView a, ByteView b) noexcept;

} // namespace zerotwo::core
