#include "core/encoding.hpp"

#include "core/errors.hpp"

#include <openssl/crypto.h>

#include <limits>

namespace zerotwo::core {

Bytes encode_int(const BigInt& value) { return value.to_bytes(); }

BigInt decode_int(ByteView bytes) { return BigInt::from_bytes(bytes); }

Bytes frame(ByteView payload) {
    if (payload.size() > std::numeric_limits<std::uint32_t>::max()) {
        fail(Errc::encoding, "frame payload exceeds 2^32-1 bytes");
    }
    const auto len = static_cast<std::uint32_t>(payload.size());
    Bytes out;
    out.reserve(4 + payload.size());
    out.push_back(static_cast<std::uint8_t>(len >> 24));
    out.push_back(static_cast<std::uint8_t>(len >> 16));
    out.push_back(static_cast<std::uint8_t>(len >> 8));
    out.push_back(static_cast<std::uint8_t>(len));
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

Bytes be64(std::uint64_t value) {
    Bytes out(8);
    for (int i = 7; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(value & 0xff);
        value >>= 8;
    }
    return out;
}

std::string hex_encode(ByteView bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

Bytes hex_decode(std::string_view hex) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    if (hex.size() % 2 != 0) {
        fail(Errc::parse, "odd-length hex string");
    }
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const int hi = nibble(hex[2 * i]);
        const int lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) {
            fail(Errc::parse, "invalid hex digit");
        }
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

void secure_wipe(std::span<std::uint8_t> bytes) noexcept {
    if (!bytes.empty()) {
        OPENSSL_cleanse(bytes.data(), bytes.size());
    }
}

void secure_wipe(std::string& text) noexcept {
    if (!text.empty()) {
        OPENSSL_cleanse(text.data(), text.size());
    }
    text.clear();
}

} // namespace zerotwo::core
