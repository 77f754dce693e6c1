#include "core/hash.hpp"

#include "core/errors.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <memory>
#include <vector>

namespace zerotwo::core {

namespace {

struct MdCtxDeleter {
    void operator()(EVP_MD_CTX* ctx) const noexcept { EVP_MD_CTX_free(ctx); }
};

struct MacCtxDeleter {
    void operator()(EVP_MAC_CTX* ctx) const noexcept { EVP_MAC_CTX_free(ctx); }
};

std::array<std::uint8_t, 4> length_prefix(std::size_t n) {
    if (n > 0xffffffffu) {
        fail(Errc::encoding, "hash part exceeds 2^32-1 bytes");
    }
    const auto len = static_cast<std::uint32_t>(n);
    return {static_cast<std::uint8_t>(len >> 24), static_cast<std::uint8_t>(len >> 16),
            static_cast<std::uint8_t>(len >> 8), static_cast<std::uint8_t>(len)};
}

} // namespace

Digest hash_digest(std::span<const ByteView> parts) {
    std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx(EVP_MD_CTX_new());
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        fail(Errc::internal, "SHA-256 init failed");
    }
    for (const auto& part : parts) {
        const auto prefix = length_prefix(part.size());
        if (EVP_DigestUpdate(ctx.get(), prefix.data(), prefix.size()) != 1 ||
            EVP_DigestUpdate(ctx.get(), part.data(), part.size()) != 1) {
            fail(Errc::internal, "SHA-256 update failed");
        }
    }
    Digest out{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1 || len != out.size()) {
        fail(Errc::internal, "SHA-256 final failed");
    }
    return out;
}

Digest hash_digest(std::initializer_list<ByteView> parts) {
    return hash_digest(std::span<const ByteView>(parts.begin(), parts.size()));
}

Digest hmac_digest(ByteView key, std::span<const ByteView> parts) {
    static EVP_MAC* const hmac = EVP_MAC_fetch(nullptr, "HMAC", nullptr);
    if (hmac == nullptr) {
        fail(Errc::internal, "HMAC unavailable");
    }
    std::unique_ptr<EVP_MAC_CTX, MacCtxDeleter> ctx(EVP_MAC_CTX_new(hmac));
    char digest_name[] = "SHA256";
    OSSL_PARAM params[] = {
        OSSL_PARAM_construct_utf8_string("digest", digest_name, 0),
        OSSL_PARAM_construct_end(),
    };
    if (!ctx || EVP_MAC_init(ctx.get(), key.data(), key.size(), params) != 1) {
        fail(Errc::internal, "HMAC init failed");
    }
    for (const auto& part : parts) {
        const auto prefix = length_prefix(part.size());
        if (EVP_MAC_update(ctx.get(), prefix.data(), prefix.size()) != 1 ||
            EVP_MAC_update(ctx.get(), part.data(), part.size()) != 1) {
            fail(Errc::internal, "HMAC update failed");
        }
    }
    Digest out{};
    std::size_t len = 0;
    if (EVP_MAC_final(ctx.get(), out.data(), &len, out.size()) != 1 || len != out.size()) {
        fail(Errc::internal, "HMAC final failed");
    }
    return out;
}

Digest hmac_digest(ByteView key, std::initializer_list<ByteView> parts) {
    return hmac_digest(key, std::span<const ByteView>(parts.begin(), parts.size()));
}

Digest xor_digests(const Digest& a, const Digest& b) {
    Digest out{};
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>(a[i] ^ b[i]);
    }
    return out;
}

bool constant_time_equals(ByteView a, ByteView b) noexcept {
    if (a.size() != b.size()) {
        return false;
    }
    volatile std::uint8_t acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc = static_cast<std::uint8_t>(acc | (a[i] ^ b[i]));
    }
    return acc == 0;
}

} // namespace zerotwo::core
