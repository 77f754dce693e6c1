#include "core/bigint.hpp"

#include "core/errors.hpp"

#include <openssl/bn.h>

#include <memory>

namespace zerotwo::core {

namespace {

struct CtxDeleter {
    void operator()(BN_CTX* ctx) const noexcept { BN_CTX_free(ctx); }
};

BN_CTX* thread_ctx() {
    thread_local std::unique_ptr<BN_CTX, CtxDeleter> ctx(BN_CTX_new());
    if (!ctx) {
        fail(Errc::internal, "BN_CTX_new failed");
    }
    return ctx.get();
}

BIGNUM* checked_new() {
    BIGNUM* bn = BN_new();
    if (bn == nullptr) {
        throw std::bad_alloc();
    }
    return bn;
}

void check(int rc, const char* what) {
    if (rc != 1) {
        fail(Errc::internal, std::string("bignum operation failed: ") + what);
    }
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

} // namespace

BigInt::BigInt() : bn_(checked_new()) {}

BigInt::BigInt(std::uint64_t value) : bn_(checked_new()) {
    check(BN_set_word(bn_, value), "set_word");
}

BigInt::BigInt(const BigInt& other) : bn_(BN_dup(other.bn_)) {
    if (bn_ == nullptr) {
        throw std::bad_alloc();
    }
}

BigInt::BigInt(BigInt&& other) noexcept : bn_(other.bn_) { other.bn_ = nullptr; }

BigInt& BigInt::operator=(const BigInt& other) {
    if (this != &other) {
        if (bn_ == nullptr) {
            bn_ = checked_new();
        }
        if (BN_copy(bn_, other.bn_) == nullptr) {
            throw std::bad_alloc();
        }
    }
    return *this;
}

BigInt& BigInt::operator=(BigInt&& other) noexcept {
    if (this != &other) {
        BN_clear_free(bn_);
        bn_ = other.bn_;
        other.bn_ = nullptr;
    }
    return *this;
}

BigInt::~BigInt() { BN_clear_free(bn_); }

BigInt BigInt::from_bytes(std::span<const std::uint8_t> big_endian) {
    BigInt out;
    if (BN_bin2bn(big_endian.data(), static_cast<int>(big_endian.size()), out.bn_) == nullptr) {
        fail(Errc::internal, "BN_bin2bn failed");
    }
    return out;
}

BigInt BigInt::from_hex(std::string_view hex) {
    if (hex.empty()) {
        fail(Errc::parse, "empty hex integer");
    }
    std::vector<std::uint8_t> bytes((hex.size() + 1) / 2);
    std::size_t pos = 0;
    std::size_t out = 0;
    if (hex.size() % 2 == 1) {
        const int lo = hex_value(hex[0]);
        if (lo < 0) fail(Errc::parse, "invalid hex digit");
        bytes[out++] = static_cast<std::uint8_t>(lo);
        pos = 1;
    }
    for (; pos < hex.size(); pos += 2) {
        const int hi = hex_value(hex[pos]);
        const int lo = hex_value(hex[pos + 1]);
        if (hi < 0 || lo < 0) fail(Errc::parse, "invalid hex digit");
        bytes[out++] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return from_bytes(bytes);
}

std::vector<std::uint8_t> BigInt::to_bytes() const {
    const int len = BN_num_bytes(bn_);
    if (len == 0) {
        return {0x00};
    }
    std::vector<std::uint8_t> out(static_cast<std::size_t>(len));
    BN_bn2bin(bn_, out.data());
    return out;
}

std::string BigInt::to_hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    const auto bytes = to_bytes();
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

bool BigInt::is_zero() const { return BN_is_zero(bn_) == 1; }
bool BigInt::is_one() const { return BN_is_one(bn_) == 1; }
int BigInt::bit_length() const { return BN_num_bits(bn_); }
std::size_t BigInt::byte_length() const { return static_cast<std::size_t>(BN_num_bytes(bn_)); }
bool BigInt::bit(int index) const { return BN_is_bit_set(bn_, index) == 1; }

std::uint64_t BigInt::to_u64() const {
    if (bit_length() > 64) {
        fail(Errc::invalid_argument, "integer does not fit in 64 bits");
    }
    std::uint64_t value = 0;
    for (auto b : to_bytes()) {
        value = (value << 8) | b;
    }
    return value;
}

bool operator==(const BigInt& a, const BigInt& b) { return BN_cmp(a.bn_, b.bn_) == 0; }

std::strong_ordering operator<=>(const BigInt& a, const BigInt& b) {
    const int c = BN_cmp(a.bn_, b.bn_);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

BigInt operator+(const BigInt& a, const BigInt& b) {
    BigInt r;
    check(BN_add(r.bn_, a.bn_, b.bn_), "add");
    return r;
}

BigInt operator-(const BigInt& a, const BigInt& b) {
    if (a < b) {
        fail(Errc::invalid_argument, "unsigned subtraction underflow");
    }
    BigInt r;
    check(BN_sub(r.bn_, a.bn_, b.bn_), "sub");
    return r;
}

BigInt operator*(const BigInt& a, const BigInt& b) {
    BigInt r;
    check(BN_mul(r.bn_, a.bn_, b.bn_, thread_ctx()), "mul");
    return r;
}

BigInt operator%(const BigInt& a, const BigInt& m) {
    if (m.is_zero()) {
        fail(Errc::invalid_argument, "modulus is zero");
    }
    BigInt r;
    check(BN_nnmod(r.bn_, a.bn_, m.bn_, thread_ctx()), "nnmod");
    return r;
}

BigInt operator/(const BigInt& a, const BigInt& d) {
    if (d.is_zero()) {
        fail(Errc::invalid_argument, "division by zero");
    }
    BigInt q;
    check(BN_div(q.bn_, nullptr, a.bn_, d.bn_, thread_ctx()), "div");
    return q;
}

BigInt BigInt::with_bit_flipped(int index) const {
    BigInt r(*this);
    if (bit(index)) {
        check(BN_clear_bit(r.bn_, index), "clear_bit");
    } else {
        check(BN_set_bit(r.bn_, index), "set_bit");
    }
    return r;
}

BigInt mod_exp(const BigInt& base, const BigInt& exponent, const BigInt& modulus) {
    if (modulus.is_zero()) {
        fail(Errc::invalid_argument, "modulus is zero");
    }
    BigInt r;
    check(BN_mod_exp(r.raw(), base.raw(), exponent.raw(), modulus.raw(), thread_ctx()), "mod_exp");
    return r;
}

BigInt mod_mul(const BigInt& a, const BigInt& b, const BigInt& modulus) {
    BigInt r;
    check(BN_mod_mul(r.raw(), a.raw(), b.raw(), modulus.raw(), thread_ctx()), "mod_mul");
    return r;
}

BigInt mod_add(const BigInt& a, const BigInt& b, const BigInt& modulus) {
    BigInt r;
    check(BN_mod_add(r.raw(), a.raw(), b.raw(), modulus.raw(), thread_ctx()), "mod_add");
    return r;
}

BigInt mod_sub(const BigInt& a, const BigInt& b, const BigInt& modulus) {
    BigInt r;
    check(BN_mod_sub(r.raw(), a.raw(), b.raw(), modulus.raw(), thread_ctx()), "mod_sub");
    return r;
}

bool is_probable_prime(const BigInt& candidate) {
    const int rc = BN_check_prime(candidate.raw(), thread_ctx(), nullptr);
    if (rc < 0) {
        fail(Errc::internal, "BN_check_prime failed");
    }
    return rc == 1;
}

} // namespace zerotwo::core
