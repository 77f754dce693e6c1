#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

struct bignum_st;

namespace zerotwo::core {

// Owning wrapper around an OpenSSL BIGNUM. Values are non-negative; every
// arithmetic helper that takes a modulus returns a fully reduced result.
// Storage is cleared on destruction.
class BigInt {
public:
    BigInt();
    BigInt(std::uint64_t value); // NOLINT(google-explicit-constructor)
    BigInt(const BigInt& other);
    BigInt(BigInt&& other) noexcept;
    BigInt& operator=(const BigInt& other);
    BigInt& operator=(BigInt&& other) noexcept;
    ~BigInt();

    static BigInt from_bytes(std::span<const std::uint8_t> big_endian);
    // Accepts upper or lower case; throws Errc::parse on anything else.
    static BigInt from_hex(std::string_view hex);

    // Minimal big-endian encoding; zero encodes as a single 0x00 byte.
    std::vector<std::uint8_t> to_bytes() const;
    std::string to_hex() const;

    bool is_zero() const;
    bool is_one() const;
    int bit_length() const;
    std::size_t byte_length() const;
    bool bit(int index) const;
    std::uint64_t to_u64() const;

    friend bool operator==(const BigInt& a, const BigInt& b);
    friend std::strong_ordering operator<=>(const BigInt& a, const BigInt& b);

    friend BigInt operator+(const BigInt& a, const BigInt& b);
    friend BigInt operator-(const BigInt& a, const BigInt& b); // requires a >= b
    friend BigInt operator*(const BigInt& a, const BigInt& b);
    friend BigInt operator%(const BigInt& a, const BigInt& m);
    friend BigInt operator/(const BigInt& a, const BigInt& d);

    BigInt with_bit_flipped(int index) const;

    bignum_st* raw() noexcept { return bn_; }
    const bignum_st* raw() const noexcept { return bn_; }

private:
    bignum_st* bn_;
};

BigInt mod_exp(const BigInt& base, const BigInt& exponent, const BigInt& modulus);
BigInt mod_mul(const BigInt& a, const BigInt& b, const BigInt& modulus);
BigInt mod_add(const BigInt& a, const BigInt& b, const BigInt& modulus);
BigInt mod_sub(const BigInt& a, const BigInt& b, const BigInt& modulus);

// Miller-Rabin with OpenSSL's default round count for the size.
bool is_probable_prime(const BigInt& candidate);

} // namespace zerotwo::core
