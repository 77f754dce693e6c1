#pragma once

#include "core/bigint.hpp"
#include "core/hash.hpp"

#include <optional>
#include <string>

namespace zerotwo::core {

struct GroupConstants {
    BigInt k;
    Digest l;
};

// k = H(n, g) as an integer; l = H(n) xor H(g).
GroupConstants derive_group_constants(const BigInt& n, const BigInt& g);

// The public algebraic setting. Production uses a pinned 2048-bit safe prime;
// test profiles may inject k and l (and the scrambler u) so that hand-checked
// small-group transcripts can be reproduced.
struct GroupProfile {
    std::string name;
    BigInt n;
    BigInt g;
    BigInt k;
    Digest l{};
    bool injected = false;
    std::optional<BigInt> injected_u;

    static GroupProfile production();
    static GroupProfile with_derived_constants(std::string name, BigInt n, BigInt g);
    static GroupProfile with_injected_constants(std::string name, BigInt n, BigInt g, BigInt k,
                                                Digest l, std::optional<BigInt> u = std::nullopt);
    // n = 23, g = 5; k defaults to the derived value and l is always derived.
    static GroupProfile small_test(std::optional<BigInt> k = std::nullopt,
                                   std::optional<BigInt> u = std::nullopt);

    std::size_t modulus_bytes() const { return n.byte_length(); }
};

// n prime and (n - 1)/2 prime.
bool is_safe_prime(const BigInt& n);

// For a safe prime n = 2q + 1 the only possible element orders are 1, 2, q
// and 2q, so g generates the full group iff g^2 != 1 and g^q != 1.
bool is_primitive_root(const BigInt& g, const BigInt& safe_prime);

// Throws Errc::config when the profile violates its invariants. The pinned
// production modulus is trusted and only its constants are rechecked.
void validate_group(const GroupProfile& group);

} // namespace zerotwo::core
