#include "core/group.hpp"

#include "core/errors.hpp"

namespace zerotwo::core {

namespace {

// 2048-bit safe prime with generator 2 (the RFC 5054 SRP group). 2 is a
// quadratic non-residue here (n = 3 mod 8), hence a primitive root.
constexpr std::string_view kProductionModulusHex =
    "AC6BDB41324A9A9BF166DE5E1389582FAF72B6651987EE07FC319294"
    "3DB56050A37329CBB4A099ED8193E0757767A13DD52312AB4B03310D"
    "CD7F48A9DA04FD50E8083969EDB767B0CF6095179A163AB3661A05FB"
    "D5FAAAE82918A9962F0B93B855F97993EC975EEAA80D740ADBF4FF74"
    "7359D041D5C33EA71D281E446B14773BCA97B43A23FB801676BD207A"
    "436C6481F1D2B9078717461A5B9D32E688F87748544523B524B0D57D"
    "5EA77A2775D2ECFA032CFBDBF52FB3786160279004E57AE6AF874E73"
    "03CE53299CCC041C7BC308D82A5698F3A8D0C38271AE35F8E9DBFBB6"
    "94B5C803D89F7AE435DE236D525F54759B65E372FCD68EF20FA7111F"
    "9E4AFF73";

} // namespace

GroupConstants derive_group_constants(const BigInt& n, const BigInt& g) {
    const Bytes n_enc = encode_int(n);
    const Bytes g_enc = encode_int(g);
    GroupConstants out{int_from_digest(hash_digest({n_enc, g_enc})), {}};
    out.l = xor_digests(hash_digest({n_enc}), hash_digest({g_enc}));
    return out;
}

GroupProfile GroupProfile::production() {
    static const GroupProfile profile =
        with_derived_constants("rfc5054-2048", BigInt::from_hex(kProductionModulusHex), BigInt(2));
    return profile;
}

GroupProfile GroupProfile::with_derived_constants(std::string name, BigInt n, BigInt g) {
    GroupProfile p;
    p.name = std::move(name);
    auto constants = derive_group_constants(n, g);
    p.n = std::move(n);
    p.g = std::move(g);
    p.k = std::move(constants.k);
    p.l = constants.l;
    return p;
}

GroupProfile GroupProfile::with_injected_constants(std::string name, BigInt n, BigInt g, BigInt k,
                                                   Digest l, std::optional<BigInt> u) {
    GroupProfile p;
    p.name = std::move(name);
    p.n = std::move(n);
    p.g = std::move(g);
    p.k = std::move(k);
    p.l = l;
    p.injected = true;
    p.injected_u = std::move(u);
    return p;
}

GroupProfile GroupProfile::small_test(std::optional<BigInt> k, std::optional<BigInt> u) {
    if (!k && !u) {
        return with_derived_constants("small-23", BigInt(23), BigInt(5));
    }
    const auto derived = derive_group_constants(BigInt(23), BigInt(5));
    return with_injected_constants("small-23-injected", BigInt(23), BigInt(5),
                                   k ? *k : derived.k, derived.l, std::move(u));
}

bool is_safe_prime(const BigInt& n) {
    if (n < BigInt(5) || !n.bit(0)) {
        return false;
    }
    return is_probable_prime(n) && is_probable_prime((n - BigInt(1)) / BigInt(2));
}

bool is_primitive_root(const BigInt& g, const BigInt& safe_prime) {
    const BigInt one(1);
    if (g <= one || g >= safe_prime) {
        return false;
    }
    const BigInt q = (safe_prime - one) / BigInt(2);
    return !mod_exp(g, BigInt(2), safe_prime).is_one() && !mod_exp(g, q, safe_prime).is_one();
}

void validate_group(const GroupProfile& group) {
    if (group.n.is_zero() || group.g.is_zero() || group.g >= group.n) {
        fail(Errc::config, "group " + group.name + ": g must satisfy 0 < g < n");
    }
    if (group.injected_u && !group.injected) {
        fail(Errc::config, "group " + group.name + ": injected u on a derived profile");
    }
    if (!group.injected) {
        const auto constants = derive_group_constants(group.n, group.g);
        if (!(constants.k == group.k) || constants.l != group.l) {
            fail(Errc::config, "group " + group.name + ": k or l do not match H(n, g)");
        }
    }
    if (static const auto pinned = GroupProfile::production(); group.n == pinned.n) {
        return;
    }
    if (!is_safe_prime(group.n)) {
        fail(Errc::config, "group " + group.name + ": n is not a safe prime");
    }
    if (!is_primitive_root(group.g, group.n)) {
        fail(Errc::config, "group " + group.name + ": g is not a primitive root");
    }
}

} // namespace zerotwo::core
