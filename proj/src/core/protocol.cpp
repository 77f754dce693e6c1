#include "core/protocol.hpp"

#include "core/errors.hpp"

namespace zerotwo::core {

namespace {

const BigInt& one() {
    static const BigInt value(1);
    return value;
}

void require_public_in_range(const BigInt& value, const GroupProfile& group, const char* what) {
    if (value.is_zero() || value >= group.n) {
        fail(Errc::protocol_violation, std::string(what) + " is not in (0, n)");
    }
}

void require_private_in_range(const BigInt& value, const GroupProfile& group, const char* what) {
    if (value < one() || value > group.n - BigInt(2)) {
        fail(Errc::invalid_argument, std::string(what) + " is not in [1, n-2]");
    }
}

void wipe(Digest& d) noexcept { secure_wipe(d); }

} // namespace

bool SessionKey::valid_at(std::int64_t now) const noexcept {
    if (now < established_at) {
        return duration > 0;
    }
    const auto elapsed = static_cast<std::uint64_t>(now - established_at);
    return elapsed < duration;
}

EffectiveSecret derive_x(const IdentityPair& identity, const MasterSecret& p) {
    validate_identity(identity);
    auto digest = hash_digest({as_bytes(identity.iu), as_bytes(identity.is), p.bytes()});
    EffectiveSecret out{int_from_digest(digest)};
    wipe(digest);
    if (out.x.is_zero()) {
        fail(Errc::invalid_secret, "effective secret is zero; choose another master secret");
    }
    return out;
}

BigInt compute_verifier(const EffectiveSecret& x, const GroupProfile& group) {
    if (x.x.is_zero()) {
        fail(Errc::invalid_secret, "effective secret is zero");
    }
    BigInt v = mod_exp(group.g, x.x, group.n);
    if (v.is_zero() || v.is_one()) {
        fail(Errc::invalid_secret, "verifier degenerates to 0 or 1");
    }
    return v;
}

ServerEphemeral server_ephemeral_from(const BigInt& v, const BigInt& b, const GroupProfile& group) {
    if (v <= one() || v >= group.n) {
        fail(Errc::invalid_argument, "verifier is not in [2, n-1]");
    }
    require_private_in_range(b, group, "b");
    BigInt B = mod_add(mod_mul(group.k, v, group.n), mod_exp(group.g, b, group.n), group.n);
    if (B.is_zero()) {
        fail(Errc::protocol_violation, "server public key is zero");
    }
    return {b, std::move(B)};
}

ServerEphemeral server_begin_login(const BigInt& v, const GroupProfile& group, RandomSource& rng) {
    const BigInt upper = group.n - BigInt(2);
    for (int attempt = 0; attempt < 128; ++attempt) {
        BigInt b = uniform_between(rng, one(), upper);
        try {
            return server_ephemeral_from(v, b, group);
        } catch (const Error& e) {
            if (e.code() != Errc::protocol_violation) {
                throw;
            }
        }
    }
    fail(Errc::internal, "could not sample a non-zero server public key");
}

BigInt scrambler(const BigInt& A, const BigInt& B, const GroupProfile& group) {
    if (group.injected_u) {
        return *group.injected_u;
    }
    const Bytes a_enc = encode_int(A);
    const Bytes b_enc = encode_int(B);
    return int_from_digest(hash_digest({a_enc, b_enc}));
}

BigInt client_premaster(const BigInt& B, const BigInt& x, const BigInt& a, const BigInt& u,
                        const GroupProfile& group) {
    require_public_in_range(B, group, "B");
    if (u.is_zero()) {
        fail(Errc::protocol_violation, "scrambling parameter is zero");
    }
    const BigInt kgx = mod_mul(group.k, mod_exp(group.g, x, group.n), group.n);
    const BigInt base = mod_sub(B, kgx, group.n);
    if (base.is_zero()) {
        fail(Errc::protocol_violation, "B - k*g^x is zero");
    }
    return mod_exp(base, a + u * x, group.n);
}

BigInt server_premaster(const BigInt& A, const BigInt& v, const BigInt& u, const BigInt& b,
                        const GroupProfile& group) {
    require_public_in_range(A, group, "A");
    if (u.is_zero()) {
        fail(Errc::protocol_violation, "scrambling parameter is zero");
    }
    const BigInt base = mod_mul(A, mod_exp(v, u, group.n), group.n);
    return mod_exp(base, b, group.n);
}

Digest session_key_from(const BigInt& S) {
    Bytes s_enc = encode_int(S);
    const Digest K = hash_digest({s_enc});
    secure_wipe(s_enc);
    return K;
}

Digest login_proof(const Digest& K, const IdentityPair& identity, const BigInt& A, const BigInt& B,
                   std::uint64_t d, const GroupProfile& group) {
    const Bytes a_enc = encode_int(A);
    const Bytes b_enc = encode_int(B);
    const Bytes d_enc = be64(d);
    return hmac_digest(K, {group.l, as_bytes(identity.iu), as_bytes(identity.is), a_enc, b_enc,
                           d_enc});
}

ClientResponse client_respond_with(const IdentityPair& identity, const EffectiveSecret& x,
                                   const BigInt& a, const BigInt& B, std::uint64_t d,
                                   const GroupProfile& group) {
    validate_identity(identity);
    require_public_in_range(B, group, "B");
    require_private_in_range(a, group, "a");

    ClientResponse out;
    out.A = mod_exp(group.g, a, group.n);
    require_public_in_range(out.A, group, "A");
    const BigInt u = scrambler(out.A, B, group);
    BigInt S = client_premaster(B, x.x, a, u, group);
    out.K = session_key_from(S);
    S = BigInt();
    out.d = d;
    out.M = login_proof(out.K, identity, out.A, B, d, group);
    return out;
}

ClientResponse client_respond(const IdentityPair& identity, const MasterSecret& p, const BigInt& B,
                              std::uint64_t d, const GroupProfile& group, RandomSource& rng) {
    require_public_in_range(B, group, "B");
    EffectiveSecret x = derive_x(identity, p);
    BigInt a = uniform_between(rng, one(), group.n - BigInt(2));
    auto response = client_respond_with(identity, x, a, B, d, group);
    x.x = BigInt();
    a = BigInt();
    return response;
}

SessionKey server_complete_login(const IdentityPair& identity, const BigInt& v,
                                 const ServerEphemeral& eph, const BigInt& A, const Digest& M,
                                 std::uint64_t d, const GroupProfile& group, std::int64_t now,
                                 std::uint64_t max_duration) {
    require_public_in_range(A, group, "A");
    if (d == 0 || d > max_duration) {
        fail(Errc::duration_rejected, "session duration outside (0, " +
                                          std::to_string(max_duration) + "] seconds");
    }
    const BigInt u = scrambler(A, eph.B, group);
    BigInt S = server_premaster(A, v, u, eph.b, group);
    SessionKey key{session_key_from(S), now, d};
    S = BigInt();
    Digest expected = login_proof(key.K, identity, A, eph.B, d, group);
    const bool ok = constant_time_equals(expected, M);
    wipe(expected);
    if (!ok) {
        wipe(key.K);
        fail(Errc::authentication_failed, "authentication failed");
    }
    return key;
}

Digest authorization_mac(const Digest& K, std::string_view operation, const Nonce& nonce) {
    return hmac_digest(K, {as_bytes(operation), nonce});
}

Digest logout_mac(const Digest& K) { return hmac_digest(K, {as_bytes(kLogoutOperation)}); }

Digest mac_authorize(const SessionKey& key, std::string_view operation, const Nonce& nonce,
                     std::int64_t now) {
    if (!key.valid_at(now)) {
        fail(Errc::session_expired, "session key has expired");
    }
    return authorization_mac(key.K, operation, nonce);
}

Digest mac_logout(const SessionKey& key, std::int64_t now) {
    if (!key.valid_at(now)) {
        fail(Errc::session_expired, "session key has expired");
    }
    return logout_mac(key.K);
}

std::string render_fingerprint(std::span<const std::uint8_t, 8> bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(19);
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        if (i > 0 && i % 2 == 0) {
            out.push_back('-');
        }
        out.push_back(digits[bytes[i] >> 4]);
        out.push_back(digits[bytes[i] & 0x0f]);
    }
    return out;
}

std::string fingerprint(const IdentityPair& identity, const BigInt& B, const GroupProfile& group) {
    require_public_in_range(B, group, "B");
    const Bytes b_enc = encode_int(B);
    const Digest digest = hash_digest({as_bytes(identity.iu), as_bytes(identity.is), b_enc});
    return render_fingerprint(std::span<const std::uint8_t, 8>(digest.data(), 8));
}

} // namespace zerotwo::core
