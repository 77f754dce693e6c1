#pragma once

#include "core/bigint.hpp"
#include "core/group.hpp"
#include "core/hash.hpp"
#include "core/identity.hpp"
#include "core/random.hpp"

#include <cstdint>
#include <string>

namespace zerotwo::core {

/// Effective secret x = H(I_u, I_s, p) as a 256-bit integer. Lives only inside
/// the functions that need it and is never serialized.
struct EffectiveSecret {
    BigInt x;
};

struct ServerEphemeral {
    BigInt b; // private
    BigInt B; // public
};

/// What the authenticator produces for one login. K stays on the device.
struct ClientResponse {
    BigInt A;
    Digest M{};
    std::uint64_t d = 0;
    Digest K{};
};

/// An established session key and its validity window (seconds).
struct SessionKey {
    Digest K{};
    std::int64_t established_at = 0;
    std::uint64_t duration = 0;

    /// valid iff now < established_at + duration
    bool valid_at(std::int64_t now) const noexcept;
};

EffectiveSecret derive_x(const IdentityPair& identity, const MasterSecret& p);

/// v = g^x mod n. Throws Errc::invalid_secret when x = 0 or v lands on 0 or 1.
BigInt compute_verifier(const EffectiveSecret& x, const GroupProfile& group);

/// B = (k*v + g^b) mod n for a caller-chosen b in [1, n-2].
ServerEphemeral server_ephemeral_from(const BigInt& v, const BigInt& b, const GroupProfile& group);

/// Samples b uniformly from [1, n-2], resampling while B = 0 (at most 128
/// draws).
ServerEphemeral server_begin_login(const BigInt& v, const GroupProfile& group, RandomSource& rng);

/// u = H(A, B), or the injected value on test profiles.
BigInt scrambler(const BigInt& A, const BigInt& B, const GroupProfile& group);

/// Client side S = (B - k*g^x)^(a + u*x) mod n. The subtraction is taken
/// mod n. Throws Errc::protocol_violation for B = 0, a zero base, or u = 0.
BigInt client_premaster(const BigInt& B, const BigInt& x, const BigInt& a, const BigInt& u,
                        const GroupProfile& group);

/// Server side S = (A * v^u)^b mod n. Throws Errc::protocol_violation for
/// A = 0 or u = 0.
BigInt server_premaster(const BigInt& A, const BigInt& v, const BigInt& u, const BigInt& b,
                        const GroupProfile& group);

/// K = H(S).
Digest session_key_from(const BigInt& S);

/// M = H_K(l, I_u, I_s, A, B, d) with d as 8 bytes big-endian.
Digest login_proof(const Digest& K, const IdentityPair& identity, const BigInt& A, const BigInt& B,
                   std::uint64_t d, const GroupProfile& group);

/// Full client computation: derives x, samples a, and builds (A, M, K).
ClientResponse client_respond(const IdentityPair& identity, const MasterSecret& p, const BigInt& B,
                              std::uint64_t d, const GroupProfile& group, RandomSource& rng);

/// Same as client_respond with x and a supplied by the caller.
ClientResponse client_respond_with(const IdentityPair& identity, const EffectiveSecret& x,
                                   const BigInt& a, const BigInt& B, std::uint64_t d,
                                   const GroupProfile& group);

/// Verifies M and returns the session key. Failures of the MAC comparison
/// are reported as Errc::authentication_failed with a fixed message.
SessionKey server_complete_login(const IdentityPair& identity, const BigInt& v,
                                 const ServerEphemeral& eph, const BigInt& A, const Digest& M,
                                 std::uint64_t d, const GroupProfile& group, std::int64_t now,
                                 std::uint64_t max_duration);

using Nonce = std::array<std::uint8_t, 16>;

/// H_K(o, c). Throws Errc::session_expired once the key is no longer valid.
Digest mac_authorize(const SessionKey& key, std::string_view operation, const Nonce& nonce,
                     std::int64_t now);

/// H_K("logout").
Digest mac_logout(const SessionKey& key, std::int64_t now);

/// Expiry-agnostic forms, used by the server once it has decided validity.
Digest authorization_mac(const Digest& K, std::string_view operation, const Nonce& nonce);
Digest logout_mac(const Digest& K);

/// First 8 bytes of H(I_u, I_s, B) as xxxx-xxxx-xxxx-xxxx.
std::string fingerprint(const IdentityPair& identity, const BigInt& B, const GroupProfile& group);
std::string render_fingerprint(std::span<const std::uint8_t, 8> bytes);

inline constexpr std::string_view kLogoutOperation = "logout";

} // namespace zerotwo::core
