#pragma once

#include "core/encoding.hpp"

#include <string>

namespace zerotwo::core {

// (I_u, I_s): user identifier and server domain.
struct IdentityPair {
    std::string iu;
    std::string is;

    friend bool operator==(const IdentityPair&, const IdentityPair&) = default;
};

// Throws Errc::invalid_argument unless both are non-empty, iu has no control
// characters and is contains no upper-case ASCII.
void validate_identity(const IdentityPair& identity);
void validate_user_identifier(std::string_view iu);
bool looks_like_email(std::string_view iu);

enum class SecretOrigin { generated_passphrase, imported };

// The master secret p. Wiped on destruction.
class MasterSecret {
public:
    MasterSecret(Bytes value, SecretOrigin origin);
    static MasterSecret passphrase(std::string_view text);
    static MasterSecret imported(ByteView raw);

    MasterSecret(const MasterSecret&) = default;
    MasterSecret(MasterSecret&&) noexcept = default;
    MasterSecret& operator=(const MasterSecret&) = default;
    MasterSecret& operator=(MasterSecret&&) noexcept = default;
    ~MasterSecret();

    ByteView bytes() const noexcept { return value_; }
    std::string_view text() const noexcept {
        return {reinterpret_cast<const char*>(value_.data()), value_.size()};
    }
    SecretOrigin origin() const noexcept { return origin_; }

private:
    Bytes value_;
    SecretOrigin origin_;
};

} // namespace zerotwo::core
