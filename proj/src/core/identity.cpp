#include "core/identity.hpp"

#include "core/errors.hpp"

namespace zerotwo::core {

void validate_user_identifier(std::string_view iu) {
    if (iu.empty()) {
        fail(Errc::invalid_argument, "user identifier is empty");
    }
    for (unsigned char c : iu) {
        if (c < 0x20 || c == 0x7f) {
            fail(Errc::invalid_argument, "user identifier contains a control character");
        }
    }
}

void validate_identity(const IdentityPair& identity) {
    validate_user_identifier(identity.iu);
    if (identity.is.empty()) {
        fail(Errc::invalid_argument, "server identifier is empty");
    }
    for (unsigned char c : identity.is) {
        if ((c >= 'A' && c <= 'Z') || c < 0x21 || c == 0x7f) {
            fail(Errc::invalid_argument, "server identifier must be a lower-case domain name");
        }
    }
}

bool looks_like_email(std::string_view iu) {
    const auto at = iu.find('@');
    return at != std::string_view::npos && at > 0 && at + 1 < iu.size();
}

MasterSecret::MasterSecret(Bytes value, SecretOrigin origin)
    : value_(std::move(value)), origin_(origin) {
    if (value_.empty()) {
        fail(Errc::invalid_argument, "master secret is empty");
    }
}

MasterSecret MasterSecret::passphrase(std::string_view text) {
    const auto view = as_bytes(text);
    return MasterSecret(Bytes(view.begin(), view.end()), SecretOrigin::generated_passphrase);
}

MasterSecret MasterSecret::imported(ByteView raw) {
    return MasterSecret(Bytes(raw.begin(), raw.end()), SecretOrigin::imported);
}

MasterSecret::~MasterSecret() { secure_wipe(value_); }

} // namespace zerotwo::core
