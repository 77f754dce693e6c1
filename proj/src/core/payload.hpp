#pragma once

#include <string>
#include <string_view>
#include <variant>

namespace zerotwo::core {

// Out-of-band payloads (the text inside a QR code). Serialized as compact
// JSON {"v":1,"t":<type>, ...}.
struct EnrollPayload {
    std::string iu;
    std::string is;
    std::string enroll_url;

    friend bool operator==(const EnrollPayload&, const EnrollPayload&) = default;
};

struct LoginPayload {
    std::string login_id;
    std::string iu;
    std::string is;
    std::string B; // lowercase hex
    std::string fingerprint;

    friend bool operator==(const LoginPayload&, const LoginPayload&) = default;
};

struct AuthzPayload {
    std::string auth_id;
    std::string session_id;
    std::string o;
    std::string c; // lowercase hex, 16 bytes

    friend bool operator==(const AuthzPayload&, const AuthzPayload&) = default;
};

using Payload = std::variant<EnrollPayload, LoginPayload, AuthzPayload>;

inline constexpr int kPayloadVersion = 1;

std::string encode_payload(const Payload& payload);

// Throws Errc::parse on malformed JSON, unknown version or type, or missing
// fields.
Payload decode_payload(std::string_view text);

template <typename T>
T decode_payload_as(std::string_view text);

} // namespace zerotwo::core
