#include "core/payload.hpp"

#include "core/errors.hpp"

#include <json.hpp>

namespace zerotwo::core {

namespace {

using nlohmann::json;

std::string field(const json& j, const char* name) {
    const auto it = j.find(name);
    if (it == j.end() || !it->is_string()) {
        fail(Errc::parse, std::string("payload field missing or not text: ") + name);
    }
    return it->get<std::string>();
}

} // namespace

std::string encode_payload(const Payload& payload) {
    json j;
    j["v"] = kPayloadVersion;
    std::visit(
        [&j](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, EnrollPayload>) {
                j["t"] = "enroll";
                j["iu"] = p.iu;
                j["is"] = p.is;
                j["enroll_url"] = p.enroll_url;
            } else if constexpr (std::is_same_v<T, LoginPayload>) {
                j["t"] = "login";
                j["login_id"] = p.login_id;
                j["iu"] = p.iu;
                j["is"] = p.is;
                j["B"] = p.B;
                j["fingerprint"] = p.fingerprint;
            } else {
                j["t"] = "authz";
                j["auth_id"] = p.auth_id;
                j["session_id"] = p.session_id;
                j["o"] = p.o;
                j["c"] = p.c;
            }
        },
        payload);
    return j.dump();
}

Payload decode_payload(std::string_view text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        fail(Errc::parse, "payload is not a JSON object");
    }
    const auto version = j.find("v");
    if (version == j.end() || !version->is_number_integer() || version->get<int>() != kPayloadVersion) {
        fail(Errc::parse, "unsupported payload version");
    }
    const std::string type = field(j, "t");
    if (type == "enroll") {
        return EnrollPayload{field(j, "iu"), field(j, "is"), field(j, "enroll_url")};
    }
    if (type == "login") {
        return LoginPayload{field(j, "login_id"), field(j, "iu"), field(j, "is"), field(j, "B"),
                            field(j, "fingerprint")};
    }
    if (type == "authz") {
        return AuthzPayload{field(j, "auth_id"), field(j, "session_id"), field(j, "o"),
                            field(j, "c")};
    }
    fail(Errc::parse, "unknown payload type: " + type);
}

template <typename T>
T decode_payload_as(std::string_view text) {
    auto payload = decode_payload(text);
    if (auto* p = std::get_if<T>(&payload)) {
        return std::move(*p);
    }
    fail(Errc::parse, "payload has the wrong type");
}

template EnrollPayload decode_payload_as<EnrollPayload>(std::string_view);
template LoginPayload decode_payload_as<LoginPayload>(std::string_view);
template AuthzPayload decode_payload_as<AuthzPayload>(std::string_view);

} // namespace zerotwo::core
