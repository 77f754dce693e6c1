#include "core/errors.hpp"

namespace zerotwo {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::encoding: return "encoding-error";
    case Errc::parse: return "parse-error";
    case Errc::invalid_secret: return "invalid-secret";
    case Errc::protocol_violation: return "protocol-violation";
    case Errc::authentication_failed: return "authentication-failed";
    case Errc::session_expired: return "session-expired";
    case Errc::duration_rejected: return "duration-rejected";
    case Errc::not_found: return "not-found";
    case Errc::conflict: return "conflict";
    case Errc::gone: return "gone";
    case Errc::denied: return "denied";
    case Errc::throttled: return "throttled";
    case Errc::tamper_detected: return "tamper-detected";
    case Errc::aborted: return "aborted";
    case Errc::network: return "network-error";
    case Errc::io: return "io-error";
    case Errc::config: return "configuration-error";
    case Errc::scenario_failed: return "scenario-failure";
    case Errc::internal: return "internal-error";
    }
    return "unknown";
}

} // namespace zerotwo
