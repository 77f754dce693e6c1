#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zerotwo {

// Error categories shared by every layer. The C API maps these one-to-one
// onto zt_status values and the HTTP router onto status codes.
enum class Errc {
    invalid_argument,
    encoding,
    parse,
    invalid_secret,
    protocol_violation,
    authentication_failed,
    session_expired,
    duration_rejected,
    not_found,
    conflict,
    gone,
    denied,
    throttled,
    tamper_detected,
    aborted,
    network,
    io,
    config,
    scenario_failed,
    internal,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace zerotwo
