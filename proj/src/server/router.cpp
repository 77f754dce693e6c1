#include "core/errors.hpp"
#include "server/schema.hpp"
#include "server/server.hpp"

#include <json.hpp>

#include <cctype>

namespace zerotwo::server {

namespace {

using nlohmann::json;

int status_for(Errc code) {
    switch (code) {
    case Errc::invalid_argument:
    case Errc::encoding:
    case Errc::parse:
    case Errc::invalid_secret:
        return 400;
    case Errc::authentication_failed:
    case Errc::protocol_violation:
    case Errc::denied:
        return 401;
    case Errc::not_found: return 404;
    case Errc::conflict: return 409;
    case Errc::gone: return 410;
    case Errc::duration_rejected: return 422;
    case Errc::throttled: return 429;
    case Errc::session_expired: return 440;
    default: return 500;
    }
}

core::Response json_response(int status, const json& body) { return {status, body.dump()}; }

core::Response error_response(int status, std::string_view error) {
    return json_response(status, json{{"error", error}});
}

core::Response no_content() { return {204, {}}; }

// A MAC of the wrong shape simply fails comparison.
core::Bytes mac_bytes(const std::string& hex) {
    if (hex.size() % 2 != 0) {
        return {};
    }
    return core::hex_decode(hex);
}

std::string bearer_token(const core::Request& request) {
    for (const auto& [name, value] : request.headers) {
        std::string lower(name);
        for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        if (lower == "authorization" && value.rfind("Bearer ", 0) == 0) {
            return value.substr(7);
        }
    }
    return {};
}

} // namespace

core::Response Server::handle(const core::Request& request) {
    const auto route = match_route(request.method, request.path);
    if (!route) {
        return error_response(404, "no such endpoint");
    }
    const auto& path = route->endpoint->path;
    const auto& params = route->params;

    json body;
    if (!route->endpoint->body.empty()) {
        body = json::parse(request.body, nullptr, false);
        if (body.is_discarded()) {
            return error_response(400, "request body is not JSON");
        }
        if (auto problem = check_body(*route->endpoint, body)) {
            return error_response(400, *problem);
        }
    }
    auto text = [&body](const char* name) { return body.at(name).get<std::string>(); };

    try {
        if (path == "/signup") {
            const auto challenge = signup_init(text("iu"));
            return json_response(200, {{"iu", challenge.iu},
                                       {"is", challenge.is},
                                       {"enroll_url", challenge.enroll_url},
                                       {"qr_payload", challenge.qr_payload()}});
        }
        if (path == "/enroll") {
            enroll(text("iu"), core::BigInt::from_hex(text("v")));
            return no_content();
        }
        if (path == "/login/init") {
            const auto c = login_init(text("iu"));
            return json_response(200, {{"login_id", c.login_id},
                                       {"iu", c.iu},
                                       {"is", c.is},
                                       {"B", c.B},
                                       {"fingerprint", c.fingerprint}});
        }
        if (path == "/login/complete") {
            const auto M = mac_bytes(text("M"));
            const auto done = login_complete(text("login_id"), text("iu"),
                                             core::BigInt::from_hex(text("A")), M,
                                             body.at("d").get<std::uint64_t>());
            return json_response(200, {{"session_id", done.session_id},
                                       {"browser_token", done.browser_token}});
        }
        if (path == "/login/status/{login_id}") {
            const auto status = login_status(params.at(0));
            json out{{"state", login_state_name(status.state)}};
            if (status.state == LoginStatus::State::ok) {
                out["browser_token"] = status.browser_token;
                out["session_id"] = status.session_id;
                out["expires_at"] = status.expires_at;
            }
            return json_response(200, out);
        }
        if (path == "/login/challenge/{login_id}") {
            const auto c = login_challenge(params.at(0));
            return json_response(200, {{"login_id", c.login_id},
                                       {"iu", c.iu},
                                       {"is", c.is},
                                       {"B", c.B},
                                       {"fingerprint", c.fingerprint},
                                       {"qr_payload", c.qr_payload()}});
        }
        if (path == "/authz/request") {
            const auto r = request_authorization(text("session_id"), text("o"));
            return json_response(200, {{"auth_id", r.auth_id}, {"o", r.o}, {"c", r.c}});
        }
        if (path == "/authz/confirm") {
            const auto M = mac_bytes(text("M"));
            confirm_authorization(text("auth_id"), M);
            return no_content();
        }
        if (path == "/authz/pending/{session_id}") {
            json list = json::array();
            for (const auto& r : pending_authorizations(params.at(0))) {
                list.push_back({{"auth_id", r.auth_id},
                                {"session_id", r.session_id},
                                {"o", r.o},
                                {"c", r.c}});
            }
            return json_response(200, {{"requests", std::move(list)}});
        }
        if (path == "/authz/status/{auth_id}") {
            return json_response(200, {{"state", authz_state_name(authorization_state(params.at(0)))}});
        }
        if (path == "/logout") {
            const auto M = mac_bytes(text("M"));
            logout(text("session_id"), M);
            return no_content();
        }
        if (path == "/logout/browser") {
            browser_logout(text("browser_token"));
            return no_content();
        }
        if (path == "/session") {
            const auto s = check_browser_token(bearer_token(request));
            return json_response(200, {{"iu", s.iu},
                                       {"session_id", s.session_id},
                                       {"expires_at", s.expires_at}});
        }
    } catch (const Error& e) {
        return error_response(status_for(e.code()), errc_name(e.code()));
    } catch (const json::exception&) {
        return error_response(400, "malformed request");
    } catch (const std::exception&) {
        return error_response(500, "internal-error");
    }
    return error_response(404, "no such endpoint");
}

} // namespace zerotwo::server
