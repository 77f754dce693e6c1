#include "server/schema.hpp"

#include <algorithm>

namespace zerotwo::server {

namespace {

std::vector<std::string_view> split_path(std::string_view path) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < path.size()) {
        if (path[pos] == '/') {
            ++pos;
            continue;
        }
        const auto next = path.find('/', pos);
        const auto end = next == std::string_view::npos ? path.size() : next;
        out.push_back(path.substr(pos, end - pos));
        pos = end;
    }
    return out;
}

bool is_hex(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
    });
}

} // namespace

const std::vector<EndpointSpec>& api_schema() {
    using F = FieldType;
    static const std::vector<EndpointSpec> schema = {
        {"POST", "/signup", {{"iu", F::text}}, {}, false},
        {"POST", "/enroll", {{"iu", F::text}, {"v", F::hex}}, {}, false},
        {"POST", "/login/init", {{"iu", F::text}}, {}, false},
        {"POST",
         "/login/complete",
         {{"login_id", F::text}, {"iu", F::text}, {"A", F::hex}, {"M", F::hex}, {"d", F::integer}},
         {},
         false},
        {"GET", "/login/status/{login_id}", {}, {"login_id"}, false},
        {"GET", "/login/challenge/{login_id}", {}, {"login_id"}, false},
        {"POST", "/authz/request", {{"session_id", F::text}, {"o", F::text}}, {}, false},
        {"POST", "/authz/confirm", {{"auth_id", F::text}, {"M", F::hex}}, {}, false},
        {"GET", "/authz/pending/{session_id}", {}, {"session_id"}, false},
        {"GET", "/authz/status/{auth_id}", {}, {"auth_id"}, false},
        {"POST", "/logout", {{"session_id", F::text}, {"M", F::hex}}, {}, false},
        {"POST", "/logout/browser", {{"browser_token", F::text}}, {}, false},
        {"GET", "/session", {}, {}, true},
    };
    return schema;
}

std::optional<RouteMatch> match_route(std::string_view method, std::string_view path) {
    const auto query = path.find('?');
    if (query != std::string_view::npos) {
        path = path.substr(0, query);
    }
    const auto segments = split_path(path);
    for (const auto& endpoint : api_schema()) {
        if (endpoint.method != method) {
            continue;
        }
        const auto pattern = split_path(endpoint.path);
        if (pattern.size() != segments.size()) {
            continue;
        }
        RouteMatch match{&endpoint, {}};
        bool ok = true;
        for (std::size_t i = 0; i < pattern.size() && ok; ++i) {
            if (pattern[i].starts_with('{')) {
                if (segments[i].empty()) ok = false;
                match.params.emplace_back(segments[i]);
            } else if (pattern[i] != segments[i]) {
                ok = false;
            }
        }
        if (ok) {
            return match;
        }
    }
    return std::nullopt;
}

std::optional<std::string> check_body(const EndpointSpec& endpoint, const nlohmann::json& body) {
    if (endpoint.body.empty()) {
        return std::nullopt;
    }
    if (!body.is_object()) {
        return "request body must be a JSON object";
    }
    for (const auto& [key, value] : body.items()) {
        const bool known = std::any_of(endpoint.body.begin(), endpoint.body.end(),
                                       [&](const FieldSpec& f) { return f.name == key; });
        if (!known) {
            return "unexpected field: " + key;
        }
    }
    for (const auto& field : endpoint.body) {
        const auto it = body.find(field.name);
        if (it == body.end()) {
            return "missing field: " + field.name;
        }
        switch (field.type) {
        case FieldType::text:
            if (!it->is_string()) return "field must be text: " + field.name;
            break;
        case FieldType::hex:
            if (!it->is_string() || !is_hex(it->get<std::string>()))
                return "field must be hex: " + field.name;
            break;
        case FieldType::integer:
            if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0))
                return "field must be a non-negative integer: " + field.name;
            break;
        }
    }
    return std::nullopt;
}

} // namespace zerotwo::server
