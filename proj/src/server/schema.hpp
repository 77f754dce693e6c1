#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace zerotwo::server {

enum class FieldType { text, hex, integer };

struct FieldSpec {
    std::string name;
    FieldType type;
};

// One entry per route the server answers. Request bodies are checked
// against `body` before any handler runs: every listed field must be present
// with the right type and no other field is accepted.
struct EndpointSpec {
    std::string method;
    std::string path; // segments in braces are path parameters
    std::vector<FieldSpec> body;
    std::vector<std::string> path_params;
    bool bearer_token = false;
};

const std::vector<EndpointSpec>& api_schema();

struct RouteMatch {
    const EndpointSpec* endpoint = nullptr;
    std::vector<std::string> params;
};

std::optional<RouteMatch> match_route(std::string_view method, std::string_view path);

// Returns an explanation when the body does not satisfy the endpoint.
std::optional<std::string> check_body(const EndpointSpec& endpoint, const nlohmann::json& body);

} // namespace zerotwo::server
