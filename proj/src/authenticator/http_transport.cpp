#include "authenticator/transport.hpp"

#include "core/errors.hpp"

#include <httplib.h>

namespace zerotwo::auth {

std::pair<std::string, std::string> split_url(const std::string& url) {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos) {
        return {"", url.empty() ? "/" : url};
    }
    const auto slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, slash), url.substr(slash)};
}

HttpTransport::HttpTransport(std::string base_url) : base_url_(std::move(base_url)) {
    while (!base_url_.empty() && base_url_.back() == '/') {
        base_url_.pop_back();
    }
}

HttpTransport::~HttpTransport() = default;

core::Response HttpTransport::send(const core::Request& request) {
    const std::string& origin = request.origin.empty() ? base_url_ : request.origin;
    httplib::Client client(origin);
    client.set_connection_timeout(5);
    client.set_read_timeout(30);
    httplib::Headers headers(request.headers.begin(), request.headers.end());

    httplib::Result result;
    if (request.method == "GET") {
        result = client.Get(request.path, headers);
    } else if (request.method == "POST") {
        result = client.Post(request.path, headers, request.body, "application/json");
    } else {
        fail(Errc::invalid_argument, "unsupported method " + request.method);
    }
    if (!result) {
        fail(Errc::network, "request to " + origin + request.path + " failed: " +
                                httplib::to_string(result.error()));
    }
    core::Response response;
    response.status = result->status;
    response.body = result->body;
    response.content_type = result->get_header_value("Content-Type");
    return response;
}

} // namespace zerotwo::auth
