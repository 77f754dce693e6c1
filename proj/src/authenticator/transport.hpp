#pragma once

#include "core/wire.hpp"

#include <utility>
#include <string>

namespace zerotwo::auth {

class Transport {
public:
    virtual ~Transport() = default;
    // Throws Errc::network when nothing came back.
    virtual core::Response send(const core::Request& request) = 0;
};

// Plain HTTP client. base_url is "http://host:port"; a request carrying an
// explicit origin is sent there instead.
class HttpTransport final : public Transport {
public:
    explicit HttpTransport(std::string base_url);
    ~HttpTransport() override;

    core::Response send(const core::Request& request) override;
    const std::string& base_url() const noexcept { return base_url_; }

private:
    std::string base_url_;
};

// Splits "http://host:port/some/path" into origin and path. A string without
// a scheme is returned as a path with an empty origin.
std::pair<std::string, std::string> split_url(const std::string& url);

} // namespace zerotwo::auth
