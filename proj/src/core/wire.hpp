#pragma once

#include <map>
#include <string>

namespace zerotwo::core {

// A transport-neutral HTTP-shaped message. The in-process harness and the
// socket frontend both carry these.
struct Request {
    std::string method;
    std::string path;
    std::string body;
    std::map<std::string, std::string> headers;
    // Absolute origin ("http://host:port") when the request must go somewhere
    // other than the transport's default server; empty otherwise.
    std::string origin;
};

struct Response {
    int status = 0;
    std::string body;
    std::string content_type = "application/json";
};

} // namespace zerotwo::core
