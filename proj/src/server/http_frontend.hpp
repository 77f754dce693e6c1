#pragma once

#include "server/server.hpp"

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace zerotwo::server {

// Socket binding for Server::handle. Optionally serves a static directory
// under /app and sweeps expired records in the background.
class HttpFrontend {
public:
    HttpFrontend(Server& server, std::optional<std::filesystem::path> static_dir = std::nullopt,
                 std::chrono::seconds sweep_interval = std::chrono::seconds(30));
    ~HttpFrontend();

    HttpFrontend(const HttpFrontend&) = delete;
    HttpFrontend& operator=(const HttpFrontend&) = delete;

    // Returns the bound port (useful with port 0) or throws Errc::io.
    int bind(const std::string& host, int port);
    // Blocks until stop() is called.
    void serve();
    void stop();

private:
    void sweeper_loop();

    Server& server_;
    std::unique_ptr<httplib::Server> http_;
    std::chrono::seconds sweep_interval_;
    std::mutex sweep_mu_;
    std::condition_variable sweep_cv_;
    bool stopping_ = false;
    std::thread sweeper_;
};

} // namespace zerotwo::server
