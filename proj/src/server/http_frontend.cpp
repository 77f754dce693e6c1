#include "server/http_frontend.hpp"

#include "core/errors.hpp"

#include <httplib.h>

namespace zerotwo::server {

HttpFrontend::HttpFrontend(Server& server, std::optional<std::filesystem::path> static_dir,
                           std::chrono::seconds sweep_interval)
    : server_(server), http_(std::make_unique<httplib::Server>()), sweep_interval_(sweep_interval) {
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
        core::Request request{req.method, req.path, req.body, {}, {}};
        for (const auto& [name, value] : req.headers) {
            request.headers.emplace(name, value);
        }
        const auto response = server_.handle(request);
        res.status = response.status;
        if (!response.body.empty()) {
            res.set_content(response.body, response.content_type);
        }
    };
    static constexpr const char* kRoutes = R"(/(signup|enroll|login/.*|authz/.*|logout.*|session))";
    http_->Get(kRoutes, forward);
    http_->Post(kRoutes, forward);
    if (static_dir) {
        if (!http_->set_mount_point("/app", static_dir->string())) {
            fail(Errc::config, "static directory does not exist: " + static_dir->string());
        }
    }
}

HttpFrontend::~HttpFrontend() { stop(); }

int HttpFrontend::bind(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = http_->bind_to_any_port(host);
    } else if (!http_->bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound <= 0) {
        fail(Errc::io, "cannot listen on " + host + ":" + std::to_string(port));
    }
    return bound;
}

void HttpFrontend::serve() {
    {
        std::lock_guard lock(sweep_mu_);
        stopping_ = false;
    }
    sweeper_ = std::thread([this] { sweeper_loop(); });
    http_->listen_after_bind();
    {
        std::lock_guard lock(sweep_mu_);
        stopping_ = true;
    }
    sweep_cv_.notify_all();
    if (sweeper_.joinable()) {
        sweeper_.join();
    }
}

void HttpFrontend::stop() {
    http_->stop();
    {
        std::lock_guard lock(sweep_mu_);
        stopping_ = true;
    }
    sweep_cv_.notify_all();
}

void HttpFrontend::sweeper_loop() {
    std::unique_lock lock(sweep_mu_);
    while (!stopping_) {
        if (sweep_cv_.wait_for(lock, sweep_interval_, [this] { return stopping_; })) {
            break;
        }
        lock.unlock();
        try {
            server_.sweep_expired(server_.now());
        } catch (const std::exception&) {
            // Persistence trouble is retried on the next sweep.
        }
        lock.lock();
    }
}

} // namespace zerotwo::server
