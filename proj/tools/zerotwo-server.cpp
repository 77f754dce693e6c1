// Reference authentication server over HTTP.

#include <zerotwo/zerotwo.h>

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <iostream>
#include <pthread.h>
#include <string>
#include <thread>

namespace {

bool split_listen(const std::string& listen, std::string& host, int& port) {
    const auto colon = listen.rfind(':');
    if (colon == std::string::npos) return false;
    host = listen.substr(0, colon);
    try {
        port = std::stoi(listen.substr(colon + 1));
    } catch (const std::exception&) {
        return false;
    }
    return !host.empty() && port >= 0 && port <= 65535;
}

int report(zt_status status, const char* what) {
    std::cerr << "zerotwo-server: " << what << ": " << zt_status_name(status) << ": "
              << zt_last_error() << "\n";
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"zerotwo reference server"};
    std::string listen = "127.0.0.1:8080";
    std::string domain = "localhost";
    std::string store_path;
    std::string public_url;
    std::string static_dir;
    std::uint64_t session_cap = 30ull * 24 * 3600;
    bool demo = false;

    app.add_option("--listen", listen, "host:port to bind (port 0 picks one)")
        ->envname("ZEROTWO_LISTEN");
    app.add_option("--domain", domain, "server identifier bound into every secret")
        ->envname("ZEROTWO_DOMAIN");
    app.add_option("--store-path", store_path, "JSON store; omit to keep state in memory")
        ->envname("ZEROTWO_STORE_PATH");
    app.add_option("--session-cap-seconds", session_cap, "longest session a client may request")
        ->envname("ZEROTWO_SESSION_CAP_SECONDS");
    app.add_flag("--demo", demo, "treat email identifiers as verified")->envname("ZEROTWO_DEMO");
    app.add_option("--public-url", public_url, "base URL placed in enrollment payloads")
        ->envname("ZEROTWO_PUBLIC_URL");
    app.add_option("--static-dir", static_dir, "directory served under /app")
        ->envname("ZEROTWO_STATIC_DIR");
    CLI11_PARSE(app, argc, argv);

    std::string host;
    int port = 0;
    if (!split_listen(listen, host, port)) {
        std::cerr << "zerotwo-server: --listen expects host:port\n";
        return 2;
    }
    if (public_url.empty()) {
        if (port == 0) {
            std::cerr << "zerotwo-server: --listen with port 0 needs --public-url\n";
            return 2;
        }
        public_url = "http://" + listen;
    }

    // Signals are taken by a dedicated thread so stop() runs outside a handler.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    zt_server_options options;
    zt_server_options_init(&options);
    options.domain = domain.c_str();
    options.public_url = public_url.c_str();
    options.store_path = store_path.empty() ? nullptr : store_path.c_str();
    options.session_cap_seconds = session_cap;
    options.demo = demo ? 1 : 0;

    zt_server* server = nullptr;
    if (auto s = zt_server_create(&options, &server); s != ZT_OK) return report(s, "startup");
    int bound = 0;
    if (auto s = zt_server_listen(server, host.c_str(), port, static_dir.empty() ? nullptr : static_dir.c_str(),
                                  &bound);
        s != ZT_OK) {
        zt_server_free(server);
        return report(s, "listen");
    }
    std::printf("listening on http://%s:%d (domain %s)\n", host.c_str(), bound, domain.c_str());
    std::fflush(stdout);

    std::thread waiter([&] {
        int signal = 0;
        sigwait(&signals, &signal);
        zt_server_stop(server);
    });
    waiter.detach();

    const auto status = zt_server_serve(server);
    zt_server_free(server);
    if (status != ZT_OK) return report(status, "serve");
    return 0;
}
