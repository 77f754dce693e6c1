// Exercises libzerotwo through its C interface only, over a real socket.

#include <zerotwo/zerotwo.h>

#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <cstring>
#include <filesystem>
#include <string>
#include <thread>

using nlohmann::json;

namespace {

std::string take(char* p) {
    std::string s = p ? p : "";
    zt_free(p);
    return s;
}

std::filesystem::path temp_path(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "zerotwo-tests";
    std::filesystem::create_directories(dir);
    auto p = dir / name;
    std::filesystem::remove(p);
    return p;
}

struct Consent {
    int answer = 1;
    std::vector<json> prompts;
};

int confirm(void* user, const char* prompt) {
    auto* c = static_cast<Consent*>(user);
    c->prompts.push_back(json::parse(prompt));
    return c->answer;
}

struct Call {
    int status = 0;
    json body;
};

Call handle(zt_server* server, const char* method, const std::string& path, const json& body = nullptr,
            const char* authorization = nullptr) {
    int status = 0;
    char* out = nullptr;
    const auto text = body.is_null() ? std::string() : body.dump();
    REQUIRE(zt_server_handle(server, method, path.c_str(), body.is_null() ? nullptr : text.c_str(),
                             authorization, &status, &out) == ZT_OK);
    const auto raw = take(out);
    return {status, raw.empty() ? json() : json::parse(raw)};
}

// A live server on 127.0.0.1 with a serving thread.
struct LiveServer {
    zt_server* server = nullptr;
    std::thread thread;
    int port = 0;

    LiveServer() {
        zt_server_options options;
        zt_server_options_init(&options);
        options.domain = "bank.example";
        options.public_url = "http://placeholder.invalid";
        options.demo = 1;
        REQUIRE(zt_server_create(&options, &server) == ZT_OK);
        REQUIRE(zt_server_listen(server, "127.0.0.1", 0, nullptr, &port) == ZT_OK);
        REQUIRE(port > 0);
        thread = std::thread([this] { zt_server_serve(server); });
    }
    ~LiveServer() {
        zt_server_stop(server);
        thread.join();
        zt_server_free(server);
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }
};

} // namespace

TEST_CASE("status names and versions") {
    CHECK(std::string(zt_status_name(ZT_OK)) == "ok");
    CHECK(std::string(zt_status_name(ZT_E_GONE)) == "gone");
    CHECK(std::string(zt_status_name(ZT_E_AUTHENTICATION_FAILED)) == "authentication-failed");
    CHECK(std::string(zt_status_name(static_cast<zt_status>(99))) == "unknown");
    CHECK(std::strlen(zt_version()) > 0);
}

TEST_CASE("NULL arguments are rejected") {
    CHECK(zt_server_create(nullptr, nullptr) == ZT_E_INVALID_ARGUMENT);
    CHECK(std::strlen(zt_last_error()) > 0);
    CHECK(zt_compute_verifier(nullptr, "x", nullptr, 0, nullptr) == ZT_E_INVALID_ARGUMENT);
    CHECK(zt_auth_open(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr) == ZT_E_INVALID_ARGUMENT);
    CHECK(zt_auth_approve(nullptr, "x", 0, nullptr) == ZT_E_INVALID_ARGUMENT);
    CHECK(zt_sim_run(nullptr, nullptr, 0, nullptr, nullptr, nullptr) == ZT_E_INVALID_ARGUMENT);
    zt_free(nullptr);
    zt_server_free(nullptr);
    zt_auth_close(nullptr);
}

TEST_CASE("protocol helpers") {
    char* v = nullptr;
    const char secret[] = "correct horse battery staple";
    REQUIRE(zt_compute_verifier("alice", "example.org", reinterpret_cast<const std::uint8_t*>(secret),
                                std::strlen(secret), &v) == ZT_OK);
    const auto v_hex = take(v);
    CHECK(v_hex.size() > 500);

    char* fp = nullptr;
    REQUIRE(zt_fingerprint("alice", "example.org", "02", &fp) == ZT_OK);
    CHECK(take(fp).size() == 19);
    CHECK(zt_fingerprint("alice", "example.org", "zz", &fp) == ZT_E_PARSE);

    char* words = nullptr;
    REQUIRE(zt_generate_passphrase(6, &words) == ZT_OK);
    const auto text = take(words);
    CHECK(std::count(text.begin(), text.end(), '-') == 5);
}

TEST_CASE("server errors through the C API") {
    zt_server_options options;
    zt_server_options_init(&options);
    options.session_cap_seconds = 0;
    zt_server* server = nullptr;
    CHECK(zt_server_create(&options, &server) == ZT_E_CONFIG);
    CHECK(server == nullptr);

    zt_server_options_init(&options);
    REQUIRE(zt_server_create(&options, &server) == ZT_OK);
    CHECK(handle(server, "GET", "/nowhere").status == 404);
    CHECK(handle(server, "GET", "/session", nullptr, "Bearer nope").status == 401);
    std::size_t swept = 99;
    CHECK(zt_server_sweep(server, &swept) == ZT_OK);
    CHECK(swept == 0);
    zt_server_free(server);
}

TEST_CASE("full flow between a browser, the server and the authenticator") {
    LiveServer live;
    const auto store = temp_path("capi-store.zt");
    zt_unlock unlock{ZT_UNLOCK_PASSWORD, "pw", 0, nullptr};
    REQUIRE(zt_store_init(store.c_str(), &unlock, ZT_KDF_FAST) == ZT_OK);
    CHECK(zt_store_init(store.c_str(), &unlock, ZT_KDF_FAST) == ZT_E_CONFLICT);

    zt_unlock wrong{ZT_UNLOCK_PASSWORD, "nope", 0, nullptr};
    zt_auth* auth = nullptr;
    CHECK(zt_auth_open(store.c_str(), &wrong, live.url().c_str(), confirm, nullptr, &auth) ==
          ZT_E_AUTHENTICATION_FAILED);

    Consent consent;
    REQUIRE(zt_auth_open(store.c_str(), &unlock, live.url().c_str(), confirm, &consent, &auth) == ZT_OK);

    std::size_t index = 9;
    char* shown = nullptr;
    REQUIRE(zt_auth_new_passphrase(auth, 6, &index, &shown) == ZT_OK);
    CHECK(index == 0);
    CHECK(take(shown).size() > 12);

    // The enrollment payload points at the placeholder public URL; rewrite it
    // to the live port as a real deployment's public_url would.
    auto signup = handle(live.server, "POST", "/signup", {{"iu", "alice@bank.example"}});
    REQUIRE(signup.status == 200);
    auto payload = json::parse(signup.body.at("qr_payload").get<std::string>());
    payload["enroll_url"] = live.url() + "/enroll";
    REQUIRE(zt_auth_enroll(auth, payload.dump().c_str(), "Bank", 0) == ZT_OK);

    char* accounts = nullptr;
    REQUIRE(zt_auth_list_accounts(auth, &accounts) == ZT_OK);
    const auto account_list = json::parse(take(accounts));
    REQUIRE(account_list.size() == 1);
    CHECK(account_list[0].at("label") == "Bank");

    const auto init = handle(live.server, "POST", "/login/init", {{"iu", "alice@bank.example"}});
    REQUIRE(init.status == 200);
    const auto login_id = init.body.at("login_id").get<std::string>();

    consent.answer = 0;
    char* sid = nullptr;
    CHECK(zt_auth_approve(auth, login_id.c_str(), 600, &sid) == ZT_E_ABORTED);
    consent.answer = 1;
    REQUIRE(zt_auth_approve(auth, login_id.c_str(), 600, &sid) == ZT_OK);
    const auto session_id = take(sid);
    REQUIRE(consent.prompts.size() == 2);
    CHECK(consent.prompts.back().at("server_fingerprint") == init.body.at("fingerprint"));

    const auto status = handle(live.server, "GET", "/login/status/" + login_id);
    CHECK(status.body.at("state") == "ok");
    CHECK(status.body.at("session_id") == session_id);
    const auto bearer = "Bearer " + status.body.at("browser_token").get<std::string>();
    CHECK(handle(live.server, "GET", "/session", nullptr, bearer.c_str()).status == 200);

    const auto authz = handle(live.server, "POST", "/authz/request",
                              {{"session_id", session_id}, {"o", "transfer 10 EUR to bob"}});
    REQUIRE(authz.status == 200);
    char* pending = nullptr;
    REQUIRE(zt_auth_list_authz(auth, &pending) == ZT_OK);
    const auto pending_list = json::parse(take(pending));
    REQUIRE(pending_list.size() == 1);
    CHECK(pending_list[0].at("o") == "transfer 10 EUR to bob");
    const auto auth_id = authz.body.at("auth_id").get<std::string>();
    REQUIRE(zt_auth_confirm_authz(auth, auth_id.c_str()) == ZT_OK);
    CHECK(handle(live.server, "GET", "/authz/status/" + auth_id).body.at("state") == "confirmed");
    CHECK(zt_auth_confirm_authz(auth, auth_id.c_str()) == ZT_E_NOT_FOUND);

    char* sessions = nullptr;
    REQUIRE(zt_auth_list_sessions(auth, &sessions) == ZT_OK);
    const auto session_text = take(sessions);
    CHECK(session_text.find(session_id) != std::string::npos);

    const auto backup = temp_path("capi-backup.zt");
    REQUIRE(zt_auth_export(auth, backup.c_str()) == ZT_OK);
    CHECK(zt_auth_export(auth, backup.c_str()) == ZT_E_CONFLICT);

    REQUIRE(zt_auth_logout(auth, session_id.c_str()) == ZT_OK);
    CHECK(handle(live.server, "GET", "/session", nullptr, bearer.c_str()).status == 401);
    CHECK(zt_auth_logout(auth, session_id.c_str()) == ZT_E_NOT_FOUND);
    zt_auth_close(auth);

    zt_auth* reopened = nullptr;
    REQUIRE(zt_auth_open(backup.c_str(), &unlock, live.url().c_str(), confirm, &consent, &reopened) ==
            ZT_OK);
    char* restored = nullptr;
    REQUIRE(zt_auth_list_accounts(reopened, &restored) == ZT_OK);
    CHECK(json::parse(take(restored)).size() == 1);
    zt_auth_close(reopened);

    std::filesystem::remove(store);
    std::filesystem::remove(backup);
}

TEST_CASE("an unreachable server is reported as a network error") {
    const auto store = temp_path("capi-offline.zt");
    zt_unlock unlock{ZT_UNLOCK_PASSWORD, "pw", 0, nullptr};
    REQUIRE(zt_store_init(store.c_str(), &unlock, ZT_KDF_FAST) == ZT_OK);
    zt_auth* auth = nullptr;
    REQUIRE(zt_auth_open(store.c_str(), &unlock, "http://127.0.0.1:1", confirm, nullptr, &auth) == ZT_OK);
    char* sid = nullptr;
    CHECK(zt_auth_approve(auth, "abcdef", 60, &sid) == ZT_E_NETWORK);
    zt_auth_close(auth);
    std::filesystem::remove(store);
}

TEST_CASE("simulation through the C API") {
    char* list = nullptr;
    REQUIRE(zt_sim_list(&list) == ZT_OK);
    const auto scenarios = json::parse(take(list));
    CHECK(scenarios.size() >= 13);

    int passed = 0;
    char* transcript = nullptr;
    char* summary = nullptr;
    REQUIRE(zt_sim_run("happy-path", nullptr, 0, &passed, &transcript, &summary) == ZT_OK);
    CHECK(passed == 1);
    const auto report = json::parse(take(summary));
    CHECK(report.at("leaks") == 0);
    CHECK(report.at("steps_run") == report.at("steps"));
    CHECK_FALSE(take(transcript).empty());

    const std::uint8_t seed[] = {1, 2, 3};
    REQUIRE(zt_sim_run("tampered-b", seed, sizeof seed, &passed, nullptr, nullptr) == ZT_OK);
    CHECK(passed == 1);
    CHECK(zt_sim_run("nope", nullptr, 0, &passed, nullptr, nullptr) == ZT_E_NOT_FOUND);
}
