#include "zerotwo/zerotwo.h"

#include "authenticator/authenticator.hpp"
#include "core/errors.hpp"
#include "core/payload.hpp"
#include "core/protocol.hpp"
#include "server/http_frontend.hpp"
#include "server/server.hpp"
#include "sim/harness.hpp"

#include <json.hpp>

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

using nlohmann::json;
using zerotwo::Errc;

struct zt_server {
    std::shared_ptr<zerotwo::server::Server> server;
    std::unique_ptr<zerotwo::server::HttpFrontend> frontend;
};

namespace {

thread_local std::string last_error;

zt_status to_status(Errc code) { return static_cast<zt_status>(static_cast<int>(code) + 1); }

template <typename F>
zt_status guard(F&& body) {
    try {
        body();
        last_error.clear();
        return ZT_OK;
    } catch (const zerotwo::Error& e) {
        last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return ZT_E_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return ZT_E_INTERNAL;
    }
}

char* dup(std::string_view text) {
    auto* out = static_cast<char*>(std::malloc(text.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, text.data(), text.size());
    out[text.size()] = '\0';
    return out;
}

void require(const void* p, const char* name) {
    if (p == nullptr) zerotwo::fail(Errc::invalid_argument, std::string(name) + " is NULL");
}

std::string str(const char* p) { return p == nullptr ? std::string() : std::string(p); }

std::unique_ptr<zerotwo::auth::UnlockProvider> make_unlock(const zt_unlock* unlock) {
    require(unlock, "unlock");
    if (unlock->kind == ZT_UNLOCK_PASSWORD) {
        require(unlock->password, "unlock->password");
        return std::make_unique<zerotwo::auth::PasswordUnlock>(unlock->password);
    }
    if (unlock->kind == ZT_UNLOCK_BIOMETRIC_STUB) {
        require(unlock->device_key, "unlock->device_key");
        return std::make_unique<zerotwo::auth::BiometricStubUnlock>(unlock->biometric_accept != 0,
                                                                    unlock->device_key);
    }
    zerotwo::fail(Errc::invalid_argument, "unknown unlock kind");
}

class CallbackConfirmer final : public zerotwo::auth::Confirmer {
public:
    CallbackConfirmer(zt_confirm_fn fn, void* user) : fn_(fn), user_(user) {}

    bool confirm(const zerotwo::auth::ConsentPrompt& prompt) override {
        if (fn_ == nullptr) return false;
        json doc{{"label", prompt.label}, {"iu", prompt.identity.iu}, {"is", prompt.identity.is}};
        if (prompt.kind == zerotwo::auth::ConsentKind::login) {
            doc["kind"] = "login";
            doc["server_fingerprint"] = prompt.server_fingerprint;
            doc["local_fingerprint"] = prompt.local_fingerprint;
            doc["duration"] = prompt.duration;
        } else {
            doc["kind"] = "authorization";
            doc["operation"] = prompt.operation;
        }
        return fn_(user_, doc.dump().c_str()) != 0;
    }

private:
    zt_confirm_fn fn_;
    void* user_;
};

} // namespace

struct zt_auth {
    std::unique_ptr<zerotwo::auth::SecretStore> store;
    std::unique_ptr<zerotwo::auth::HttpTransport> transport;
    std::unique_ptr<CallbackConfirmer> confirmer;
    std::unique_ptr<zerotwo::auth::Authenticator> authenticator;
};

extern "C" {

const char* zt_status_name(zt_status status) {
    const auto i = static_cast<int>(status);
    if (i == 0) return "ok";
    if (i < 0 || i > static_cast<int>(Errc::internal) + 1) return "unknown";
    // errc_name views string literals, so data() is NUL-terminated.
    return zerotwo::errc_name(static_cast<Errc>(i - 1)).data();
}

const char* zt_last_error(void) { return last_error.c_str(); }

const char* zt_version(void) { return "0.1.0"; }

void zt_free(void* p) { std::free(p); }

zt_status zt_compute_verifier(const char* iu, const char* is, const uint8_t* secret,
                              size_t secret_len, char** v_hex) {
    return guard([&] {
        require(iu, "iu");
        require(is, "is");
        require(secret, "secret");
        require(v_hex, "v_hex");
        const zerotwo::core::IdentityPair identity{iu, is};
        zerotwo::core::validate_identity(identity);
        const auto group = zerotwo::core::GroupProfile::production();
        const auto p = zerotwo::core::MasterSecret::imported({secret, secret_len});
        auto x = zerotwo::core::derive_x(identity, p);
        *v_hex = dup(zerotwo::core::compute_verifier(x, group).to_hex());
    });
}

zt_status zt_fingerprint(const char* iu, const char* is, const char* b_hex, char** out) {
    return guard([&] {
        require(iu, "iu");
        require(is, "is");
        require(b_hex, "b_hex");
        require(out, "out");
        const auto group = zerotwo::core::GroupProfile::production();
        *out = dup(zerotwo::core::fingerprint({iu, is}, zerotwo::core::BigInt::from_hex(b_hex), group));
    });
}

zt_status zt_generate_passphrase(unsigned words, char** out) {
    return guard([&] {
        require(out, "out");
        zerotwo::core::SystemRandom rng;
        zerotwo::auth::PassphraseSpec spec;
        spec.word_count = words;
        const auto secret =
            zerotwo::auth::generate_passphrase(spec, zerotwo::auth::Wordlist::bundled(), rng);
        *out = dup(secret.text());
    });
}

void zt_server_options_init(zt_server_options* options) {
    if (options == nullptr) return;
    *options = {};
    options->domain = "localhost";
    options->public_url = "http://127.0.0.1:8080";
    options->session_cap_seconds = zerotwo::server::ServerConfig{}.session_cap_seconds;
}

zt_status zt_server_create(const zt_server_options* options, zt_server** out) {
    return guard([&] {
        require(options, "options");
        require(out, "out");
        zerotwo::server::ServerConfig config;
        if (options->domain) config.domain = options->domain;
        if (options->public_url) config.public_url = options->public_url;
        if (options->store_path && *options->store_path) config.store_path = options->store_path;
        config.session_cap_seconds = options->session_cap_seconds;
        config.demo = options->demo != 0;
        auto handle = std::make_unique<zt_server>();
        handle->server = std::make_shared<zerotwo::server::Server>(
            config, zerotwo::core::GroupProfile::production(),
            std::make_shared<zerotwo::core::SystemClock>(),
            std::make_shared<zerotwo::core::SystemRandom>());
        *out = handle.release();
    });
}

void zt_server_free(zt_server* server) {
    if (server == nullptr) return;
    if (server->frontend) server->frontend->stop();
    delete server;
}

zt_status zt_server_handle(zt_server* server, const char* method, const char* path,
                           const char* body, const char* authorization, int* http_status,
                           char** response_body) {
    return guard([&] {
        require(server, "server");
        require(method, "method");
        require(path, "path");
        require(http_status, "http_status");
        require(response_body, "response_body");
        zerotwo::core::Request request{method, path, str(body), {}, {}};
        if (authorization) request.headers.emplace("Authorization", authorization);
        const auto response = server->server->handle(request);
        *http_status = response.status;
        *response_body = dup(response.body);
    });
}

zt_status zt_server_sweep(zt_server* server, size_t* swept) {
    return guard([&] {
        require(server, "server");
        const auto n = server->server->sweep_expired(server->server->now());
        if (swept) *swept = n;
    });
}

zt_status zt_server_listen(zt_server* server, const char* host, int port, const char* static_dir,
                           int* bound_port) {
    return guard([&] {
        require(server, "server");
        require(host, "host");
        std::optional<std::filesystem::path> dir;
        if (static_dir && *static_dir) dir = static_dir;
        server->frontend = std::make_unique<zerotwo::server::HttpFrontend>(*server->server, dir);
        const int bound = server->frontend->bind(host, port);
        if (bound_port) *bound_port = bound;
    });
}

zt_status zt_server_serve(zt_server* server) {
    return guard([&] {
        require(server, "server");
        if (!server->frontend) zerotwo::fail(Errc::config, "zt_server_listen was not called");
        server->frontend->serve();
    });
}

void zt_server_stop(zt_server* server) {
    if (server && server->frontend) server->frontend->stop();
}

zt_status zt_store_init(const char* path, const zt_unlock* unlock, zt_kdf_profile kdf) {
    return guard([&] {
        require(path, "path");
        const auto provider = make_unlock(unlock);
        zerotwo::core::SystemRandom rng;
        const auto params = kdf == ZT_KDF_FAST ? zerotwo::auth::KdfParams::fast()
                                               : zerotwo::auth::KdfParams::hardened();
        zerotwo::auth::SecretStore::create(path, *provider, params, rng);
    });
}

zt_status zt_auth_open(const char* store_path, const zt_unlock* unlock, const char* server_url,
                       zt_confirm_fn confirm, void* user, zt_auth** out) {
    return guard([&] {
        require(store_path, "store_path");
        require(out, "out");
        const auto provider = make_unlock(unlock);
        auto handle = std::make_unique<zt_auth>();
        handle->store = std::make_unique<zerotwo::auth::SecretStore>(
            zerotwo::auth::SecretStore::unlock(store_path, *provider));
        handle->transport = std::make_unique<zerotwo::auth::HttpTransport>(
            server_url ? server_url : "http://127.0.0.1:8080");
        handle->confirmer = std::make_unique<CallbackConfirmer>(confirm, user);
        handle->authenticator = std::make_unique<zerotwo::auth::Authenticator>(
            *handle->store, *handle->transport, *handle->confirmer,
            std::make_shared<zerotwo::core::SystemClock>(),
            std::make_shared<zerotwo::core::SystemRandom>());
        *out = handle.release();
    });
}

void zt_auth_close(zt_auth* auth) { delete auth; }

zt_status zt_auth_new_passphrase(zt_auth* auth, unsigned words, size_t* index, char** passphrase) {
    return guard([&] {
        require(auth, "auth");
        zerotwo::auth::PassphraseSpec spec;
        spec.word_count = words == 0 ? spec.word_count : words;
        const auto i = auth->authenticator->generate_secret(spec);
        if (index) *index = i;
        if (passphrase) *passphrase = dup(auth->store->contents().secrets.at(i).secret.text());
    });
}

zt_status zt_auth_import_secret(zt_auth* auth, const uint8_t* secret, size_t len, size_t* index) {
    return guard([&] {
        require(auth, "auth");
        require(secret, "secret");
        const auto i = auth->authenticator->add_secret(zerotwo::core::MasterSecret::imported({secret, len}));
        if (index) *index = i;
    });
}

zt_status zt_auth_add_account(zt_auth* auth, const char* label, const char* iu, const char* is,
                              size_t secret_index) {
    return guard([&] {
        require(auth, "auth");
        require(iu, "iu");
        require(is, "is");
        auth->authenticator->add_account(str(label), {iu, is}, secret_index);
    });
}

zt_status zt_auth_list_accounts(zt_auth* auth, char** out) {
    return guard([&] {
        require(auth, "auth");
        require(out, "out");
        json list = json::array();
        for (const auto& a : auth->authenticator->accounts()) {
            list.push_back({{"label", a.label},
                            {"iu", a.identity.iu},
                            {"is", a.identity.is},
                            {"secret", a.secret_index},
                            {"enrolled", a.enrolled}});
        }
        *out = dup(list.dump());
    });
}

zt_status zt_auth_list_sessions(zt_auth* auth, char** out) {
    return guard([&] {
        require(auth, "auth");
        require(out, "out");
        json list = json::array();
        for (const auto& s : auth->authenticator->sessions()) {
            list.push_back({{"session_id", s.session_id},
                            {"iu", s.identity.iu},
                            {"is", s.identity.is},
                            {"established_at", s.key.established_at},
                            {"expires_at", s.key.established_at + static_cast<std::int64_t>(s.key.duration)}});
        }
        *out = dup(list.dump());
    });
}

zt_status zt_auth_enroll(zt_auth* auth, const char* payload, const char* label, size_t secret_index) {
    return guard([&] {
        require(auth, "auth");
        require(payload, "payload");
        auth->authenticator->handle_enroll_payload(payload, str(label), secret_index);
    });
}

zt_status zt_auth_approve(zt_auth* auth, const char* login, uint64_t duration_seconds,
                          char** session_id) {
    return guard([&] {
        require(auth, "auth");
        require(login, "login");
        std::string text(login);
        const auto start = text.find_first_not_of(" \t\r\n");
        zerotwo::core::LoginPayload challenge;
        if (start != std::string::npos && text[start] == '{') {
            challenge = zerotwo::core::decode_payload_as<zerotwo::core::LoginPayload>(text);
        } else {
            challenge = auth->authenticator->fetch_login_challenge(text);
        }
        const auto d = duration_seconds == 0 ? zerotwo::auth::kDefaultSessionSeconds : duration_seconds;
        const auto session = auth->authenticator->approve_login(challenge, d);
        if (session_id) *session_id = dup(session.session_id);
    });
}

zt_status zt_auth_list_authz(zt_auth* auth, char** out) {
    return guard([&] {
        require(auth, "auth");
        require(out, "out");
        json list = json::array();
        for (const auto& s : auth->authenticator->sessions()) {
            for (const auto& r : auth->authenticator->pending_authorizations(s.session_id)) {
                list.push_back({{"auth_id", r.auth_id}, {"session_id", r.session_id}, {"o", r.o}});
            }
        }
        *out = dup(list.dump());
    });
}

zt_status zt_auth_confirm_authz(zt_auth* auth, const char* auth_id) {
    return guard([&] {
        require(auth, "auth");
        require(auth_id, "auth_id");
        const auto sessions = auth->authenticator->sessions();
        for (const auto& s : sessions) {
            for (const auto& r : auth->authenticator->pending_authorizations(s.session_id)) {
                if (r.auth_id == auth_id) {
                    auth->authenticator->confirm_authorization(r);
                    return;
                }
            }
        }
        zerotwo::fail(Errc::not_found, std::string("no pending authorization ") + auth_id);
    });
}

zt_status zt_auth_logout(zt_auth* auth, const char* session_id) {
    return guard([&] {
        require(auth, "auth");
        require(session_id, "session_id");
        auth->authenticator->remote_logout(session_id);
    });
}

zt_status zt_auth_export(zt_auth* auth, const char* destination) {
    return guard([&] {
        require(auth, "auth");
        require(destination, "destination");
        auth->store->export_backup(destination);
    });
}

zt_status zt_sim_list(char** out) {
    return guard([&] {
        require(out, "out");
        json list = json::array();
        for (const auto& s : zerotwo::sim::scenarios()) {
            list.push_back({{"name", s.name}, {"summary", s.summary}, {"deterministic", s.deterministic}});
        }
        *out = dup(list.dump());
    });
}

zt_status zt_sim_run(const char* name, const uint8_t* seed, size_t seed_len, int* passed,
                     char** transcript_jsonl, char** summary) {
    return guard([&] {
        require(name, "name");
        const auto* scenario = zerotwo::sim::find_scenario(name);
        if (scenario == nullptr) zerotwo::fail(Errc::not_found, std::string("no scenario ") + name);
        const auto tape = seed ? zerotwo::core::Bytes(seed, seed + seed_len) : zerotwo::sim::default_seed();
        const auto report = zerotwo::sim::run_scenario(*scenario, tape);
        if (passed) *passed = report.passed ? 1 : 0;
        if (transcript_jsonl) *transcript_jsonl = dup(report.transcript.to_jsonl());
        if (summary) {
            json doc{{"scenario", report.scenario},
                     {"passed", report.passed},
                     {"steps_run", report.steps_run},
                     {"steps", scenario->steps.size()},
                     {"leaks", report.leaks.size()}};
            if (report.divergence) doc["divergence"] = *report.divergence;
            *summary = dup(doc.dump());
        }
    });
}

} // extern "C"
