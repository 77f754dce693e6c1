#pragma once

#include "core/clock.hpp"
#include "core/group.hpp"
#include "core/protocol.hpp"
#include "core/random.hpp"
#include "core/wire.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace zerotwo::server {

struct ServerConfig {
    std::string domain = "localhost";            // I_s
    std::string public_url = "http://127.0.0.1:8080"; // base of enroll_url
    std::optional<std::filesystem::path> store_path;
    std::uint64_t session_cap_seconds = 30ull * 24 * 3600;
    std::int64_t pending_window_seconds = 120;
    unsigned login_rate_limit = 10;
    std::int64_t rate_window_seconds = 60;
    bool demo = false; // email ownership checks auto-pass
};

struct UserRecord {
    std::string iu;
    core::BigInt v;
    std::int64_t created_at = 0;
    bool email_verified = false;
};

enum class LoginState { awaiting_authenticator, verifying, completed, failed, expired };

struct PendingLogin {
    std::string login_id;
    std::string iu;
    core::BigInt v;
    core::ServerEphemeral eph;
    bool decoy = false;
    std::int64_t created_at = 0;
    LoginState state = LoginState::awaiting_authenticator;
    std::string session_id;
};

struct SessionRecord {
    std::string session_id;
    std::string iu;
    core::SessionKey key;
    std::string browser_token;
    bool revoked = false;
    bool swept = false;

    bool valid_at(std::int64_t now) const { return !revoked && key.valid_at(now); }
    std::int64_t expires_at() const {
        return key.established_at + static_cast<std::int64_t>(key.duration);
    }
};

enum class AuthzState { pending, confirmed, denied, expired };

struct PendingAuthorization {
    std::string auth_id;
    std::string session_id;
    std::string o;
    core::Nonce c{};
    std::int64_t created_at = 0;
    std::uint64_t sequence = 0;
    AuthzState state = AuthzState::pending;
};

struct EnrollmentChallenge {
    std::string iu;
    std::string is;
    std::string enroll_url;

    std::string qr_payload() const;
};

struct LoginChallenge {
    std::string login_id;
    std::string iu;
    std::string is;
    std::string B; // hex
    std::string fingerprint;

    std::string qr_payload() const;
};

struct LoginCompletion {
    std::string session_id;
    std::string browser_token;
};

struct LoginStatus {
    enum class State { pending, ok, failed } state = State::pending;
    std::string browser_token;
    std::string session_id;
    std::int64_t expires_at = 0;
};

struct AuthorizationRequest {
    std::string auth_id;
    std::string session_id;
    std::string o;
    std::string c; // hex
};

struct BrowserSession {
    std::string iu;
    std::string session_id;
    std::int64_t expires_at = 0;
};

std::string_view login_state_name(LoginStatus::State state);
std::string_view authz_state_name(AuthzState state);

// Reference authentication service. All state transitions happen under one
// mutex; the expensive modular arithmetic of a login completion runs outside
// it once the pending login has been claimed.
class Server {
public:
    Server(ServerConfig config, core::GroupProfile group, std::shared_ptr<core::Clock> clock,
           std::shared_ptr<core::RandomSource> rng);

    const ServerConfig& config() const noexcept { return config_; }
    const core::GroupProfile& group() const noexcept { return group_; }
    std::int64_t now() const { return clock_->now(); }

    EnrollmentChallenge signup_init(const std::string& iu);
    void enroll(const std::string& iu, const core::BigInt& v);

    LoginChallenge login_init(const std::string& iu);
    // Authenticator-side fetch of a pending challenge (stands in for a push).
    LoginChallenge login_challenge(const std::string& login_id);
    LoginCompletion login_complete(const std::string& login_id, const std::string& iu,
                                   const core::BigInt& A, core::ByteView M, std::uint64_t d);
    LoginStatus login_status(const std::string& login_id);

    AuthorizationRequest request_authorization(const std::string& session_id, const std::string& o);
    std::vector<AuthorizationRequest> pending_authorizations(const std::string& session_id);
    AuthzState authorization_state(const std::string& auth_id);
    void confirm_authorization(const std::string& auth_id, core::ByteView M);

    void logout(const std::string& session_id, core::ByteView M);
    BrowserSession check_browser_token(const std::string& token);
    void browser_logout(const std::string& token);

    std::size_t sweep_expired(std::int64_t now);

    // JSON-over-HTTP surface; see router.cpp.
    core::Response handle(const core::Request& request);

    std::optional<UserRecord> find_user(const std::string& iu) const;
    std::vector<UserRecord> users() const;
    std::vector<SessionRecord> active_sessions() const;

private:
    std::string random_id(std::size_t bytes);
    bool pending_expired(std::int64_t created_at, std::int64_t now) const;
    void check_rate_limit(const std::string& iu, std::int64_t now);
    void persist_locked() const;
    void load();

    ServerConfig config_;
    core::GroupProfile group_;
    std::shared_ptr<core::Clock> clock_;
    std::shared_ptr<core::RandomSource> rng_;

    mutable std::mutex mu_;
    std::map<std::string, EnrollmentChallenge> signups_;
    std::map<std::string, UserRecord> users_;
    std::map<std::string, PendingLogin> logins_;
    std::map<std::string, SessionRecord> sessions_;
    std::map<std::string, std::string> browser_tokens_; // token -> session id
    std::map<std::string, PendingAuthorization> authorizations_;
    std::map<std::string, std::pair<std::int64_t, unsigned>> rate_windows_;
    std::uint64_t authz_sequence_ = 0;
};

} // namespace zerotwo::server
