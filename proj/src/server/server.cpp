#include "server/server.hpp"

#include "core/errors.hpp"
#include "core/payload.hpp"
#include "server/persistence.hpp"

#include <algorithm>

namespace zerotwo::server {

namespace {

constexpr std::size_t kMaxOperationLength = 1024;

std::string trim_trailing_slash(std::string url) {
    while (!url.empty() && url.back() == '/') {
        url.pop_back();
    }
    return url;
}

std::string lower_ascii(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
        return static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
    });
    return s;
}

} // namespace

std::string_view login_state_name(LoginStatus::State state) {
    switch (state) {
    case LoginStatus::State::pending: return "pending";
    case LoginStatus::State::ok: return "ok";
    case LoginStatus::State::failed: return "failed";
    }
    return "failed";
}

std::string_view authz_state_name(AuthzState state) {
    switch (state) {
    case AuthzState::pending: return "pending";
    case AuthzState::confirmed: return "confirmed";
    case AuthzState::denied: return "denied";
    case AuthzState::expired: return "expired";
    }
    return "expired";
}

std::string EnrollmentChallenge::qr_payload() const {
    return core::encode_payload(core::EnrollPayload{iu, is, enroll_url});
}

std::string LoginChallenge::qr_payload() const {
    return core::encode_payload(core::LoginPayload{login_id, iu, is, B, fingerprint});
}

Server::Server(ServerConfig config, core::GroupProfile group, std::shared_ptr<core::Clock> clock,
               std::shared_ptr<core::RandomSource> rng)
    : config_(std::move(config)), group_(std::move(group)), clock_(std::move(clock)),
      rng_(std::move(rng)) {
    config_.domain = lower_ascii(config_.domain);
    config_.public_url = trim_trailing_slash(config_.public_url);
    core::validate_identity({"probe", config_.domain});
    core::validate_group(group_);
    if (config_.session_cap_seconds == 0) {
        fail(Errc::config, "session cap must be positive");
    }
    load();
}

std::string Server::random_id(std::size_t bytes) { return core::hex_encode(rng_->bytes(bytes)); }

bool Server::pending_expired(std::int64_t created_at, std::int64_t now) const {
    return now >= created_at + config_.pending_window_seconds;
}

void Server::load() {
    if (!config_.store_path) {
        return;
    }
    auto snapshot = read_snapshot(*config_.store_path);
    if (!snapshot.domain.empty() && snapshot.domain != config_.domain) {
        fail(Errc::config, "store at " + config_.store_path->string() + " belongs to domain " +
                               snapshot.domain);
    }
    for (auto& u : snapshot.users) {
        users_.emplace(u.iu, std::move(u));
    }
    for (auto& s : snapshot.sessions) {
        browser_tokens_.emplace(s.browser_token, s.session_id);
        sessions_.emplace(s.session_id, std::move(s));
    }
}

void Server::persist_locked() const {
    if (!config_.store_path) {
        return;
    }
    StoreSnapshot snapshot;
    snapshot.domain = config_.domain;
    for (const auto& [iu, user] : users_) {
        snapshot.users.push_back(user);
    }
    for (const auto& [id, session] : sessions_) {
        if (!session.swept) {
            snapshot.sessions.push_back(session);
        }
    }
    write_snapshot(*config_.store_path, snapshot);
}

void Server::check_rate_limit(const std::string& iu, std::int64_t now) {
    auto& [window_start, count] = rate_windows_[iu];
    if (now >= window_start + config_.rate_window_seconds) {
        window_start = now;
        count = 0;
    }
    if (count >= config_.login_rate_limit) {
        fail(Errc::throttled, "too many login attempts; try again later");
    }
    ++count;
}

EnrollmentChallenge Server::signup_init(const std::string& iu) {
    core::validate_user_identifier(iu);
    std::lock_guard lock(mu_);
    if (users_.contains(iu)) {
        fail(Errc::conflict, "identifier already enrolled");
    }
    auto it = signups_.find(iu);
    if (it == signups_.end()) {
        it = signups_.emplace(iu, EnrollmentChallenge{iu, config_.domain,
                                                      config_.public_url + "/enroll"})
                 .first;
    }
    return it->second;
}

void Server::enroll(const std::string& iu, const core::BigInt& v) {
    core::validate_user_identifier(iu);
    if (v <= core::BigInt(1) || v >= group_.n) {
        fail(Errc::invalid_argument, "verifier out of range");
    }
    const auto now = clock_->now();
    std::lock_guard lock(mu_);
    if (users_.contains(iu)) {
        fail(Errc::conflict, "identifier already enrolled");
    }
    if (!signups_.contains(iu)) {
        fail(Errc::not_found, "no signup in progress for this identifier");
    }
    // Email ownership verification is not implemented; demo mode treats it
    // as passed, otherwise e-mail identifiers stay unverified.
    const bool verified = config_.demo || !core::looks_like_email(iu);
    users_.emplace(iu, UserRecord{iu, v, now, verified});
    signups_.erase(iu);
    persist_locked();
}

LoginChallenge Server::login_init(const std::string& iu) {
    core::validate_user_identifier(iu);
    const auto now = clock_->now();
    std::optional<core::BigInt> verifier;
    {
        std::lock_guard lock(mu_);
        check_rate_limit(iu, now);
        const auto it = users_.find(iu);
        if (it != users_.end() && it->second.email_verified) {
            verifier = it->second.v;
        }
    }
    const bool decoy = !verifier;
    if (decoy) {
        // Same work and same response shape as a real challenge, bound to a
        // verifier nobody knows the secret of.
        const core::BigInt x = core::BigInt::from_bytes(rng_->bytes(32));
        verifier = core::mod_exp(group_.g, x, group_.n);
        if (*verifier <= core::BigInt(1)) {
            verifier = group_.g;
        }
    }

    PendingLogin pending;
    pending.login_id = random_id(16);
    pending.iu = iu;
    pending.v = *verifier;
    pending.eph = core::server_begin_login(*verifier, group_, *rng_);
    pending.decoy = decoy;
    pending.created_at = now;

    const core::IdentityPair identity{iu, config_.domain};
    LoginChallenge challenge{pending.login_id, iu, config_.domain, pending.eph.B.to_hex(),
                             core::fingerprint(identity, pending.eph.B, group_)};
    std::lock_guard lock(mu_);
    logins_.emplace(pending.login_id, std::move(pending));
    return challenge;
}

LoginChallenge Server::login_challenge(const std::string& login_id) {
    const auto now = clock_->now();
    std::lock_guard lock(mu_);
    const auto it = logins_.find(login_id);
    if (it == logins_.end()) {
        fail(Errc::not_found, "unknown login");
    }
    auto& pending = it->second;
    if (pending.state == LoginState::awaiting_authenticator && pending_expired(pending.created_at, now)) {
        pending.state = LoginState::expired;
    }
    if (pending.state != LoginState::awaiting_authenticator) {
        fail(Errc::gone, "login is no longer pending");
    }
    const core::IdentityPair identity{pending.iu, config_.domain};
    return {pending.login_id, pending.iu, config_.domain, pending.eph.B.to_hex(),
            core::fingerprint(identity, pending.eph.B, group_)};
}

LoginCompletion Server::login_complete(const std::string& login_id, const std::string& iu,
                                       const core::BigInt& A, core::ByteView M, std::uint64_t d) {
    const auto now = clock_->now();
    PendingLogin claimed;
    {
        std::lock_guard lock(mu_);
        const auto it = logins_.find(login_id);
        if (it == logins_.end()) {
            fail(Errc::gone, "unknown or consumed login");
        }
        auto& pending = it->second;
        if (pending.state == LoginState::awaiting_authenticator &&
            pending_expired(pending.created_at, now)) {
            pending.state = LoginState::expired;
        }
        if (pending.state != LoginState::awaiting_authenticator) {
            fail(Errc::gone, "unknown or consumed login");
        }
        // Claimed: exactly one verification attempt per B.
        pending.state = LoginState::verifying;
        claimed = pending;
    }

    auto finish_failed = [&](Errc code, const std::string& what) -> LoginCompletion {
        std::lock_guard lock(mu_);
        logins_.at(login_id).state = LoginState::failed;
        fail(code, what);
    };

    if (iu != claimed.iu || claimed.decoy || M.size() != std::tuple_size_v<core::Digest>) {
        return finish_failed(Errc::authentication_failed, "authentication failed");
    }
    core::Digest proof{};
    std::copy(M.begin(), M.end(), proof.begin());

    core::SessionKey key;
    try {
        key = core::server_complete_login({claimed.iu, config_.domain}, claimed.v, claimed.eph, A,
                                          proof, d, group_, now, config_.session_cap_seconds);
    } catch (const Error& e) {
        if (e.code() == Errc::duration_rejected) {
            return finish_failed(Errc::duration_rejected, e.what());
        }
        // Range and degenerate-value violations are reported exactly like a
        // bad proof.
        return finish_failed(Errc::authentication_failed, "authentication failed");
    }

    SessionRecord session;
    session.session_id = random_id(16);
    session.iu = claimed.iu;
    session.key = key;
    session.browser_token = random_id(32);
    LoginCompletion out{session.session_id, session.browser_token};

    std::lock_guard lock(mu_);
    auto& pending = logins_.at(login_id);
    pending.state = LoginState::completed;
    pending.session_id = session.session_id;
    browser_tokens_.emplace(session.browser_token, session.session_id);
    sessions_.emplace(session.session_id, std::move(session));
    persist_locked();
    return out;
}

LoginStatus Server::login_status(const std::string& login_id) {
    const auto now = clock_->now();
    std::lock_guard lock(mu_);
    const auto it = logins_.find(login_id);
    if (it == logins_.end()) {
        fail(Errc::not_found, "unknown login");
    }
    auto& pending = it->second;
    if (pending.state == LoginState::awaiting_authenticator && pending_expired(pending.created_at, now)) {
        pending.state = LoginState::expired;
    }
    LoginStatus status;
    switch (pending.state) {
    case LoginState::awaiting_authenticator:
    case LoginState::verifying:
        status.state = LoginStatus::State::pending;
        break;
    case LoginState::completed: {
        const auto& session = sessions_.at(pending.session_id);
        if (session.valid_at(now)) {
            status.state = LoginStatus::State::ok;
            status.browser_token = session.browser_token;
            status.session_id = session.session_id;
            status.expires_at = session.expires_at();
        } else {
            status.state = LoginStatus::State::failed;
        }
        break;
    }
    case LoginState::failed:
    case LoginState::expired:
        status.state = LoginStatus::State::failed;
        break;
    }
    return status;
}

AuthorizationRequest Server::request_authorization(const std::string& session_id,
                                                   const std::string& o) {
    if (o.empty() || o.size() > kMaxOperationLength) {
        fail(Errc::invalid_argument, "operation text must be 1.." +
                                         std::to_string(kMaxOperationLength) + " bytes");
    }
    const auto now = clock_->now();
    core::Nonce c{};
    rng_->fill(c);
    std::string auth_id = random_id(16);

    std::lock_guard lock(mu_);
    const auto it = sessions_.find(session_id);
    if (it == sessions_.end()) {
        fail(Errc::not_found, "unknown session");
    }
    if (!it->second.valid_at(now)) {
        fail(Errc::session_expired, "session expired");
    }
    PendingAuthorization pending;
    pending.auth_id = auth_id;
    pending.session_id = session_id;
    pending.o = o;
    pending.c = c;
    pending.created_at = now;
    pending.sequence = authz_sequence_++;
    authorizations_.emplace(auth_id, pending);
    return {auth_id, session_id, o, core::hex_encode(c)};
}

std::vector<AuthorizationRequest> Server::pending_authorizations(const std::string& session_id) {
    const auto now = clock_->now();
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(session_id);
    if (it == sessions_.end()) {
        fail(Errc::not_found, "unknown session");
    }
    if (!it->second.valid_at(now)) {
        fail(Errc::session_expired, "session expired");
    }
    std::vector<const PendingAuthorization*> open;
    for (auto& [id, pending] : authorizations_) {
        if (pending.session_id != session_id || pending.state != AuthzState::pending) {
            continue;
        }
        if (pending_expired(pending.created_at, now)) {
            pending.state = AuthzState::expired;
            continue;
        }
        open.push_back(&pending);
    }
    std::sort(open.begin(), open.end(),
              [](const auto* a, const auto* b) { return a->sequence < b->sequence; });
    std::vector<AuthorizationRequest> out;
    for (const auto* p : open) {
        out.push_back({p->auth_id, p->session_id, p->o, core::hex_encode(p->c)});
    }
    return out;
}

AuthzState Server::authorization_state(const std::string& auth_id) {
    const auto now = clock_->now();
    std::lock_guard lock(mu_);
    const auto it = authorizations_.find(auth_id);
    if (it == authorizations_.end()) {
        fail(Errc::not_found, "unknown authorization");
    }
    auto& pending = it->second;
    if (pending.state == AuthzState::pending && pending_expired(pending.created_at, now)) {
        pending.state = AuthzState::expired;
    }
    return pending.state;
}

void Server::confirm_authorization(const std::string& auth_id, core::ByteView M) {
    const auto now = clock_->now();
    std::lock_guard lock(mu_);
    const auto it = authorizations_.find(auth_id);
    if (it == authorizations_.end()) {
        fail(Errc::gone, "unknown or consumed authorization");
    }
    auto& pending = it->second;
    if (pending.state == AuthzState::pending && pending_expired(pending.created_at, now)) {
        pending.state = AuthzState::expired;
    }
    if (pending.state != AuthzState::pending) {
        fail(Errc::gone, "unknown or consumed authorization");
    }
    const auto session = sessions_.find(pending.session_id);
    if (session == sessions_.end() || !session->second.valid_at(now)) {
        pending.state = AuthzState::expired;
        fail(Errc::session_expired, "session expired");
    }
    const auto expected = core::authorization_mac(session->second.key.K, pending.o, pending.c);
    if (!core::constant_time_equals(expected, M)) {
        pending.state = AuthzState::denied;
        fail(Errc::denied, "authorization denied");
    }
    pending.state = AuthzState::confirmed;
}

void Server::logout(const std::string& session_id, core::ByteView M) {
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(session_id);
    if (it == sessions_.end()) {
        fail(Errc::not_found, "unknown session");
    }
    auto& session = it->second;
    const auto expected = core::logout_mac(session.key.K);
    if (!core::constant_time_equals(expected, M)) {
        fail(Errc::denied, "logout denied");
    }
    if (!session.revoked) {
        session.revoked = true;
        for (auto& [id, pending] : authorizations_) {
            if (pending.session_id == session_id && pending.state == AuthzState::pending) {
                pending.state = AuthzState::expired;
            }
        }
        persist_locked();
    }
}

BrowserSession Server::check_browser_token(const std::string& token) {
    const auto now = clock_->now();
    std::lock_guard lock(mu_);
    const auto it = browser_tokens_.find(token);
    if (it == browser_tokens_.end()) {
        fail(Errc::authentication_failed, "invalid browser token");
    }
    const auto& session = sessions_.at(it->second);
    if (!session.valid_at(now)) {
        fail(Errc::authentication_failed, "invalid browser token");
    }
    return {session.iu, session.session_id, session.expires_at()};
}

void Server::browser_logout(const std::string& token) {
    std::lock_guard lock(mu_);
    const auto it = browser_tokens_.find(token);
    if (it == browser_tokens_.end()) {
        fail(Errc::authentication_failed, "invalid browser token");
    }
    auto& session = sessions_.at(it->second);
    if (!session.revoked) {
        session.revoked = true;
        persist_locked();
    }
}

std::size_t Server::sweep_expired(std::int64_t now) {
    std::lock_guard lock(mu_);
    std::size_t count = 0;
    const std::int64_t retention = 10 * config_.pending_window_seconds;

    for (auto it = logins_.begin(); it != logins_.end();) {
        auto& pending = it->second;
        if (pending.state == LoginState::awaiting_authenticator &&
            pending_expired(pending.created_at, now)) {
            pending.state = LoginState::expired;
            ++count;
        }
        const bool terminal = pending.state != LoginState::awaiting_authenticator &&
                              pending.state != LoginState::verifying;
        if (terminal && now >= pending.created_at + retention) {
            it = logins_.erase(it);
        } else {
            ++it;
        }
    }
    for (auto it = authorizations_.begin(); it != authorizations_.end();) {
        auto& pending = it->second;
        if (pending.state == AuthzState::pending && pending_expired(pending.created_at, now)) {
            pending.state = AuthzState::expired;
            ++count;
        }
        if (pending.state != AuthzState::pending && now >= pending.created_at + retention) {
            it = authorizations_.erase(it);
        } else {
            ++it;
        }
    }
    bool sessions_changed = false;
    for (auto& [id, session] : sessions_) {
        if (!session.swept && !session.revoked && !session.key.valid_at(now)) {
            session.swept = true;
            sessions_changed = true;
            ++count;
        }
    }
    std::erase_if(rate_windows_, [&](const auto& entry) {
        return now >= entry.second.first + config_.rate_window_seconds;
    });
    if (sessions_changed) {
        persist_locked();
    }
    return count;
}

std::optional<UserRecord> Server::find_user(const std::string& iu) const {
    std::lock_guard lock(mu_);
    const auto it = users_.find(iu);
    if (it == users_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::vector<UserRecord> Server::users() const {
    std::lock_guard lock(mu_);
    std::vector<UserRecord> out;
    for (const auto& [iu, user] : users_) {
        out.push_back(user);
    }
    return out;
}

std::vector<SessionRecord> Server::active_sessions() const {
    const auto now = clock_->now();
    std::lock_guard lock(mu_);
    std::vector<SessionRecord> out;
    for (const auto& [id, session] : sessions_) {
        if (session.valid_at(now)) {
            out.push_back(session);
        }
    }
    return out;
}

} // namespace zerotwo::server
