#include "authenticator/authenticator.hpp"

#include "core/errors.hpp"
#include "core/protocol.hpp"

#include <json.hpp>

#include <algorithm>

namespace zerotwo::auth {

namespace {

using nlohmann::json;

constexpr Errc kAllErrors[] = {
    Errc::invalid_argument, Errc::encoding,        Errc::parse,
    Errc::invalid_secret,   Errc::protocol_violation, Errc::authentication_failed,
    Errc::session_expired,  Errc::duration_rejected, Errc::not_found,
    Errc::conflict,         Errc::gone,              Errc::denied,
    Errc::throttled,        Errc::tamper_detected,   Errc::aborted,
    Errc::network,          Errc::io,                Errc::config,
    Errc::scenario_failed,  Errc::internal,
};

Errc errc_for_status(int status) {
    switch (status) {
    case 400: return Errc::invalid_argument;
    case 401: return Errc::authentication_failed;
    case 404: return Errc::not_found;
    case 409: return Errc::conflict;
    case 410: return Errc::gone;
    case 422: return Errc::duration_rejected;
    case 429: return Errc::throttled;
    case 440: return Errc::session_expired;
    default: return Errc::network;
    }
}

json parse_body(const core::Response& response) {
    auto body = json::parse(response.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) {
        fail(Errc::parse, "server sent a malformed response");
    }
    return body;
}

std::string field(const json& body, const char* name) {
    const auto it = body.find(name);
    if (it == body.end() || !it->is_string()) {
        fail(Errc::parse, std::string("server response lacks ") + name);
    }
    return it->get<std::string>();
}

template <std::size_t N>
std::array<std::uint8_t, N> fixed_bytes(std::string_view hex, const char* what) {
    const auto bytes = core::hex_decode(hex);
    if (bytes.size() != N) {
        fail(Errc::parse, std::string(what) + " has the wrong length");
    }
    std::array<std::uint8_t, N> out{};
    std::copy(bytes.begin(), bytes.end(), out.begin());
    return out;
}

} // namespace

void raise_for_status(const core::Response& response, std::string_view what) {
    Errc code = errc_for_status(response.status);
    auto body = json::parse(response.body, nullptr, false);
    if (response.status < 500 && body.is_object() && body.contains("error") &&
        body["error"].is_string()) {
        const auto name = body["error"].get<std::string>();
        for (const auto candidate : kAllErrors) {
            if (errc_name(candidate) == name) {
                code = candidate;
                break;
            }
        }
    }
    fail(code, std::string(what) + ": server answered " + std::to_string(response.status));
}

Authenticator::Authenticator(SecretStore& store, Transport& transport, Confirmer& confirmer,
                             std::shared_ptr<core::Clock> clock,
                             std::shared_ptr<core::RandomSource> rng, core::GroupProfile group)
    : store_(store),
      transport_(transport),
      confirmer_(confirmer),
      clock_(std::move(clock)),
      rng_(std::move(rng)),
      group_(std::move(group)) {}

std::size_t Authenticator::add_secret(core::MasterSecret secret) {
    auto& secrets = store_.contents().secrets;
    secrets.push_back({std::move(secret), clock_->now()});
    store_.save(*rng_);
    return secrets.size() - 1;
}

std::size_t Authenticator::generate_secret(const PassphraseSpec& spec, const Wordlist& words) {
    return add_secret(generate_passphrase(spec, words, *rng_));
}

const Account& Authenticator::add_account(std::string label, core::IdentityPair identity,
                                          std::size_t secret_index) {
    core::validate_identity(identity);
    if (secret_index >= store_.contents().secrets.size()) {
        fail(Errc::not_found, "no secret #" + std::to_string(secret_index));
    }
    if (find_account(identity) != nullptr) {
        fail(Errc::conflict, "account for " + identity.iu + " at " + identity.is + " exists");
    }
    auto& accounts = store_.contents().accounts;
    accounts.push_back({std::move(label), std::move(identity), secret_index, false});
    store_.save(*rng_);
    return accounts.back();
}

const Account* Authenticator::find_account(const core::IdentityPair& identity) const {
    for (const auto& a : store_.contents().accounts) {
        if (a.identity == identity) {
            return &a;
        }
    }
    return nullptr;
}

Account* Authenticator::find_account_mut(const core::IdentityPair& identity) {
    for (auto& a : store_.contents().accounts) {
        if (a.identity == identity) {
            return &a;
        }
    }
    return nullptr;
}

const Account& Authenticator::handle_enroll_payload(std::string_view payload_text,
                                                    std::string label, std::size_t secret_index) {
    const auto payload = core::decode_payload_as<core::EnrollPayload>(payload_text);
    core::IdentityPair identity{payload.iu, payload.is};
    core::validate_identity(identity);
    if (label.empty()) {
        label = identity.iu;
    }
    const auto& secrets = store_.contents().secrets;
    if (secret_index >= secrets.size()) {
        fail(Errc::not_found, "no secret #" + std::to_string(secret_index));
    }
    if (const auto* existing = find_account(identity); existing != nullptr && existing->enrolled) {
        fail(Errc::conflict, "already enrolled as " + identity.iu + " at " + identity.is);
    }

    std::string v_hex;
    {
        auto x = core::derive_x(identity, secrets[secret_index].secret);
        observe("x", core::encode_int(x.x));
        v_hex = core::compute_verifier(x, group_).to_hex();
        x.x = core::BigInt();
    }
    const auto [origin, path] = split_url(payload.enroll_url);
    const auto response = post(origin, path, json{{"iu", identity.iu}, {"v", v_hex}}.dump());
    if (response.status != 204 && response.status != 200) {
        raise_for_status(response, "enroll");
    }

    if (auto* account = find_account_mut(identity)) {
        account->label = std::move(label);
        account->secret_index = secret_index;
        account->enrolled = true;
    } else {
        store_.contents().accounts.push_back({std::move(label), identity, secret_index, true});
    }
    store_.save(*rng_);
    return *find_account(identity);
}

core::LoginPayload Authenticator::fetch_login_challenge(const std::string& login_id) {
    const auto response = get("", "/login/challenge/" + login_id);
    if (response.status != 200) {
        raise_for_status(response, "login challenge");
    }
    const auto body = parse_body(response);
    return {field(body, "login_id"), field(body, "iu"), field(body, "is"), field(body, "B"),
            field(body, "fingerprint")};
}

LocalSession Authenticator::approve_login(const core::LoginPayload& challenge, std::uint64_t d) {
    const core::IdentityPair identity{challenge.iu, challenge.is};
    const Account* account = find_account(identity);
    if (account == nullptr) {
        fail(Errc::not_found, "no account for " + identity.iu + " at " + identity.is);
    }
    if (!account->enrolled) {
        fail(Errc::not_found, "account " + account->label + " is not enrolled");
    }

    const auto B = core::BigInt::from_hex(challenge.B);
    const auto local = core::fingerprint(identity, B, group_);
    if (local != challenge.fingerprint) {
        fail(Errc::tamper_detected, "fingerprint mismatch: server shows " + challenge.fingerprint +
                                        ", computed " + local);
    }

    ConsentPrompt prompt;
    prompt.kind = ConsentKind::login;
    prompt.label = account->label;
    prompt.identity = identity;
    prompt.server_fingerprint = challenge.fingerprint;
    prompt.local_fingerprint = local;
    prompt.duration = d;
    if (!confirmer_.confirm(prompt)) {
        fail(Errc::aborted, "login declined");
    }

    const auto& secret = store_.contents().secrets.at(account->secret_index).secret;
    core::ClientResponse response;
    {
        auto x = core::derive_x(identity, secret);
        auto a = core::uniform_between(*rng_, core::BigInt(1), group_.n - core::BigInt(2));
        response = core::client_respond_with(identity, x, a, B, d, group_);
        if (observer_) {
            observe("x", core::encode_int(x.x));
            const auto u = core::scrambler(response.A, B, group_);
            observe("S", core::encode_int(core::client_premaster(B, x.x, a, u, group_)));
            observe("K", response.K);
        }
        x.x = core::BigInt();
        a = core::BigInt();
    }

    const json request{{"login_id", challenge.login_id},
                       {"iu", identity.iu},
                       {"A", response.A.to_hex()},
                       {"M", core::hex_encode(response.M)},
                       {"d", d}};
    const auto reply = post("", "/login/complete", request.dump());
    if (reply.status != 200) {
        core::secure_wipe(response.K);
        raise_for_status(reply, "login");
    }
    const auto body = parse_body(reply);

    LocalSession session;
    session.session_id = field(body, "session_id");
    session.identity = identity;
    session.key = {response.K, clock_->now(), d};
    core::secure_wipe(response.K);
    auto& sessions = store_.contents().sessions;
    std::erase_if(sessions, [&](const LocalSession& s) { return s.session_id == session.session_id; });
    sessions.push_back(session);
    store_.save(*rng_);
    return session;
}

std::vector<core::AuthzPayload> Authenticator::pending_authorizations(const std::string& session_id) {
    const auto response = get("", "/authz/pending/" + session_id);
    if (response.status != 200) {
        raise_for_status(response, "pending authorizations");
    }
    const auto body = parse_body(response);
    std::vector<core::AuthzPayload> out;
    const auto it = body.find("requests");
    if (it == body.end() || !it->is_array()) {
        fail(Errc::parse, "server response lacks requests");
    }
    for (const auto& r : *it) {
        out.push_back({field(r, "auth_id"), field(r, "session_id"), field(r, "o"), field(r, "c")});
    }
    return out;
}

void Authenticator::confirm_authorization(const core::AuthzPayload& request) {
    const LocalSession* session = find_session(request.session_id);
    if (session == nullptr) {
        fail(Errc::not_found, "no local session " + request.session_id);
    }
    const auto nonce = fixed_bytes<16>(request.c, "authorization nonce");
    const auto now = clock_->now();
    if (!session->key.valid_at(now)) {
        fail(Errc::session_expired, "session " + request.session_id + " has expired");
    }

    ConsentPrompt prompt;
    prompt.kind = ConsentKind::authorization;
    prompt.identity = session->identity;
    prompt.operation = request.o;
    if (const auto* account = find_account(session->identity)) {
        prompt.label = account->label;
    }
    if (!confirmer_.confirm(prompt)) {
        fail(Errc::denied, "authorization declined");
    }

    const auto mac = core::mac_authorize(session->key, request.o, nonce, now);
    const auto response = post(session->server, "/authz/confirm",
                               json{{"auth_id", request.auth_id}, {"M", core::hex_encode(mac)}}.dump());
    if (response.status != 204 && response.status != 200) {
        raise_for_status(response, "authorization");
    }
}

void Authenticator::remote_logout(const std::string& session_id) {
    const LocalSession* session = find_session(session_id);
    if (session == nullptr) {
        fail(Errc::not_found, "no local session " + session_id);
    }
    const auto mac = core::logout_mac(session->key.K);
    const auto response = post(session->server, "/logout",
                               json{{"session_id", session_id}, {"M", core::hex_encode(mac)}}.dump());
    if (response.status != 204 && response.status != 200) {
        raise_for_status(response, "logout");
    }
    auto& sessions = store_.contents().sessions;
    for (auto& s : sessions) {
        if (s.session_id == session_id) {
            core::secure_wipe(s.key.K);
        }
    }
    std::erase_if(sessions, [&](const LocalSession& s) { return s.session_id == session_id; });
    store_.save(*rng_);
}

const LocalSession* Authenticator::find_session(const std::string& session_id) const {
    for (const auto& s : store_.contents().sessions) {
        if (s.session_id == session_id) {
            return &s;
        }
    }
    return nullptr;
}

core::Response Authenticator::post(const std::string& origin, const std::string& path,
                                   const std::string& body) {
    core::Request request{"POST", path, body, {{"Content-Type", "application/json"}}, origin};
    return transport_.send(request);
}

core::Response Authenticator::get(const std::string& origin, const std::string& path) {
    core::Request request{"GET", path, {}, {}, origin};
    return transport_.send(request);
}

void Authenticator::observe(std::string_view name, core::ByteView value) const {
    if (observer_) {
        observer_(name, value);
    }
}

} // namespace zerotwo::auth
