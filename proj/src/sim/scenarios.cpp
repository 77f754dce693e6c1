#include "sim/dictionary.hpp"
#include "sim/harness.hpp"

#include "core/errors.hpp"
#include "core/payload.hpp"

#include <json.hpp>

#include <algorithm>
#include <thread>

namespace zerotwo::sim {

namespace {

using nlohmann::json;

constexpr const char* kAlice = "alice@bank.example";
constexpr const char* kOperation = "transfer 10 EUR to bob";

struct Reply {
    int status = 0;
    json body;
};

Reply call(LoopbackChannel& channel, const std::string& method, const std::string& path,
           const json& body = nullptr, std::map<std::string, std::string> headers = {}) {
    core::Request request{method, path, body.is_null() ? "" : body.dump(), std::move(headers), {}};
    const auto response = channel.send(request);
    Reply reply{response.status, json::parse(response.body, nullptr, false)};
    return reply;
}

std::string status(const Reply& r) { return std::to_string(r.status); }

bool sent(World& w, const std::string& method, const std::string& path) {
    for (const auto& m : w.transcript().messages()) {
        if (m.direction == Direction::request && m.method == method && m.endpoint == path) {
            return true;
        }
    }
    return false;
}

std::size_t secret_for(World& w, const std::string& weak) {
    if (!weak.empty()) {
        return w.authenticator().add_secret(core::MasterSecret::passphrase(weak));
    }
    return w.authenticator().generate_secret();
}

// Browser signup, then the authenticator ingests the enrollment payload.
Step enroll_step(std::string iu, std::string weak = {}) {
    return {"enroll " + iu, "ok", [iu, weak](World& w) {
                const auto signup = call(w.browser(), "POST", "/signup", {{"iu", iu}});
                if (signup.status != 200) return "signup " + status(signup);
                const auto index = secret_for(w, weak);
                w.authenticator().handle_enroll_payload(
                    signup.body.at("qr_payload").get<std::string>(), iu, index);
                return std::string("ok");
            }};
}

Step login_init_step(std::string iu = kAlice) {
    return {"browser login init", "200", [iu](World& w) {
                const auto r = call(w.browser(), "POST", "/login/init", {{"iu", iu}});
                if (r.status == 200) w.vars["login_id"] = r.body.at("login_id").get<std::string>();
                return status(r);
            }};
}

Step approve_step(std::string expected = "ok", std::uint64_t d = auth::kDefaultSessionSeconds) {
    return {"authenticator approve", std::move(expected), [d](World& w) {
                const auto challenge = w.authenticator().fetch_login_challenge(w.vars.at("login_id"));
                const auto session = w.authenticator().approve_login(challenge, d);
                w.vars["session_id"] = session.session_id;
                return std::string("ok");
            }};
}

Step login_status_step(std::string expected) {
    return {"browser login status", std::move(expected), [](World& w) {
                const auto r = call(w.browser(), "GET", "/login/status/" + w.vars.at("login_id"));
                if (r.status != 200) return status(r);
                if (r.body.contains("browser_token")) {
                    w.vars["browser_token"] = r.body.at("browser_token").get<std::string>();
                }
                return r.body.at("state").get<std::string>();
            }};
}

Step browser_session_step(std::string expected) {
    return {"browser session check", std::move(expected), [](World& w) {
                const auto token = w.vars.count("browser_token") ? w.vars.at("browser_token") : "";
                return status(call(w.browser(), "GET", "/session", nullptr,
                                   {{"Authorization", "Bearer " + token}}));
            }};
}

Step authz_request_step(std::string expected = "200", std::string operation = kOperation) {
    return {"browser authorization request", std::move(expected), [operation](World& w) {
                const auto r = call(w.browser(), "POST", "/authz/request",
                                    {{"session_id", w.vars.at("session_id")}, {"o", operation}});
                if (r.status == 200) w.vars["auth_id"] = r.body.at("auth_id").get<std::string>();
                return status(r);
            }};
}

Step authz_confirm_step(std::string expected = "ok") {
    return {"authenticator confirm", std::move(expected), [](World& w) {
                const auto pending = w.authenticator().pending_authorizations(w.vars.at("session_id"));
                if (pending.empty()) return std::string("nothing pending");
                w.authenticator().confirm_authorization(pending.front());
                return std::string("ok");
            }};
}

Step authz_status_step(std::string expected) {
    return {"authorization status", std::move(expected), [](World& w) {
                const auto r = call(w.browser(), "GET", "/authz/status/" + w.vars.at("auth_id"));
                return r.status == 200 ? r.body.at("state").get<std::string>() : status(r);
            }};
}

Step logout_step(std::string expected = "ok") {
    return {"authenticator remote logout", std::move(expected), [](World& w) {
                w.authenticator().remote_logout(w.vars.at("session_id"));
                return std::string("ok");
            }};
}

// Copies the delivered request for later replay by the attacker.
Step capture_step(std::string method, std::string path, std::string var) {
    return {"capture " + method + " " + path, "ok", [method, path, var](World& w) {
                auto hook = on_endpoint(method, path);
                hook.on_request = [&w, var](core::Request& r) { w.vars[var] = r.body; };
                w.phone().tamper(std::move(hook));
                return std::string("ok");
            }};
}

Step replay_step(std::string path, std::string var, std::string expected) {
    return {"attacker replays " + path, std::move(expected), [path, var](World& w) {
                const auto response = w.attacker().send({"POST", path, w.vars.at(var), {}, {}});
                return std::to_string(response.status);
            }};
}

Step advance_step(std::int64_t seconds) {
    return {"clock +" + std::to_string(seconds) + "s", "ok", [seconds](World& w) {
                w.clock().advance(seconds);
                return std::string("ok");
            }};
}

Step confirmer_step(bool answer) {
    return {answer ? "user will approve" : "user will decline", "ok", [answer](World& w) {
                w.confirmer().set_answer(answer);
                return std::string("ok");
            }};
}

Step not_sent_step(std::string method, std::string path) {
    return {"no " + path + " on the wire", "absent", [method, path](World& w) {
                return std::string(sent(w, method, path) ? "present" : "absent");
            }};
}

std::vector<Scenario> build() {
    std::vector<Scenario> all;

    all.push_back({"happy-path",
                   "enroll, log in, authorize one operation, log out remotely",
                   {enroll_step(kAlice), login_init_step(), approve_step(), login_status_step("ok"),
                    browser_session_step("200"), authz_request_step(), authz_confirm_step(),
                    authz_status_step("confirmed"), logout_step(), browser_session_step("401")}});

    all.push_back({"wrong-secret",
                   "authenticator answers with a secret other than the enrolled one",
                   {enroll_step(kAlice),
                    {"switch to another secret", "ok",
                     [](World& w) {
                         const auto index = w.authenticator().add_secret(
                             core::MasterSecret::passphrase("not-the-enrolled-secret"));
                         for (auto& a : w.store().contents().accounts) a.secret_index = index;
                         return std::string("ok");
                     }},
                    login_init_step(), approve_step("authentication-failed"),
                    login_status_step("failed"),
                    {"no local session kept", "0",
                     [](World& w) { return std::to_string(w.authenticator().sessions().size()); }}}});

    all.push_back({"tampered-b",
                   "man in the middle substitutes B on the way to the authenticator",
                   {enroll_step(kAlice),
                    {"install B substitution", "ok",
                     [](World& w) {
                         auto hook = on_endpoint("GET", "/login/challenge/");
                         hook.on_response = [&w](const core::Request&, core::Response& r) {
                             auto body = json::parse(r.body);
                             const auto& group = w.server().group();
                             body["B"] = core::mod_exp(group.g, core::BigInt(7), group.n).to_hex();
                             r.body = body.dump();
                         };
                         w.phone().tamper(std::move(hook));
                         return std::string("ok");
                     }},
                    login_init_step(), approve_step("tamper-detected"),
                    not_sent_step("POST", "/login/complete"), login_status_step("pending")}});

    all.push_back({"replayed-completion",
                   "attacker re-submits a captured login completion",
                   {enroll_step(kAlice), capture_step("POST", "/login/complete", "completion"),
                    login_init_step(), approve_step(), replay_step("/login/complete", "completion", "410"),
                    login_status_step("ok")}});

    all.push_back({"replayed-authz-nonce",
                   "attacker re-submits a captured authorization confirmation",
                   {enroll_step(kAlice), login_init_step(), approve_step(),
                    capture_step("POST", "/authz/confirm", "confirmation"), authz_request_step(),
                    authz_confirm_step(), replay_step("/authz/confirm", "confirmation", "410"),
                    authz_status_step("confirmed")}});

    all.push_back({"tampered-authz-operation",
                   "operation text altered on the way to the authenticator",
                   {enroll_step(kAlice), login_init_step(), approve_step(), authz_request_step(),
                    {"install operation rewrite", "ok",
                     [](World& w) {
                         auto hook = on_endpoint("GET", "/authz/pending/");
                         hook.on_response = [](const core::Request&, core::Response& r) {
                             auto body = json::parse(r.body);
                             for (auto& item : body["requests"]) item["o"] = "transfer 9000 EUR to mallory";
                             r.body = body.dump();
                         };
                         w.phone().tamper(std::move(hook));
                         return std::string("ok");
                     }},
                    authz_confirm_step("denied"),
                    {"user saw the altered text", "transfer 9000 EUR to mallory",
                     [](World& w) { return w.confirmer().prompts().back().operation; }},
                    authz_status_step("denied")}});

    all.push_back({"flipped-mac",
                   "one bit of the authorization MAC flipped in transit",
                   {enroll_step(kAlice), login_init_step(), approve_step(), authz_request_step(),
                    {"install MAC bit flip", "ok",
                     [](World& w) {
                         auto hook = on_endpoint("POST", "/authz/confirm");
                         hook.on_request = [](core::Request& r) {
                             auto body = json::parse(r.body);
                             auto mac = core::hex_decode(body["M"].get<std::string>());
                             mac[0] ^= 0x01;
                             body["M"] = core::hex_encode(mac);
                             r.body = body.dump();
                         };
                         w.phone().tamper(std::move(hook));
                         return std::string("ok");
                     }},
                    authz_confirm_step("denied"), authz_status_step("denied")}});

    all.push_back({"expired-session",
                   "a 60 s session is usable at +59 s and refused at +60 s",
                   {enroll_step(kAlice), login_init_step(), approve_step("ok", 60), advance_step(59),
                    authz_request_step(), advance_step(1), authz_confirm_step("session-expired"),
                    authz_request_step("440"), browser_session_step("401")}});

    all.push_back({"remote-logout",
                   "authenticator ends the session; replays of the logout stay harmless",
                   {enroll_step(kAlice), login_init_step(), approve_step(), login_status_step("ok"),
                    capture_step("POST", "/logout", "logout"), logout_step(),
                    replay_step("/logout", "logout", "204"), browser_session_step("401"),
                    authz_request_step("440"), logout_step("not-found")}});

    all.push_back({"unknown-user-decoy",
                   "login for an unknown identifier looks like any other",
                   {login_init_step("mallory@bank.example"),
                    {"decoy challenge has the usual shape", "ok",
                     [](World& w) {
                         const auto c = w.authenticator().fetch_login_challenge(w.vars.at("login_id"));
                         const auto B = core::BigInt::from_hex(c.B);
                         const bool shaped = !B.is_zero() && B < w.server().group().n &&
                                             c.fingerprint.size() == 19;
                         return std::string(shaped ? "ok" : "malformed");
                     }},
                    approve_step("not-found"),
                    {"attacker guesses a completion", "401",
                     [](World& w) {
                         return status(call(w.attacker(), "POST", "/login/complete",
                                            {{"login_id", w.vars.at("login_id")},
                                             {"iu", "mallory@bank.example"},
                                             {"A", "02"},
                                             {"M", std::string(64, '0')},
                                             {"d", 3600}}));
                     }},
                    login_status_step("failed")}});

    all.push_back({"consent-declined",
                   "the user says no to a login and to an authorization",
                   {enroll_step(kAlice), confirmer_step(false), login_init_step(),
                    approve_step("aborted"), not_sent_step("POST", "/login/complete"),
                    confirmer_step(true), login_init_step(), approve_step(), authz_request_step(),
                    confirmer_step(false), authz_confirm_step("denied"),
                    not_sent_step("POST", "/authz/confirm"), authz_status_step("pending")}});

    all.push_back({"dictionary-attack",
                   "stolen verifiers: a weak secret falls, a generated passphrase does not",
                   {enroll_step("alice", "password123"), enroll_step("bob"),
                    {"attack alice with 10^4 weak candidates", "recovered password123",
                     [](World& w) {
                         const auto user = w.server().find_user("alice");
                         const auto list = weak_candidates(10'000);
                         const auto r = dictionary_attack(user->v, {"alice", w.server().config().domain},
                                                          list, w.server().group());
                         return r.recovered ? "recovered " + *r.recovered : std::string("none");
                     }},
                    {"attack bob with the same list", "none",
                     [](World& w) {
                         const auto user = w.server().find_user("bob");
                         const auto list = weak_candidates(10'000);
                         const auto r = dictionary_attack(user->v, {"bob", w.server().config().domain},
                                                          list, w.server().group());
                         return r.recovered ? "recovered " + *r.recovered : std::string("none");
                     }}}});

    Scenario concurrent{
        "concurrent-completion",
        "eight simultaneous submissions of one completion; exactly one wins",
        {enroll_step(kAlice),
         {"hold back the completion", "ok",
          [](World& w) {
              auto hook = on_endpoint("POST", "/login/complete");
              hook.on_request = [&w](core::Request& r) {
                  w.vars["completion"] = r.body;
                  r.path = "/login/complete/held";
              };
              w.phone().tamper(std::move(hook));
              return std::string("ok");
          }},
         login_init_step(), approve_step("not-found"),
         {"release eight copies at once", "accepted=1 gone=7",
          [](World& w) {
              std::vector<int> statuses(8);
              std::vector<std::thread> threads;
              const auto body = w.vars.at("completion");
              for (std::size_t i = 0; i < statuses.size(); ++i) {
                  threads.emplace_back([&, i] {
                      statuses[i] = w.attacker().send({"POST", "/login/complete", body, {}, {}}).status;
                  });
              }
              for (auto& t : threads) t.join();
              const auto ok = std::count(statuses.begin(), statuses.end(), 200);
              const auto gone = std::count(statuses.begin(), statuses.end(), 410);
              return "accepted=" + std::to_string(ok) + " gone=" + std::to_string(gone);
          }},
         login_status_step("ok")},
        false};
    all.push_back(std::move(concurrent));
    return all;
}

} // namespace

const std::vector<Scenario>& scenarios() {
    static const std::vector<Scenario> all = build();
    return all;
}

} // namespace zerotwo::sim
