// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "authenticator/passphrase.hpp"
#include "authenticator/secret_store.hpp"
#include "core/errors.hpp"
#include "core/golden.hpp"
#include "core/protocol.hpp"
#include "server/server.hpp"
#include "sim/dictionary.hpp"
#include "sim/harness.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>

using namespace zerotwo;
using namespace zerotwo::core;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Result {
    bool ok = false;
    std::string detail;
};

int failures = 0;

void criterion(const char* name, const std::function<Result()>& body) {
    Result r;
    try {
        r = body();
    } catch (const std::exception& e) {
        r = {false, std::string("threw: ") + e.what()};
    }
    std::printf("%s %s: %s\n", r.ok ? "PASS" : "FAIL", name, r.detail.c_str());
    std::fflush(stdout);
    if (!r.ok) ++failures;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// nullopt when the call went through.
std::optional<Errc> code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

bool accepted(const std::function<void()>& fn) {
    try {
        fn();
        return true;
    } catch (const Error&) {
        return false;
    }
}

Result small_group() {
    const auto start = Clock::now();
    const auto group = GroupProfile::small_test(BigInt(3), BigInt(7));
    const IdentityPair id{"alice", "example.org"};
    const EffectiveSecret x{BigInt(6)};
    const BigInt a(5);
    const BigInt b(3);
    const auto v = compute_verifier(x, group);
    const auto eph = server_ephemeral_from(v, b, group);
    const auto response = client_respond_with(id, x, a, eph.B, 3600, group);
    const auto u = scrambler(response.A, eph.B, group);
    const auto s_client = client_premaster(eph.B, x.x, a, u, group);
    const auto s_server = server_premaster(response.A, v, u, b, group);
    const auto direct = mod_exp(group.g, ((a + u * x.x) * b) % BigInt(22), group.n);
    const auto key = server_complete_login(id, v, eph, response.A, response.M, 3600, group, 0, 3600);
    const double elapsed = seconds_since(start);
    const bool ok = s_client == BigInt(11) && s_server == BigInt(11) && direct == BigInt(11) &&
                    key.K == response.K && key.K == session_key_from(BigInt(11)) && elapsed < 1.0;
    return {ok, "S_client=" + s_client.to_hex() + " S_server=" + s_server.to_hex() + " direct=" +
                    direct.to_hex() + " in " + fmt(elapsed) + " s"};
}

Result production_agreement() {
    const auto start = Clock::now();
    const auto group = GroupProfile::production();
    SystemRandom rng;
    int mismatches = 0;
    for (int i = 0; i < 100; ++i) {
        const IdentityPair id{"user" + hex_encode(rng.bytes(4)), "site" + std::to_string(i) + ".example"};
        const MasterSecret p(rng.bytes(24), SecretOrigin::imported);
        const auto v = compute_verifier(derive_x(id, p), group);
        const auto eph = server_begin_login(v, group, rng);
        const auto response = client_respond(id, p, eph.B, 3600, group, rng);
        try {
            const auto key = server_complete_login(id, v, eph, response.A, response.M, 3600, group, 0, 3600);
            if (key.K != response.K) ++mismatches;
        } catch (const Error&) {
            ++mismatches;
        }
    }
    const double elapsed = seconds_since(start);
    return {mismatches == 0 && elapsed < 60.0,
            "100 agreements, " + std::to_string(mismatches) + " failures, " + fmt(elapsed) + " s"};
}

// Server with the rate limit lifted so every trial gets a fresh challenge.
struct Bench {
    std::shared_ptr<ManualClock> clock = std::make_shared<ManualClock>();
    std::shared_ptr<SystemRandom> rng = std::make_shared<SystemRandom>();
    server::Server server;

    static server::ServerConfig config() {
        server::ServerConfig c;
        c.domain = "bank.example";
        c.session_cap_seconds = 30ull * 24 * 3600;
        c.login_rate_limit = 1'000'000;
        return c;
    }

    Bench() : server(config(), GroupProfile::production(), clock, rng) {}

    void enroll(const std::string& iu, const MasterSecret& p) {
        server.signup_init(iu);
        server.enroll(iu, compute_verifier(derive_x({iu, "bank.example"}, p), server.group()));
    }
};

std::string mutate_text(const std::string& s, RandomSource& rng) {
    auto out = s;
    const auto at = uniform_index(rng, out.size());
    char repl;
    do {
        repl = static_cast<char>('a' + uniform_index(rng, 26));
    } while (repl == out[at]);
    out[at] = repl;
    return out;
}

BigInt flip_bit(const BigInt& value, RandomSource& rng) {
    auto bytes = encode_int(value);
    const auto bit = uniform_index(rng, bytes.size() * 8);
    bytes[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    return decode_int(bytes);
}

Result soundness() {
    Bench bench;
    const std::string iu = "alice";
    const std::string is = "bank.example";
    const auto p = MasterSecret::passphrase("correct horse battery staple");
    bench.enroll(iu, p);
    auto& rng = *bench.rng;
    const auto& group = bench.server.group();
    const std::uint64_t d = 3600;

    std::map<std::string, int> false_accepts;
    std::map<std::string, int> other_errors;
    const std::vector<std::string> fields{"p", "iu", "is", "A", "B", "d"};
    for (const auto& field : fields) {
        for (int trial = 0; trial < 64; ++trial) {
            const auto challenge = bench.server.login_init(iu);
            const auto B = BigInt::from_hex(challenge.B);
            IdentityPair client_id{iu, is};
            MasterSecret client_p = p;
            BigInt client_B = B;
            std::uint64_t sent_d = d;
            if (field == "p") {
                auto bytes = Bytes(p.bytes().begin(), p.bytes().end());
                bytes[uniform_index(rng, bytes.size())] ^= static_cast<std::uint8_t>(1 + uniform_index(rng, 255));
                client_p = MasterSecret(bytes, SecretOrigin::imported);
            } else if (field == "iu") {
                client_id.iu = mutate_text(iu, rng);
            } else if (field == "is") {
                client_id.is = mutate_text(is, rng);
            } else if (field == "B") {
                do {
                    client_B = flip_bit(B, rng);
                } while (client_B.is_zero() || client_B >= group.n);
            }
            auto response = client_respond(client_id, client_p, client_B, d, group, rng);
            if (field == "A") {
                response.A = flip_bit(response.A, rng);
            } else if (field == "d") {
                do {
                    sent_d = 1 + uniform_index(rng, Bench::config().session_cap_seconds);
                } while (sent_d == d);
            }
            const auto code = code_of([&] {
                bench.server.login_complete(challenge.login_id, iu, response.A, response.M, sent_d);
            });
            if (!code) {
                ++false_accepts[field];
            } else if (code != Errc::authentication_failed) {
                ++other_errors[field];
            }
        }
    }
    int total_false = 0;
    int total_other = 0;
    std::string detail;
    for (const auto& field : fields) {
        total_false += false_accepts[field];
        total_other += other_errors[field];
        detail += field + ":64 ";
    }
    detail += "perturbations, " + std::to_string(total_false) + " false accepts, " +
              std::to_string(total_other) + " non-authentication-failed outcomes";
    return {total_false == 0 && total_other == 0, detail};
}

Result replay() {
    Bench bench;
    const auto p = MasterSecret::passphrase("correct horse battery staple");
    bench.enroll("alice", p);
    auto call = [&](const std::string& path, const json& body) {
        return bench.server.handle({"POST", path, body.dump(), {}, {}}).status;
    };
    const auto init = json::parse(bench.server.handle({"POST", "/login/init", R"({"iu":"alice"})", {}, {}}).body);
    const auto response = client_respond({"alice", "bank.example"}, p, BigInt::from_hex(init.at("B").get<std::string>()),
                                         3600, bench.server.group(), *bench.rng);
    const json complete{{"login_id", init.at("login_id")},
                        {"iu", "alice"},
                        {"A", response.A.to_hex()},
                        {"M", hex_encode(response.M)},
                        {"d", 3600}};
    const int first = call("/login/complete", complete);
    const int again = call("/login/complete", complete);
    const auto sid = json::parse(bench.server.handle({"GET", "/login/status/" + init.at("login_id").get<std::string>(), "", {}, {}}).body)
                         .at("session_id")
                         .get<std::string>();

    const auto authz = json::parse(
        bench.server.handle({"POST", "/authz/request", json{{"session_id", sid}, {"o", "pay 10"}}.dump(), {}, {}}).body);
    const auto c_bytes = hex_decode(authz.at("c").get<std::string>());
    Nonce c{};
    std::copy(c_bytes.begin(), c_bytes.end(), c.begin());
    const json confirm{{"auth_id", authz.at("auth_id")},
                       {"M", hex_encode(authorization_mac(response.K, "pay 10", c))}};
    const int confirm_first = call("/authz/confirm", confirm);
    const int confirm_again = call("/authz/confirm", confirm);

    const json logout{{"session_id", sid}, {"M", hex_encode(logout_mac(response.K))}};
    const int logout_first = call("/logout", logout);
    const int logout_again = call("/logout", logout);

    const bool ok = first == 200 && again == 410 && confirm_first == 204 && confirm_again == 410 &&
                    logout_first == 204 && logout_again == 204;
    return {ok, "login " + std::to_string(first) + "->" + std::to_string(again) + ", authz " +
                    std::to_string(confirm_first) + "->" + std::to_string(confirm_again) + ", logout " +
                    std::to_string(logout_first) + "->" + std::to_string(logout_again)};
}

Result zero_knowledge() {
    std::size_t leaks = 0;
    std::size_t messages = 0;
    std::size_t not_passed = 0;
    for (const auto& scenario : sim::scenarios()) {
        const auto report = sim::run_scenario(scenario, sim::default_seed());
        leaks += report.leaks.size();
        messages += report.transcript.messages().size();
        if (!report.passed) ++not_passed;
    }
    // The detector must see a planted secret.
    sim::Transcript control;
    control.record({0, "x", sim::Direction::request, "POST", "/x", 0, R"({"K":"00ABCDEF"})"});
    const bool detector_works = sim::find_leaks(control, {{"K", {0x00, 0xab, 0xcd, 0xef}}}).size() == 1;
    return {leaks == 0 && not_passed == 0 && detector_works,
            std::to_string(sim::scenarios().size()) + " scenarios, " + std::to_string(messages) +
                " messages, " + std::to_string(leaks) + " occurrences of p/x/S/K, " +
                std::to_string(not_passed) + " scenarios diverged"};
}

Result expiry() {
    std::string detail;
    bool ok = true;
    for (std::uint64_t d : {std::uint64_t{1}, std::uint64_t{60}, std::uint64_t{3600}}) {
        Bench bench;
        const auto p = MasterSecret::passphrase("correct horse battery staple");
        bench.enroll("alice", p);
        const auto t0 = bench.clock->now();
        const auto challenge = bench.server.login_init("alice");
        const auto response = client_respond({"alice", "bank.example"}, p, BigInt::from_hex(challenge.B), d,
                                             bench.server.group(), *bench.rng);
        const auto done = bench.server.login_complete(challenge.login_id, "alice", response.A, response.M, d);
        const SessionKey key{response.K, t0, d};
        auto nonce_of = [](const server::AuthorizationRequest& r) {
            const auto bytes = hex_decode(r.c);
            Nonce c{};
            std::copy(bytes.begin(), bytes.end(), c.begin());
            return c;
        };

        // Last valid second: both sides accept.
        const auto last = t0 + static_cast<std::int64_t>(d) - 1;
        bench.clock->set(last);
        const auto r1 = bench.server.request_authorization(done.session_id, "pay");
        const bool before = accepted([&] {
            bench.server.confirm_authorization(r1.auth_id, mac_authorize(key, r1.o, nonce_of(r1), last));
        });
        const auto r2 = bench.server.request_authorization(done.session_id, "pay");
        const auto late_mac = authorization_mac(key.K, r2.o, nonce_of(r2));

        // Exactly at expiry and after: both sides refuse.
        bench.clock->set(t0 + static_cast<std::int64_t>(d));
        const bool client_at = code_of([&] { mac_authorize(key, "pay", Nonce{}, t0 + static_cast<std::int64_t>(d)); }) ==
                               Errc::session_expired;
        const bool server_at = code_of([&] { bench.server.confirm_authorization(r2.auth_id, late_mac); }) ==
                               Errc::session_expired;
        const bool client_after = code_of([&] {
                                      mac_authorize(key, "pay", Nonce{}, t0 + static_cast<std::int64_t>(d) + 1);
                                  }) == Errc::session_expired;
        bench.clock->set(t0 + static_cast<std::int64_t>(d) + 1);
        const bool server_after = code_of([&] { bench.server.request_authorization(done.session_id, "pay"); }) ==
                                  Errc::session_expired;
        const bool row = before && client_at && server_at && client_after && server_after;
        ok = ok && row;
        detail += "d=" + std::to_string(d) + (row ? " exact; " : " WRONG; ");
    }
    return {ok, detail + "accept at t0+d-1, reject at t0+d and t0+d+1"};
}

Result dictionary() {
    const auto group = GroupProfile::production();
    const IdentityPair id{"alice@bank.example", "bank.example"};
    const auto weak_v = compute_verifier(derive_x(id, MasterSecret::passphrase("password123")), group);
    const auto list = sim::weak_candidates(10000);
    const auto start = Clock::now();
    const auto weak = sim::dictionary_attack(weak_v, id, list, group);
    const double weak_seconds = seconds_since(start);
    const bool weak_ok = weak.recovered && *weak.recovered == "password123" && weak_seconds < 30.0;

    SystemRandom rng;
    const auto strong = auth::generate_passphrase({}, auth::Wordlist::bundled(), rng);
    const auto strong_v = compute_verifier(derive_x(id, strong), group);
    // The attacker knows the generator: weak list first, then fresh 6-word draws.
    SeededRandom attacker(Bytes{'a', 't', 't', 'a', 'c', 'k'});
    std::size_t served = 0;
    const auto big = sim::dictionary_attack(
        strong_v, id,
        [&](std::string& out) {
            if (served < list.size()) {
                out = list[served++];
            } else {
                out = std::string(auth::generate_passphrase({}, auth::Wordlist::bundled(), attacker).text());
            }
            return true;
        },
        1'000'000, group);
    const bool strong_ok = !big.recovered && big.trials == 1'000'000;
    return {weak_ok && strong_ok,
            std::string("weak secret ") + (weak.recovered ? "recovered" : "NOT recovered") + " after " +
                std::to_string(weak.trials) + " of 10000 candidates in " + fmt(weak_seconds) +
                " s; 6-word passphrase " + (big.recovered ? "RECOVERED" : "not recovered") + " after " +
                std::to_string(big.trials) + " trials (" + fmt(big.seconds) + " s)"};
}

Result store_security() {
    SeededRandom rng(Bytes{'s', 't', 'o', 'r', 'e'});
    auto store = auth::SecretStore::create_in_memory(auth::PasswordUnlock("right password"),
                                                     auth::KdfParams::fast(), rng);
    store.contents().secrets.push_back({MasterSecret::passphrase("correct horse battery staple"), 1});
    store.contents().accounts.push_back({"bank", {"alice", "bank.example"}, 0, true});
    store.save(rng);
    const auto sealed = store.sealed();

    int false_unlocks = 0;
    if (accepted([&] { auth::SecretStore::unlock_sealed(sealed, auth::PasswordUnlock("wrong password")); })) {
        ++false_unlocks;
    }
    // Distinct bit positions across ciphertext and tag.
    constexpr std::size_t kHeader = 43;
    const std::size_t region_bits = (sealed.size() - kHeader) * 8;
    std::set<std::size_t> positions;
    SeededRandom picker(Bytes{'f', 'l', 'i', 'p', 's'});
    while (positions.size() < 256) positions.insert(uniform_index(picker, region_bits));
    for (const auto bit : positions) {
        auto flipped = sealed;
        flipped[kHeader + bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
        if (accepted([&] { auth::SecretStore::unlock_sealed(flipped, auth::PasswordUnlock("right password")); })) {
            ++false_unlocks;
        }
    }
    const bool intact = accepted([&] { auth::SecretStore::unlock_sealed(sealed, auth::PasswordUnlock("right password")); });
    return {false_unlocks == 0 && intact,
            "wrong password + " + std::to_string(positions.size()) + " ciphertext bit flips, " +
                std::to_string(false_unlocks) + " false unlocks"};
}

Result golden(const char* path) {
    const auto vectors = read_golden_vectors(path);
    std::size_t checked = 0;
    std::vector<std::string> mismatched;
    auto expect = [&](const std::string& name, const Bytes& actual) {
        ++checked;
        const auto it = vectors.find(name);
        if (it == vectors.end() || it->second != actual) mismatched.push_back(name);
    };
    auto d = [](const Digest& x) { return Bytes(x.begin(), x.end()); };

    expect("enc_0", encode_int(BigInt(0)));
    expect("enc_255", encode_int(BigInt(255)));
    expect("enc_256", encode_int(BigInt(256)));
    expect("frame_empty", frame({}));
    expect("frame_ab", frame(Bytes{0xab}));
    expect("hash_no_parts", d(hash_digest(std::span<const ByteView>{})));
    expect("hash_one_empty_part", d(hash_digest({ByteView{}})));
    expect("hash_enc23_enc5", d(hash_digest({encode_int(BigInt(23)), encode_int(BigInt(5))})));

    const auto small = GroupProfile::small_test();
    expect("small_k_derived", encode_int(small.k));
    expect("small_l", d(small.l));
    const auto prod = GroupProfile::production();
    expect("prod_n", encode_int(prod.n));
    expect("prod_g", encode_int(prod.g));
    expect("prod_k", encode_int(prod.k));
    expect("prod_l", d(prod.l));
    expect("prod_k_swapped", d(hash_digest({encode_int(prod.g), encode_int(prod.n)})));

    const auto p = MasterSecret::passphrase("correct horse battery staple");
    const IdentityPair alice{"alice", "example.org"};
    const auto x = derive_x(alice, p);
    expect("x_alice", encode_int(x.x));
    expect("x_alice_a_example", encode_int(derive_x({"alice", "a.example"}, p).x));
    expect("x_alice_b_example", encode_int(derive_x({"alice", "b.example"}, p).x));
    expect("v_alice_prod", encode_int(compute_verifier(x, prod)));

    Digest k0b{};
    k0b.fill(0x0b);
    Nonce ones{};
    ones.fill(0x01);
    expect("mac_authorize_transfer", d(authorization_mac(k0b, "transfer 100", ones)));
    expect("mac_logout", d(logout_mac(k0b)));
    const auto fp = hash_digest({as_bytes("alice"), as_bytes("example.org"), encode_int(BigInt(123456789))});
    expect("fingerprint_alice_b_123456789", Bytes(fp.begin(), fp.begin() + 8));

    const auto sg = GroupProfile::small_test(BigInt(3), BigInt(7));
    const EffectiveSecret sx{BigInt(6)};
    const auto sv = compute_verifier(sx, sg);
    const auto seph = server_ephemeral_from(sv, BigInt(3), sg);
    const auto sr = client_respond_with(alice, sx, BigInt(5), seph.B, 3600, sg);
    expect("small_v", encode_int(sv));
    expect("small_B", encode_int(seph.B));
    expect("small_A", encode_int(sr.A));
    expect("small_S", encode_int(client_premaster(seph.B, sx.x, BigInt(5), BigInt(7), sg)));
    expect("small_K", d(sr.K));
    expect("small_M", d(sr.M));

    const auto a = BigInt::from_bytes(vectors.at("prod_fixed_a"));
    const auto b = BigInt::from_bytes(vectors.at("prod_fixed_b"));
    const auto v = compute_verifier(x, prod);
    const auto eph = server_ephemeral_from(v, b, prod);
    const auto r = client_respond_with(alice, x, a, eph.B, 28800, prod);
    const auto u = scrambler(r.A, eph.B, prod);
    expect("prod_B", encode_int(eph.B));
    expect("prod_A", encode_int(r.A));
    expect("prod_u", encode_int(u));
    expect("prod_S", encode_int(client_premaster(eph.B, x.x, a, u, prod)));
    expect("prod_K", d(r.K));
    expect("prod_M", d(r.M));

    std::string detail = std::to_string(checked - mismatched.size()) + "/" + std::to_string(checked) +
                         " vectors match";
    for (const auto& name : mismatched) detail += " " + name;
    return {mismatched.empty() && checked + 2 == vectors.size(), detail};
}

} // namespace

int main(int argc, char** argv) {
    const char* golden_path = argc > 1 ? argv[1] : ZEROTWO_GOLDEN_PATH;
    criterion("small-group oracle equivalence", small_group);
    criterion("production-group agreement", production_agreement);
    criterion("soundness suite", soundness);
    criterion("replay suite", replay);
    criterion("zero-knowledge transcripts", zero_knowledge);
    criterion("expiry boundaries", expiry);
    criterion("dictionary demonstration", dictionary);
    criterion("store security", store_security);
    criterion("golden vectors", [&] { return golden(golden_path); });
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
