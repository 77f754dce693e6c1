#include "core/errors.hpp"
#include "core/golden.hpp"
#include "core/payload.hpp"
#include "core/protocol.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>

using namespace zerotwo;
using namespace zerotwo::core;

namespace {

const GoldenVectors& golden() {
    static const GoldenVectors vectors = read_golden_vectors(ZEROTWO_GOLDEN_PATH);
    return vectors;
}

Bytes gv(const std::string& name) {
    const auto it = golden().find(name);
    REQUIRE(it != golden().end());
    return it->second;
}

Bytes bytes_of(const Digest& d) { return {d.begin(), d.end()}; }

Errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected a zerotwo::Error");
    return Errc::internal;
}

const IdentityPair kAlice{"alice", "example.org"};
const auto kPassphrase = MasterSecret::passphrase("correct horse battery staple");

} // namespace

TEST_CASE("integer encoding is minimal big-endian") {
    CHECK(encode_int(BigInt(0)) == gv("enc_0"));
    CHECK(encode_int(BigInt(255)) == gv("enc_255"));
    CHECK(encode_int(BigInt(256)) == gv("enc_256"));
    CHECK(decode_int(encode_int(BigInt(0x1234567))) == BigInt(0x1234567));
    CHECK(be64(28800) == Bytes{0, 0, 0, 0, 0, 0, 0x70, 0x80});
}

TEST_CASE("frames carry a 4-byte length") {
    CHECK(frame({}) == gv("frame_empty"));
    const Bytes ab{0xab};
    CHECK(frame(ab) == gv("frame_ab"));
}

TEST_CASE("framed concatenation is injective for short tuples") {
    // All tuples of up to 3 parts over {00, 01} with total length <= 3.
    std::vector<Bytes> atoms{{}};
    for (std::size_t len = 1; len <= 3; ++len) {
        for (unsigned bits = 0; bits < (1u << len); ++bits) {
            Bytes b;
            for (std::size_t i = 0; i < len; ++i) b.push_back((bits >> i) & 1u);
            atoms.push_back(b);
        }
    }
    std::set<Bytes> encodings;
    std::size_t tuples = 0;
    std::function<void(std::vector<Bytes>&, std::size_t)> walk = [&](std::vector<Bytes>& parts,
                                                                      std::size_t used) {
        Bytes joined;
        for (const auto& p : parts) {
            const auto f = frame(p);
            joined.insert(joined.end(), f.begin(), f.end());
        }
        encodings.insert(joined);
        ++tuples;
        if (parts.size() == 3) return;
        for (const auto& a : atoms) {
            if (used + a.size() > 3) continue;
            parts.push_back(a);
            walk(parts, used + a.size());
            parts.pop_back();
        }
    };
    std::vector<Bytes> parts;
    walk(parts, 0);
    // 1 + 15 + 49 + 111 tuples of 0..3 parts, weighted by 2^length.
    CHECK(tuples == 176);
    CHECK(encodings.size() == tuples);
}

TEST_CASE("hex helpers") {
    CHECK(hex_encode(Bytes{0x00, 0xff, 0x10}) == "00ff10");
    CHECK(hex_decode("00FF10") == Bytes{0x00, 0xff, 0x10});
    CHECK(code_of([] { hex_decode("abc"); }) == Errc::parse);
    CHECK(code_of([] { hex_decode("zz"); }) == Errc::parse);
    CHECK(BigInt::from_hex("abc") == BigInt(0xabc));
    CHECK(code_of([] { BigInt::from_hex("12g4"); }) == Errc::parse);
}

TEST_CASE("hash and HMAC over framed parts match the oracle") {
    CHECK(bytes_of(hash_digest(std::span<const ByteView>{})) == gv("hash_no_parts"));
    CHECK(bytes_of(hash_digest({ByteView{}})) == gv("hash_one_empty_part"));
    const auto n = encode_int(BigInt(23));
    const auto g = encode_int(BigInt(5));
    CHECK(bytes_of(hash_digest({n, g})) == gv("hash_enc23_enc5"));

    Digest key{};
    key.fill(0x0b);
    Nonce nonce{};
    nonce.fill(0x01);
    CHECK(bytes_of(authorization_mac(key, "transfer 100", nonce)) == gv("mac_authorize_transfer"));
    CHECK(bytes_of(logout_mac(key)) == gv("mac_logout"));
}

TEST_CASE("constant-time comparison") {
    const Bytes a{1, 2, 3};
    CHECK(constant_time_equals(a, Bytes{1, 2, 3}));
    CHECK_FALSE(constant_time_equals(a, Bytes{1, 2, 4}));
    CHECK_FALSE(constant_time_equals(a, Bytes{1, 2}));
    CHECK(constant_time_equals(Bytes{}, Bytes{}));
}

TEST_CASE("group constants") {
    const auto small = GroupProfile::small_test();
    CHECK(encode_int(small.k) == gv("small_k_derived"));
    CHECK(bytes_of(small.l) == gv("small_l"));

    const auto prod = GroupProfile::production();
    CHECK(encode_int(prod.n) == gv("prod_n"));
    CHECK(encode_int(prod.g) == gv("prod_g"));
    CHECK(encode_int(prod.k) == gv("prod_k"));
    CHECK(encode_int(prod.k) != gv("prod_k_swapped"));
    CHECK(bytes_of(prod.l) == gv("prod_l"));
    CHECK(prod.n.bit_length() == 2048);
}

TEST_CASE("production modulus is a safe prime with generator 2") {
    const auto prod = GroupProfile::production();
    CHECK(is_safe_prime(prod.n));
    CHECK(is_primitive_root(prod.g, prod.n));
    CHECK_NOTHROW(validate_group(prod));
}

TEST_CASE("group validation") {
    CHECK(is_safe_prime(BigInt(23)));
    CHECK_FALSE(is_safe_prime(BigInt(29))); // 14 is not prime
    CHECK(is_primitive_root(BigInt(5), BigInt(23)));
    CHECK_FALSE(is_primitive_root(BigInt(2), BigInt(23))); // order 11
    auto bad = GroupProfile::with_derived_constants("bad", BigInt(23), BigInt(2));
    CHECK(code_of([&] { validate_group(bad); }) == Errc::config);
    auto tampered = GroupProfile::production();
    tampered.k = tampered.k + BigInt(1);
    CHECK(code_of([&] { validate_group(tampered); }) == Errc::config);
}

TEST_CASE("effective secret and verifier") {
    const auto x = derive_x(kAlice, kPassphrase);
    CHECK(encode_int(x.x) == gv("x_alice"));
    CHECK(encode_int(compute_verifier(x, GroupProfile::production())) == gv("v_alice_prod"));
}

TEST_CASE("one secret yields unrelated values per server") {
    const auto xa = derive_x({"alice", "a.example"}, kPassphrase);
    const auto xb = derive_x({"alice", "b.example"}, kPassphrase);
    CHECK(encode_int(xa.x) == gv("x_alice_a_example"));
    CHECK(encode_int(xb.x) == gv("x_alice_b_example"));
    const auto group = GroupProfile::production();
    CHECK_FALSE(compute_verifier(xa, group) == compute_verifier(xb, group));
}

TEST_CASE("fingerprint") {
    const auto group = GroupProfile::production();
    const auto fp = fingerprint(kAlice, BigInt(123456789), group);
    const auto raw = gv("fingerprint_alice_b_123456789");
    CHECK(fp == render_fingerprint(std::span<const std::uint8_t, 8>(raw.data(), 8)));
    CHECK(fp == "400c-76a0-ca49-d015");
    CHECK(code_of([&] { fingerprint(kAlice, BigInt(0), group); }) != Errc::internal);
    CHECK(code_of([&] { fingerprint(kAlice, group.n, group); }) != Errc::internal);
}

TEST_CASE("small-group transcript matches the brute-force oracle") {
    const auto group = GroupProfile::small_test(BigInt(3), BigInt(7));
    const EffectiveSecret x{BigInt(6)};
    const auto v = compute_verifier(x, group);
    CHECK(encode_int(v) == gv("small_v"));
    const auto eph = server_ephemeral_from(v, BigInt(3), group);
    CHECK(encode_int(eph.B) == gv("small_B"));
    const auto response = client_respond_with(kAlice, x, BigInt(5), eph.B, 3600, group);
    CHECK(encode_int(response.A) == gv("small_A"));
    CHECK(client_premaster(eph.B, x.x, BigInt(5), BigInt(7), group) == BigInt(11));
    CHECK(server_premaster(response.A, v, BigInt(7), BigInt(3), group) == BigInt(11));
    CHECK(encode_int(BigInt(11)) == gv("small_S"));
    CHECK(bytes_of(response.K) == gv("small_K"));
    CHECK(bytes_of(response.M) == gv("small_M"));
    const auto key = server_complete_login(kAlice, v, eph, response.A, response.M, 3600, group, 0, 3600);
    CHECK(key.K == response.K);
}

TEST_CASE("production transcript with fixed ephemerals matches the oracle") {
    const auto group = GroupProfile::production();
    const auto x = derive_x(kAlice, kPassphrase);
    const auto v = compute_verifier(x, group);
    const auto a = BigInt::from_bytes(gv("prod_fixed_a"));
    const auto b = BigInt::from_bytes(gv("prod_fixed_b"));
    const auto eph = server_ephemeral_from(v, b, group);
    CHECK(encode_int(eph.B) == gv("prod_B"));
    const auto response = client_respond_with(kAlice, x, a, eph.B, 28800, group);
    CHECK(encode_int(response.A) == gv("prod_A"));
    CHECK(encode_int(scrambler(response.A, eph.B, group)) == gv("prod_u"));
    CHECK(encode_int(client_premaster(eph.B, x.x, a, scrambler(response.A, eph.B, group), group)) ==
          gv("prod_S"));
    CHECK(bytes_of(response.K) == gv("prod_K"));
    CHECK(bytes_of(response.M) == gv("prod_M"));
}

TEST_CASE("small-group agreement over a grid of random parameters") {
    SeededRandom rng(Bytes{'g', 'r', 'i', 'd'});
    std::size_t checked = 0;
    for (int i = 0; i < 500; ++i) {
        const auto u = uniform_between(rng, BigInt(1), BigInt(21));
        const auto k = uniform_between(rng, BigInt(1), BigInt(22));
        const auto group = GroupProfile::small_test(k, u);
        const EffectiveSecret x{uniform_between(rng, BigInt(1), BigInt(21))};
        const auto a = uniform_between(rng, BigInt(1), BigInt(21));
        const auto b = uniform_between(rng, BigInt(1), BigInt(21));
        const auto v = compute_verifier(x, group);
        ServerEphemeral eph;
        try {
            eph = server_ephemeral_from(v, b, group);
        } catch (const Error& e) {
            REQUIRE(e.code() == Errc::protocol_violation); // B landed on 0
            continue;
        }
        const auto response = client_respond_with(kAlice, x, a, eph.B, 60, group);
        const auto s_client = client_premaster(eph.B, x.x, a, u, group);
        const auto s_server = server_premaster(response.A, v, u, b, group);
        const auto direct = mod_exp(group.g, ((a + u * x.x) * b) % BigInt(22), group.n);
        REQUIRE(s_client == s_server);
        REQUIRE(s_client == direct);
        const auto key = server_complete_login(kAlice, v, eph, response.A, response.M, 60, group, 0, 60);
        REQUIRE(key.K == response.K);
        ++checked;
    }
    CHECK(checked >= 450);
}

TEST_CASE("public values are range-checked") {
    const auto group = GroupProfile::small_test(BigInt(3), BigInt(7));
    const EffectiveSecret x{BigInt(6)};
    const auto v = compute_verifier(x, group);
    const auto eph = server_ephemeral_from(v, BigInt(3), group);
    CHECK(code_of([&] { client_respond_with(kAlice, x, BigInt(5), BigInt(0), 60, group); }) ==
          Errc::protocol_violation);
    CHECK(code_of([&] { client_respond_with(kAlice, x, BigInt(5), BigInt(23), 60, group); }) ==
          Errc::protocol_violation);
    const Digest zero{};
    CHECK(code_of([&] { server_complete_login(kAlice, v, eph, BigInt(0), zero, 60, group, 0, 60); }) ==
          Errc::protocol_violation);
    CHECK(code_of([&] { server_complete_login(kAlice, v, eph, BigInt(23), zero, 60, group, 0, 60); }) ==
          Errc::protocol_violation);
    CHECK(code_of([&] { compute_verifier(EffectiveSecret{BigInt(0)}, group); }) == Errc::invalid_secret);
    CHECK(code_of([&] { compute_verifier(EffectiveSecret{BigInt(22)}, group); }) == Errc::invalid_secret);
}

TEST_CASE("durations are bounded") {
    const auto group = GroupProfile::small_test(BigInt(3), BigInt(7));
    const EffectiveSecret x{BigInt(6)};
    const auto v = compute_verifier(x, group);
    const auto eph = server_ephemeral_from(v, BigInt(3), group);
    for (std::uint64_t d : {std::uint64_t{0}, std::uint64_t{3601}}) {
        const auto r = client_respond_with(kAlice, x, BigInt(5), eph.B, d, group);
        CHECK(code_of([&] { server_complete_login(kAlice, v, eph, r.A, r.M, d, group, 0, 3600); }) ==
              Errc::duration_rejected);
    }
}

TEST_CASE("wrong proof is rejected with a fixed message") {
    const auto group = GroupProfile::production();
    SystemRandom rng;
    const auto x = derive_x(kAlice, kPassphrase);
    const auto v = compute_verifier(x, group);
    const auto eph = server_begin_login(v, group, rng);
    auto response = client_respond(kAlice, MasterSecret::passphrase("wrong"), eph.B, 60, group, rng);
    try {
        server_complete_login(kAlice, v, eph, response.A, response.M, 60, group, 0, 3600);
        FAIL("accepted a wrong secret");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::authentication_failed);
        CHECK(std::string(e.what()) == "authentication failed");
    }
}

TEST_CASE("session key validity is half-open") {
    for (std::uint64_t d : {1u, 60u, 3600u}) {
        SessionKey key{{}, 1000, d};
        CHECK(key.valid_at(1000));
        CHECK(key.valid_at(1000 + static_cast<std::int64_t>(d) - 1));
        CHECK_FALSE(key.valid_at(1000 + static_cast<std::int64_t>(d)));
        const Nonce c{};
        CHECK_NOTHROW(mac_authorize(key, "op", c, 1000 + static_cast<std::int64_t>(d) - 1));
        CHECK(code_of([&] { mac_authorize(key, "op", c, 1000 + static_cast<std::int64_t>(d)); }) ==
              Errc::session_expired);
        CHECK(code_of([&] { mac_logout(key, 1000 + static_cast<std::int64_t>(d)); }) ==
              Errc::session_expired);
    }
}

TEST_CASE("authorization MAC binds the operation and the nonce") {
    Digest k{};
    k.fill(7);
    Nonce c{};
    c.fill(1);
    Nonce c2 = c;
    c2[15] ^= 1;
    CHECK(authorization_mac(k, "pay 1", c) != authorization_mac(k, "pay 2", c));
    CHECK(authorization_mac(k, "pay 1", c) != authorization_mac(k, "pay 1", c2));
    CHECK(logout_mac(k) == hmac_digest(k, {as_bytes(kLogoutOperation)}));
}

TEST_CASE("seeded randomness is reproducible and replayable") {
    SeededRandom a(Bytes{1, 2, 3});
    SeededRandom b(Bytes{1, 2, 3});
    SeededRandom c(Bytes{1, 2, 4});
    const auto first = a.bytes(100);
    CHECK(first == b.bytes(100));
    CHECK(first != c.bytes(100));

    SeededRandom inner(Bytes{9});
    RecordingRandom rec(inner);
    const auto drawn = rec.bytes(48);
    ReplayRandom replay(rec.tape());
    CHECK(replay.bytes(48) == drawn);
    CHECK(code_of([&] { replay.bytes(1); }) == Errc::internal);
}

TEST_CASE("uniform sampling stays in range") {
    SeededRandom rng(Bytes{'u'});
    for (int i = 0; i < 2000; ++i) {
        const auto v = uniform_between(rng, BigInt(5), BigInt(9));
        CHECK(v >= BigInt(5));
        CHECK(v <= BigInt(9));
        CHECK(uniform_index(rng, 7776) < 7776);
    }
}

TEST_CASE("identity validation") {
    CHECK_NOTHROW(validate_identity({"alice@example.org", "example.org"}));
    CHECK(code_of([] { validate_identity({"", "example.org"}); }) == Errc::invalid_argument);
    CHECK(code_of([] { validate_identity({"alice", ""}); }) == Errc::invalid_argument);
    CHECK(code_of([] { validate_identity({"alice", "Example.org"}); }) == Errc::invalid_argument);
    CHECK(code_of([] { validate_identity({"al\nice", "example.org"}); }) == Errc::invalid_argument);
    CHECK(looks_like_email("a@b.c"));
    CHECK_FALSE(looks_like_email("alice"));
}

TEST_CASE("out-of-band payloads round-trip") {
    const Payload enroll = EnrollPayload{"alice", "example.org", "https://example.org/enroll"};
    CHECK(decode_payload(encode_payload(enroll)) == enroll);
    const Payload login = LoginPayload{"00ff", "alice", "example.org", "0b", "0000-0000-0000-0000"};
    CHECK(decode_payload(encode_payload(login)) == login);
    const Payload authz = AuthzPayload{"01", "02", "pay", std::string(32, '0')};
    CHECK(decode_payload(encode_payload(authz)) == authz);

    CHECK(code_of([] { decode_payload("not json"); }) == Errc::parse);
    CHECK(code_of([] { decode_payload(R"({"v":2,"t":"enroll","iu":"a","is":"b","enroll_url":"c"})"); }) ==
          Errc::parse);
    CHECK(code_of([] { decode_payload(R"({"v":1,"t":"enroll","iu":"a"})"); }) == Errc::parse);
    CHECK(code_of([&] { decode_payload_as<EnrollPayload>(encode_payload(login)); }) == Errc::parse);
}

TEST_CASE("golden-vector files") {
    std::istringstream in("# comment\n\nalpha = 00ff\nbeta = \n");
    const auto v = read_golden_vectors(in);
    CHECK(v.at("alpha") == Bytes{0x00, 0xff});
    CHECK(v.at("beta").empty());
    std::ostringstream out;
    write_golden_vectors(out, v);
    std::istringstream again(out.str());
    CHECK(read_golden_vectors(again) == v);
    std::istringstream dup("a = 00\na = 01\n");
    CHECK(code_of([&] { read_golden_vectors(dup); }) == Errc::parse);
}
