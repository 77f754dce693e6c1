#include "sim/dictionary.hpp"

#include "authenticator/passphrase.hpp"
#include "core/errors.hpp"
#include "core/protocol.hpp"

#include <openssl/bn.h>

#include <chrono>
#include <set>

namespace zerotwo::sim {

namespace {

struct BnDeleter {
    void operator()(BIGNUM* bn) const { BN_free(bn); }
};
using Bn = std::unique_ptr<BIGNUM, BnDeleter>;

Bn bn_new() {
    Bn bn(BN_new());
    if (!bn) fail(Errc::internal, "BN_new failed");
    return bn;
}

// w bits of a big-endian 256-bit value starting at bit position pos.
unsigned window_at(std::span<const std::uint8_t, 32> e, int pos, int w) {
    unsigned value = 0;
    for (int i = w - 1; i >= 0; --i) {
        const int bit = pos + i;
        value <<= 1;
        if (bit < 256) {
            value |= (e[31 - bit / 8] >> (bit % 8)) & 1u;
        }
    }
    return value;
}

} // namespace

struct FixedBaseExp::State {
    int window = 0;
    int windows = 0;
    std::size_t per_window = 0;
    BN_CTX* ctx = nullptr;
    BN_MONT_CTX* mont = nullptr;
    std::vector<Bn> table; // [i * per_window + (d - 1)] = g^(d * 2^(w*i)), Montgomery form
    Bn one;
    Bn target;
    Bn acc;
    Bn modulus;

    ~State() {
        BN_MONT_CTX_free(mont);
        BN_CTX_free(ctx);
    }

    void evaluate(std::span<const std::uint8_t, 32> e) {
        bool started = false;
        for (int i = 0; i < windows; ++i) {
            const unsigned d = window_at(e, i * window, window);
            if (d == 0) continue;
            const BIGNUM* entry = table[static_cast<std::size_t>(i) * per_window + d - 1].get();
            if (!started) {
                if (!BN_copy(acc.get(), entry)) fail(Errc::internal, "BN_copy failed");
                started = true;
            } else if (!BN_mod_mul_montgomery(acc.get(), acc.get(), entry, mont, ctx)) {
                fail(Errc::internal, "BN_mod_mul_montgomery failed");
            }
        }
        if (!started && !BN_copy(acc.get(), one.get())) {
            fail(Errc::internal, "BN_copy failed");
        }
    }
};

FixedBaseExp::FixedBaseExp(const core::BigInt& g, const core::BigInt& n, int window_bits,
                           int exponent_bits)
    : state_(std::make_unique<State>()) {
    if (window_bits < 1 || window_bits > 16 || exponent_bits != 256) {
        fail(Errc::invalid_argument, "unsupported comb shape");
    }
    auto& s = *state_;
    s.window = window_bits;
    s.windows = (exponent_bits + window_bits - 1) / window_bits;
    s.per_window = (std::size_t{1} << window_bits) - 1;
    s.ctx = BN_CTX_new();
    s.mont = BN_MONT_CTX_new();
    s.modulus = bn_new();
    BN_copy(s.modulus.get(), n.raw());
    if (!s.ctx || !s.mont || !BN_MONT_CTX_set(s.mont, s.modulus.get(), s.ctx)) {
        fail(Errc::internal, "Montgomery setup failed");
    }
    s.one = bn_new();
    s.target = bn_new();
    s.acc = bn_new();
    BN_to_montgomery(s.one.get(), BN_value_one(), s.mont, s.ctx);

    Bn base = bn_new(); // g^(2^(w*i)) in Montgomery form
    BN_to_montgomery(base.get(), g.raw(), s.mont, s.ctx);
    s.table.reserve(static_cast<std::size_t>(s.windows) * s.per_window);
    for (int i = 0; i < s.windows; ++i) {
        Bn current = bn_new();
        BN_copy(current.get(), base.get());
        for (std::size_t d = 1; d <= s.per_window; ++d) {
            Bn entry = bn_new();
            BN_copy(entry.get(), current.get());
            s.table.push_back(std::move(entry));
            BN_mod_mul_montgomery(current.get(), current.get(), base.get(), s.mont, s.ctx);
        }
        // current = base^(2^w) now
        BN_copy(base.get(), current.get());
    }
}

FixedBaseExp::~FixedBaseExp() = default;

void FixedBaseExp::set_target(const core::BigInt& value) {
    BN_to_montgomery(state_->target.get(), value.raw(), state_->mont, state_->ctx);
}

bool FixedBaseExp::matches(std::span<const std::uint8_t, 32> exponent) const {
    state_->evaluate(exponent);
    return BN_cmp(state_->acc.get(), state_->target.get()) == 0;
}

core::BigInt FixedBaseExp::pow(const core::BigInt& exponent) const {
    if (exponent.bit_length() > 256) {
        fail(Errc::invalid_argument, "exponent wider than 256 bits");
    }
    std::array<std::uint8_t, 32> e{};
    const auto bytes = exponent.to_bytes();
    std::copy(bytes.begin(), bytes.end(), e.end() - static_cast<std::ptrdiff_t>(bytes.size()));
    state_->evaluate(e);
    core::BigInt out;
    BN_from_montgomery(out.raw(), state_->acc.get(), state_->mont, state_->ctx);
    return out;
}

AttackReport dictionary_attack(const core::BigInt& v, const core::IdentityPair& identity,
                               const std::function<bool(std::string&)>& next,
                               std::uint64_t max_trials, const core::GroupProfile& group) {
    const auto started = std::chrono::steady_clock::now();
    AttackReport report;
    FixedBaseExp comb(group.g, group.n);
    comb.set_target(v);
    std::string candidate;
    while (report.trials < max_trials && next(candidate)) {
        ++report.trials;
        const auto x = core::hash_digest({core::as_bytes(identity.iu), core::as_bytes(identity.is),
                                          core::as_bytes(candidate)});
        if (comb.matches(x)) {
            report.recovered = candidate;
            break;
        }
    }
    report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

AttackReport dictionary_attack(const core::BigInt& v, const core::IdentityPair& identity,
                               std::span<const std::string> candidates,
                               const core::GroupProfile& group) {
    std::size_t i = 0;
    return dictionary_attack(
        v, identity,
        [&](std::string& out) {
            if (i >= candidates.size()) return false;
            out = candidates[i++];
            return true;
        },
        candidates.size(), group);
}

std::vector<std::string> weak_candidates(std::size_t count) {
    static const char* const kBases[] = {
        "password", "123456", "qwerty", "letmein", "dragon", "monkey", "sunshine", "iloveyou",
        "princess", "football", "baseball", "welcome", "shadow", "master", "superman", "trustno1",
        "abc123", "admin", "login", "starwars", "hello", "freedom", "whatever", "passw0rd",
    };
    static const char* const kSuffixes[] = {"", "1", "12", "123", "1234", "!", "2023", "2024",
                                            "01", "007", "69", "99", "123!", "0"};
    std::vector<std::string> out;
    std::set<std::string> seen;
    auto push = [&](std::string s) {
        if (out.size() < count && seen.insert(s).second) out.push_back(std::move(s));
    };
    for (const char* base : kBases) {
        for (const char* suffix : kSuffixes) {
            push(std::string(base) + suffix);
        }
    }
    const auto& words = auth::Wordlist::bundled();
    for (std::size_t n = 0; out.size() < count; ++n) {
        push(words.at(n % words.size()) + std::to_string(n / words.size()));
    }
    return out;
}

} // namespace zerotwo::sim
