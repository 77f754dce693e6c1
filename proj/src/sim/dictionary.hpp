#pragma once

#include "core/group.hpp"
#include "core/identity.hpp"
#include "core/random.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace zerotwo::sim {

// g^e mod n for 256-bit exponents using a precomputed comb: one Montgomery
// multiplication per window of the exponent.
class FixedBaseExp {
public:
    FixedBaseExp(const core::BigInt& g, const core::BigInt& n, int window_bits = 12,
                 int exponent_bits = 256);
    ~FixedBaseExp();
    FixedBaseExp(const FixedBaseExp&) = delete;
    FixedBaseExp& operator=(const FixedBaseExp&) = delete;

    core::BigInt pow(const core::BigInt& exponent) const;
    // True iff g^exponent == target, where target was given to set_target.
    bool matches(std::span<const std::uint8_t, 32> exponent) const;
    void set_target(const core::BigInt& value);

private:
    struct State;
    std::unique_ptr<State> state_;
};

struct AttackReport {
    std::optional<std::string> recovered;
    std::uint64_t trials = 0;
    double seconds = 0;
};

// Offline attack on a stolen verifier: tests g^H(iu, is, candidate) == v.
AttackReport dictionary_attack(const core::BigInt& v, const core::IdentityPair& identity,
                               std::span<const std::string> candidates,
                               const core::GroupProfile& group);

// Same, pulling candidates from next() until it returns false or max_trials
// have been tested.
AttackReport dictionary_attack(const core::BigInt& v, const core::IdentityPair& identity,
                               const std::function<bool(std::string&)>& next,
                               std::uint64_t max_trials, const core::GroupProfile& group);

// Deterministic list of low-entropy secrets: common bases with common
// suffixes, padded with short word+digit combinations. Contains
// "password123".
std::vector<std::string> weak_candidates(std::size_t count);

} // namespace zerotwo::sim
