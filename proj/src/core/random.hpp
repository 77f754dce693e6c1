#pragma once

#include "core/bigint.hpp"
#include "core/encoding.hpp"

#include <mutex>

namespace zerotwo::core {

// Injected source of randomness. Implementations must be safe to share
// between threads.
class RandomSource {
public:
    virtual ~RandomSource() = default;
    virtual void fill(std::span<std::uint8_t> out) = 0;

    Bytes bytes(std::size_t count);
};

// OpenSSL DRBG.
class SystemRandom final : public RandomSource {
public:
    void fill(std::span<std::uint8_t> out) override;
};

// Deterministic stream: block i is SHA-256(frame(seed) || frame(be64(i))).
// Used as the replayable tape for simulations and tests.
class SeededRandom final : public RandomSource {
public:
    explicit SeededRandom(Bytes seed);
    void fill(std::span<std::uint8_t> out) override;

    const Bytes& seed() const noexcept { return seed_; }

private:
    std::mutex mu_;
    Bytes seed_;
    std::uint64_t counter_ = 0;
    Bytes pending_;
};

// Passes draws through from another source and keeps a copy of every byte.
class RecordingRandom final : public RandomSource {
public:
    explicit RecordingRandom(RandomSource& inner) : inner_(inner) {}
    void fill(std::span<std::uint8_t> out) override;

    Bytes tape() const;

private:
    RandomSource& inner_;
    mutable std::mutex mu_;
    Bytes tape_;
};

// Serves bytes from a recorded tape; throws Errc::internal once exhausted.
class ReplayRandom final : public RandomSource {
public:
    explicit ReplayRandom(Bytes tape) : tape_(std::move(tape)) {}
    void fill(std::span<std::uint8_t> out) override;

    std::size_t remaining() const;

private:
    mutable std::mutex mu_;
    Bytes tape_;
    std::size_t offset_ = 0;
};

// Uniform integer in [low, high] by masked rejection sampling.
BigInt uniform_between(RandomSource& rng, const BigInt& low, const BigInt& high);

// Uniform index in [0, bound) without modulo bias.
std::uint64_t uniform_index(RandomSource& rng, std::uint64_t bound);

} // namespace zerotwo::core
