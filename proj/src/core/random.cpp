#include "core/random.hpp"

#include "core/errors.hpp"
#include "core/hash.hpp"

#include <openssl/rand.h>

#include <algorithm>
#include <limits>

namespace zerotwo::core {

Bytes RandomSource::bytes(std::size_t count) {
    Bytes out(count);
    fill(out);
    return out;
}

void SystemRandom::fill(std::span<std::uint8_t> out) {
    if (out.empty()) {
        return;
    }
    if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
        fail(Errc::internal, "RAND_bytes failed");
    }
}

SeededRandom::SeededRandom(Bytes seed) : seed_(std::move(seed)) {}

void SeededRandom::fill(std::span<std::uint8_t> out) {
    std::lock_guard lock(mu_);
    std::size_t written = 0;
    while (written < out.size()) {
        if (pending_.empty()) {
            const auto counter = be64(counter_++);
            const auto block = hash_digest({seed_, counter});
            pending_.assign(block.begin(), block.end());
        }
        const std::size_t take = std::min(pending_.size(), out.size() - written);
        std::copy_n(pending_.begin(), take, out.begin() + static_cast<std::ptrdiff_t>(written));
        pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(take));
        written += take;
    }
}

void RecordingRandom::fill(std::span<std::uint8_t> out) {
    inner_.fill(out);
    std::lock_guard lock(mu_);
    tape_.insert(tape_.end(), out.begin(), out.end());
}

Bytes RecordingRandom::tape() const {
    std::lock_guard lock(mu_);
    return tape_;
}

void ReplayRandom::fill(std::span<std::uint8_t> out) {
    std::lock_guard lock(mu_);
    if (tape_.size() - offset_ < out.size()) {
        fail(Errc::internal, "randomness tape exhausted");
    }
    std::copy_n(tape_.begin() + static_cast<std::ptrdiff_t>(offset_), out.size(), out.begin());
    offset_ += out.size();
}

std::size_t ReplayRandom::remaining() const {
    std::lock_guard lock(mu_);
    return tape_.size() - offset_;
}

BigInt uniform_between(RandomSource& rng, const BigInt& low, const BigInt& high) {
    if (high < low) {
        fail(Errc::invalid_argument, "empty sampling range");
    }
    const BigInt span = high - low;
    if (span.is_zero()) {
        return low;
    }
    const int bits = span.bit_length();
    const std::size_t nbytes = static_cast<std::size_t>((bits + 7) / 8);
    const int top_bits = bits - 8 * static_cast<int>(nbytes - 1);
    const auto mask = static_cast<std::uint8_t>((1u << top_bits) - 1u);
    Bytes buf(nbytes);
    // Each draw succeeds with probability > 1/2.
    for (int attempt = 0; attempt < 1024; ++attempt) {
        rng.fill(buf);
        buf[0] &= mask;
        BigInt candidate = BigInt::from_bytes(buf);
        if (candidate <= span) {
            secure_wipe(buf);
            return low + candidate;
        }
    }
    fail(Errc::internal, "rejection sampling did not terminate");
}

std::uint64_t uniform_index(RandomSource& rng, std::uint64_t bound) {
    if (bound == 0) {
        fail(Errc::invalid_argument, "uniform_index bound is zero");
    }
    constexpr std::uint64_t range = std::numeric_limits<std::uint32_t>::max() + std::uint64_t{1};
    if (bound > range) {
        fail(Errc::invalid_argument, "uniform_index bound exceeds 2^32");
    }
    const std::uint64_t limit = range - (range % bound);
    std::array<std::uint8_t, 4> buf{};
    for (int attempt = 0; attempt < 1024; ++attempt) {
        rng.fill(buf);
        const std::uint64_t draw = (std::uint64_t{buf[0]} << 24) | (std::uint64_t{buf[1]} << 16) |
                                   (std::uint64_t{buf[2]} << 8) | std::uint64_t{buf[3]};
        if (draw < limit) {
            return draw % bound;
        }
    }
    fail(Errc::internal, "rejection sampling did not terminate");
}

} // namespace zerotwo::core
