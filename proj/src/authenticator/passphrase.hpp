#pragma once

#include "core/identity.hpp"
#include "core/random.hpp"

#include <istream>
#include <string>
#include <vector>

namespace zerotwo::auth {

inline constexpr std::size_t kWordlistSize = 7776;

class Wordlist {
public:
    // The bundled EFF large list (lower-case letters only, 7776 entries).
    static const Wordlist& bundled();
    static Wordlist from_stream(std::istream& in);

    explicit Wordlist(std::vector<std::string> words) : words_(std::move(words)) {}

    std::size_t size() const noexcept { return words_.size(); }
    const std::string& at(std::size_t i) const { return words_.at(i); }
    const std::vector<std::string>& words() const noexcept { return words_; }

private:
    std::vector<std::string> words_;
};

struct PassphraseSpec {
    std::size_t word_count = 6;
    char separator = '-';

    double entropy_bits(std::size_t list_size = kWordlistSize) const;
};

// Words are drawn with uniform_index (rejection sampling). Throws Errc::config
// unless the list has exactly 7776 entries.
core::MasterSecret generate_passphrase(const PassphraseSpec& spec, const Wordlist& words,
                                       core::RandomSource& rng);

} // namespace zerotwo::auth
