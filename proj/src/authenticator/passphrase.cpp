#include "authenticator/passphrase.hpp"

#include "core/errors.hpp"

#include <cmath>
#include <sstream>

namespace zerotwo::auth {

namespace detail {
extern const std::string_view kBundledWordlist;
}

const Wordlist& Wordlist::bundled() {
    static const Wordlist list = [] {
        std::istringstream in{std::string(detail::kBundledWordlist)};
        return from_stream(in);
    }();
    return list;
}

Wordlist Wordlist::from_stream(std::istream& in) {
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
            line.pop_back();
        }
        if (!line.empty()) {
            words.push_back(line);
        }
    }
    return Wordlist(std::move(words));
}

double PassphraseSpec::entropy_bits(std::size_t list_size) const {
    return static_cast<double>(word_count) * std::log2(static_cast<double>(list_size));
}

core::MasterSecret generate_passphrase(const PassphraseSpec& spec, const Wordlist& words,
                                       core::RandomSource& rng) {
    if (words.size() != kWordlistSize) {
        fail(Errc::config, "wordlist must have " + std::to_string(kWordlistSize) + " entries, got " +
                               std::to_string(words.size()));
    }
    if (spec.word_count == 0) {
        fail(Errc::config, "passphrase needs at least one word");
    }
    std::string text;
    for (std::size_t i = 0; i < spec.word_count; ++i) {
        if (i > 0) {
            text.push_back(spec.separator);
        }
        text += words.at(core::uniform_index(rng, words.size()));
    }
    auto secret = core::MasterSecret::passphrase(text);
    core::secure_wipe(text);
    return secret;
}

} // namespace zerotwo::auth
