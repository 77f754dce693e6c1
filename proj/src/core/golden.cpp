#include "core/golden.hpp"

#include "core/errors.hpp"

#include <fstream>

namespace zerotwo::core {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

} // namespace

GoldenVectors read_golden_vectors(std::istream& in) {
    GoldenVectors out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            fail(Errc::parse, "golden vector line " + std::to_string(lineno) + " has no '='");
        }
        std::string name = trim(std::string_view(t).substr(0, eq));
        const std::string hex = trim(std::string_view(t).substr(eq + 1));
        if (name.empty()) {
            fail(Errc::parse, "golden vector line " + std::to_string(lineno) + " has no name");
        }
        if (!out.emplace(std::move(name), hex_decode(hex)).second) {
            fail(Errc::parse, "duplicate golden vector on line " + std::to_string(lineno));
        }
    }
    return out;
}

GoldenVectors read_golden_vectors(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        fail(Errc::io, "cannot open golden vector file " + path.string());
    }
    return read_golden_vectors(in);
}

void write_golden_vectors(std::ostream& out, const GoldenVectors& vectors) {
    for (const auto& [name, bytes] : vectors) {
        out << name << " = " << hex_encode(bytes) << '\n';
    }
}

} // namespace zerotwo::core
