// Runs the adversarial simulation scenarios.

#include <zerotwo/zerotwo.h>

#include <CLI11.hpp>

#include <cctype>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

namespace {

struct Freed {
    void operator()(char* p) const { zt_free(p); }
};
using Text = std::unique_ptr<char, Freed>;

// A tape file holds the seed as hex; anything else is used byte for byte.
std::vector<std::uint8_t> read_tape(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read tape " + path);
    std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::string hex;
    bool is_hex = true;
    for (char ch : raw) {
        if (std::isspace(static_cast<unsigned char>(ch))) continue;
        if (!std::isxdigit(static_cast<unsigned char>(ch))) {
            is_hex = false;
            break;
        }
        hex.push_back(ch);
    }
    std::vector<std::uint8_t> seed;
    if (is_hex && !hex.empty() && hex.size() % 2 == 0) {
        for (std::size_t i = 0; i < hex.size(); i += 2) {
            seed.push_back(static_cast<std::uint8_t>(std::stoi(hex.substr(i, 2), nullptr, 16)));
        }
    } else {
        seed.assign(raw.begin(), raw.end());
    }
    return seed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"zerotwo simulation harness"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "show the shipped scenarios");

    auto* run = app.add_subcommand("run", "run one scenario (or all) against an in-process server");
    std::string scenario;
    std::string tape;
    std::string out;
    bool all = false;
    bool print_transcript = false;
    run->add_option("--scenario", scenario, "scenario name");
    run->add_flag("--all", all, "run every scenario");
    run->add_option("--tape", tape, "file with the randomness seed (hex)");
    run->add_option("--out", out, "write the transcript (JSON lines) here");
    run->add_flag("--transcript", print_transcript, "print the transcript to stdout");
    CLI11_PARSE(app, argc, argv);

    if (list->parsed()) {
        char* raw = nullptr;
        if (zt_sim_list(&raw) != ZT_OK) {
            std::cerr << zt_last_error() << "\n";
            return 1;
        }
        Text text(raw);
        std::cout << text.get() << "\n";
        return 0;
    }

    std::vector<std::string> names;
    if (all) {
        char* raw = nullptr;
        zt_sim_list(&raw);
        Text text(raw);
        // Names are the "name" fields of the listing.
        const std::string listing(text.get());
        for (std::size_t at = listing.find("\"name\":\""); at != std::string::npos;
             at = listing.find("\"name\":\"", at)) {
            at += 8;
            names.push_back(listing.substr(at, listing.find('"', at) - at));
        }
    } else if (!scenario.empty()) {
        names.push_back(scenario);
    } else {
        std::cerr << "zerotwo-sim: give --scenario <name> or --all\n";
        return 2;
    }

    std::vector<std::uint8_t> seed;
    try {
        if (!tape.empty()) seed = read_tape(tape);
    } catch (const std::exception& e) {
        std::cerr << "zerotwo-sim: " << e.what() << "\n";
        return 2;
    }

    std::ofstream transcript_file;
    if (!out.empty()) {
        transcript_file.open(out, std::ios::binary | std::ios::trunc);
        if (!transcript_file) {
            std::cerr << "zerotwo-sim: cannot write " << out << "\n";
            return 2;
        }
    }

    int failures = 0;
    for (const auto& name : names) {
        int passed = 0;
        char* transcript = nullptr;
        char* summary = nullptr;
        const auto status = zt_sim_run(name.c_str(), seed.empty() ? nullptr : seed.data(), seed.size(),
                                       &passed, &transcript, &summary);
        if (status != ZT_OK) {
            std::cerr << "zerotwo-sim: " << name << ": " << zt_status_name(status) << ": "
                      << zt_last_error() << "\n";
            ++failures;
            continue;
        }
        Text t(transcript);
        Text s(summary);
        std::cout << (passed ? "PASS " : "FAIL ") << s.get() << "\n";
        if (print_transcript) std::cout << t.get();
        if (transcript_file) transcript_file << t.get();
        if (!passed) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
