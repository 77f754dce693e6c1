#include "sim/harness.hpp"

#include "core/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>

namespace zerotwo::sim {

namespace {

using nlohmann::json;

std::string upper(std::string text) {
    for (auto& ch : text) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return text;
}

bool contains(const std::string& haystack, const std::string& needle) {
    return !needle.empty() && haystack.find(needle) != std::string::npos;
}

} // namespace

void Transcript::record(WireMessage message) {
    message.sequence = messages_.size();
    messages_.push_back(std::move(message));
}

void Transcript::log_outcome(std::string line) { outcomes_.push_back(std::move(line)); }

std::string Transcript::to_jsonl() const {
    std::string out = json{{"tape", tape_id_}}.dump() + "\n";
    for (const auto& m : messages_) {
        json line{{"seq", m.sequence},
                  {"channel", m.channel},
                  {"dir", m.direction == Direction::request ? "request" : "response"},
                  {"method", m.method},
                  {"endpoint", m.endpoint},
                  {"body", m.body}};
        if (m.direction == Direction::response) {
            line["status"] = m.status;
        }
        out += line.dump() + "\n";
    }
    for (const auto& o : outcomes_) {
        out += json{{"outcome", o}}.dump() + "\n";
    }
    return out;
}

LoopbackChannel::LoopbackChannel(server::Server& server, Transcript& transcript, std::string name)
    : server_(server), transcript_(transcript), name_(std::move(name)) {}

core::Response LoopbackChannel::send(const core::Request& original) {
    core::Request request = original;
    std::vector<Interceptor> active;
    {
        std::lock_guard lock(mu_);
        for (const auto& [id, hook] : interceptors_) {
            if (!hook.match || hook.match(original)) {
                active.push_back(hook);
            }
        }
    }
    for (const auto& hook : active) {
        if (hook.on_request) hook.on_request(request);
    }
    {
        std::lock_guard lock(mu_);
        transcript_.record({0, name_, Direction::request, request.method, request.path, 0, request.body});
    }
    auto response = server_.handle(request);
    for (const auto& hook : active) {
        if (hook.on_response) hook.on_response(request, response);
    }
    {
        std::lock_guard lock(mu_);
        transcript_.record(
            {0, name_, Direction::response, request.method, request.path, response.status, response.body});
    }
    return response;
}

std::size_t LoopbackChannel::tamper(Interceptor interceptor) {
    std::lock_guard lock(mu_);
    interceptors_.emplace_back(next_id_, std::move(interceptor));
    return next_id_++;
}

void LoopbackChannel::remove(std::size_t id) {
    std::lock_guard lock(mu_);
    std::erase_if(interceptors_, [id](const auto& entry) { return entry.first == id; });
}

Interceptor on_endpoint(std::string method, std::string path_prefix) {
    Interceptor hook;
    hook.match = [method = std::move(method), prefix = std::move(path_prefix)](const core::Request& r) {
        return r.method == method && r.path.rfind(prefix, 0) == 0;
    };
    return hook;
}

World::World(core::Bytes seed, core::GroupProfile group)
    : clock_(std::make_shared<core::ManualClock>()),
      rng_(std::make_shared<core::SeededRandom>(seed)),
      transcript_(core::hex_encode(seed)) {
    server::ServerConfig config;
    config.domain = "bank.example";
    config.public_url = "http://bank.example";
    config.demo = true;
    server_ = std::make_unique<server::Server>(config, group, clock_, rng_);
    browser_ = std::make_unique<LoopbackChannel>(*server_, transcript_, "browser");
    phone_ = std::make_unique<LoopbackChannel>(*server_, transcript_, "authenticator");
    attacker_ = std::make_unique<LoopbackChannel>(*server_, transcript_, "attacker");
    store_ = std::make_unique<auth::SecretStore>(auth::SecretStore::create_in_memory(
        auth::PasswordUnlock("simulation"), auth::KdfParams::fast(), *rng_));
    authenticator_ = std::make_unique<auth::Authenticator>(*store_, *phone_, confirmer_, clock_,
                                                           rng_, std::move(group));
    authenticator_->set_key_observer(
        [this](std::string_view name, core::ByteView value) { note_secret(std::string(name), value); });
}

World::~World() = default;

void World::note_secret(std::string name, core::ByteView value) {
    secrets_.emplace_back(std::move(name), core::Bytes(value.begin(), value.end()));
}

std::vector<Leak> find_leaks(const Transcript& transcript,
                             const std::vector<std::pair<std::string, core::Bytes>>& secrets) {
    std::vector<Leak> leaks;
    for (const auto& [name, bytes] : secrets) {
        const std::string raw(bytes.begin(), bytes.end());
        const auto hex = core::hex_encode(bytes);
        const auto hex_upper = upper(hex);
        for (const auto& m : transcript.messages()) {
            const auto& body = m.body;
            const auto& path = m.endpoint;
            if (contains(body, raw) || contains(body, hex) || contains(body, hex_upper) ||
                contains(path, raw) || contains(path, hex) || contains(path, hex_upper)) {
                leaks.push_back({name, m.sequence});
            }
        }
    }
    return leaks;
}

ScenarioReport run_scenario(const Scenario& scenario, core::ByteView seed) {
    ScenarioReport report;
    report.scenario = scenario.name;
    World world(core::Bytes(seed.begin(), seed.end()));
    for (const auto& step : scenario.steps) {
        std::string got;
        try {
            got = step.run(world);
        } catch (const Error& e) {
            got = std::string(errc_name(e.code()));
        } catch (const std::exception& e) {
            got = std::string("exception: ") + e.what();
        }
        ++report.steps_run;
        world.transcript().log_outcome(step.name + ": " + got);
        if (got != step.expected) {
            report.divergence = step.name + ": expected " + step.expected + ", got " + got;
            break;
        }
    }
    for (const auto& s : world.store().contents().secrets) {
        world.note_secret("p", s.secret.bytes());
    }
    report.leaks = find_leaks(world.transcript(), world.secrets());
    for (const auto& leak : report.leaks) {
        world.transcript().log_outcome("leak: " + leak.secret + " in message " +
                                       std::to_string(leak.message));
    }
    report.passed = !report.divergence && report.leaks.empty();
    report.transcript = world.transcript();
    return report;
}

const Scenario* find_scenario(std::string_view name) {
    for (const auto& s : scenarios()) {
        if (s.name == name) {
            return &s;
        }
    }
    return nullptr;
}

core::Bytes default_seed() {
    const auto text = core::as_bytes("zerotwo simulation tape 0");
    return {text.begin(), text.end()};
}

} // namespace zerotwo::sim
