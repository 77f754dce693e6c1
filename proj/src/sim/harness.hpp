#pragma once

#include "authenticator/authenticator.hpp"
#include "core/clock.hpp"
#include "server/server.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace zerotwo::sim {

enum class Direction { request, response };

struct WireMessage {
    std::size_t sequence = 0;
    std::string channel;
    Direction direction = Direction::request;
    std::string method;
    std::string endpoint;
    int status = 0; // responses only
    std::string body;
};

// Append-only record of what crossed the wire, plus the per-step outcome log.
class Transcript {
public:
    explicit Transcript(std::string tape_id = {}) : tape_id_(std::move(tape_id)) {}

    void record(WireMessage message);
    void log_outcome(std::string line);

    const std::vector<WireMessage>& messages() const noexcept { return messages_; }
    const std::vector<std::string>& outcomes() const noexcept { return outcomes_; }
    const std::string& tape_id() const noexcept { return tape_id_; }

    // One JSON object per line: a header, every message, every outcome.
    std::string to_jsonl() const;

private:
    std::string tape_id_;
    std::vector<WireMessage> messages_;
    std::vector<std::string> outcomes_;
};

// Man-in-the-middle hook. match selects messages; the mutations run on the
// request before delivery and on the response before it is handed back.
struct Interceptor {
    std::function<bool(const core::Request&)> match;
    std::function<void(core::Request&)> on_request;
    std::function<void(const core::Request&, core::Response&)> on_response;
};

// In-process transport into a Server. Interceptors compose in installation
// order; the transcript records messages as delivered.
class LoopbackChannel final : public auth::Transport {
public:
    LoopbackChannel(server::Server& server, Transcript& transcript, std::string name);

    core::Response send(const core::Request& request) override;

    std::size_t tamper(Interceptor interceptor);
    void remove(std::size_t id);
    const std::string& name() const noexcept { return name_; }

private:
    server::Server& server_;
    Transcript& transcript_;
    std::string name_;
    std::mutex mu_;
    std::vector<std::pair<std::size_t, Interceptor>> interceptors_;
    std::size_t next_id_ = 1;
};

Interceptor on_endpoint(std::string method, std::string path_prefix);

// Everything one scenario runs against: a server, an authenticator with an
// in-memory store, a browser, an attacker, a manual clock and one seeded
// randomness tape shared by all parties.
class World {
public:
    explicit World(core::Bytes seed, core::GroupProfile group = core::GroupProfile::production());
    ~World();

    core::ManualClock& clock() { return *clock_; }
    server::Server& server() { return *server_; }
    Transcript& transcript() { return transcript_; }
    LoopbackChannel& browser() { return *browser_; }
    LoopbackChannel& phone() { return *phone_; }
    LoopbackChannel& attacker() { return *attacker_; }
    auth::SecretStore& store() { return *store_; }
    auth::ScriptedConfirmer& confirmer() { return confirmer_; }
    auth::Authenticator& authenticator() { return *authenticator_; }
    core::RandomSource& rng() { return *rng_; }

    // Secret material seen during the run: master secrets plus whatever the
    // authenticator reported through its key observer.
    const std::vector<std::pair<std::string, core::Bytes>>& secrets() const noexcept {
        return secrets_;
    }
    void note_secret(std::string name, core::ByteView value);

    // Free-form state shared between steps.
    std::map<std::string, std::string> vars;

private:
    std::shared_ptr<core::ManualClock> clock_;
    std::shared_ptr<core::RandomSource> rng_;
    Transcript transcript_;
    std::unique_ptr<server::Server> server_;
    std::unique_ptr<LoopbackChannel> browser_;
    std::unique_ptr<LoopbackChannel> phone_;
    std::unique_ptr<LoopbackChannel> attacker_;
    std::unique_ptr<auth::SecretStore> store_;
    auth::ScriptedConfirmer confirmer_;
    std::unique_ptr<auth::Authenticator> authenticator_;
    std::vector<std::pair<std::string, core::Bytes>> secrets_;
};

struct Step {
    std::string name;
    std::string expected;
    // Returns the observed outcome; a thrown zerotwo::Error counts as its
    // error name.
    std::function<std::string(World&)> run;
};

struct Scenario {
    std::string name;
    std::string summary;
    std::vector<Step> steps;
    bool deterministic = true;
};

struct Leak {
    std::string secret;
    std::size_t message;
};

struct ScenarioReport {
    std::string scenario;
    bool passed = false;
    std::size_t steps_run = 0;
    std::optional<std::string> divergence; // "step: expected X, got Y"
    std::vector<Leak> leaks;
    Transcript transcript;
};

// Bytes of every secret, raw and as lower/upper-case hex, searched in every
// captured path and body.
std::vector<Leak> find_leaks(const Transcript& transcript,
                             const std::vector<std::pair<std::string, core::Bytes>>& secrets);

ScenarioReport run_scenario(const Scenario& scenario, core::ByteView seed);

const std::vector<Scenario>& scenarios();
const Scenario* find_scenario(std::string_view name);

// Fixed seed used when no tape is supplied.
core::Bytes default_seed();

} // namespace zerotwo::sim
