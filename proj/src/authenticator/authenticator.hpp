#pragma once

#include "authenticator/passphrase.hpp"
#include "authenticator/secret_store.hpp"
#include "authenticator/transport.hpp"
#include "core/clock.hpp"
#include "core/group.hpp"
#include "core/payload.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace zerotwo::auth {

inline constexpr std::uint64_t kDefaultSessionSeconds = 8 * 3600;

enum class ConsentKind { login, authorization };

// What the user is asked to approve. For logins both fingerprints are shown;
// for authorizations the operation text is shown exactly as received.
struct ConsentPrompt {
    ConsentKind kind = ConsentKind::login;
    std::string label;
    core::IdentityPair identity;
    std::string server_fingerprint;
    std::string local_fingerprint;
    std::string operation;
    std::uint64_t duration = 0;
};

class Confirmer {
public:
    virtual ~Confirmer() = default;
    virtual bool confirm(const ConsentPrompt& prompt) = 0;
};

class ScriptedConfirmer final : public Confirmer {
public:
    explicit ScriptedConfirmer(bool answer = true) : answer_(answer) {}

    bool confirm(const ConsentPrompt& prompt) override {
        prompts_.push_back(prompt);
        return answer_;
    }
    void set_answer(bool answer) { answer_ = answer; }
    const std::vector<ConsentPrompt>& prompts() const noexcept { return prompts_; }

private:
    bool answer_;
    std::vector<ConsentPrompt> prompts_;
};

// Harness instrumentation: receives secret intermediates (x, S, K) so the
// simulation can check that none of them ever reach the wire.
using KeyObserver = std::function<void(std::string_view name, core::ByteView value)>;

// Maps a non-2xx response to the matching error.
[[noreturn]] void raise_for_status(const core::Response& response, std::string_view what);

class Authenticator {
public:
    Authenticator(SecretStore& store, Transport& transport, Confirmer& confirmer,
                  std::shared_ptr<core::Clock> clock, std::shared_ptr<core::RandomSource> rng,
                  core::GroupProfile group = core::GroupProfile::production());

    std::size_t add_secret(core::MasterSecret secret);
    std::size_t generate_secret(const PassphraseSpec& spec = {},
                                const Wordlist& words = Wordlist::bundled());

    // (iu, is) is unique per store; Errc::conflict otherwise.
    const Account& add_account(std::string label, core::IdentityPair identity,
                               std::size_t secret_index);
    const Account* find_account(const core::IdentityPair& identity) const;

    // Derives v from the chosen secret and posts {iu, v} to the payload's
    // enroll_url. The account is recorded as enrolled once the server accepts.
    const Account& handle_enroll_payload(std::string_view payload_text, std::string label,
                                         std::size_t secret_index);

    core::LoginPayload fetch_login_challenge(const std::string& login_id);

    // Order: account lookup, fingerprint comparison, consent, then the secret
    // computation and the completion request.
    LocalSession approve_login(const core::LoginPayload& challenge,
                               std::uint64_t d = kDefaultSessionSeconds);

    std::vector<core::AuthzPayload> pending_authorizations(const std::string& session_id);
    void confirm_authorization(const core::AuthzPayload& request);
    void remote_logout(const std::string& session_id);

    const LocalSession* find_session(const std::string& session_id) const;
    const std::vector<LocalSession>& sessions() const noexcept { return store_.contents().sessions; }
    const std::vector<Account>& accounts() const noexcept { return store_.contents().accounts; }

    void set_key_observer(KeyObserver observer) { observer_ = std::move(observer); }
    const core::GroupProfile& group() const noexcept { return group_; }

private:
    core::Response post(const std::string& origin, const std::string& path, const std::string& body);
    core::Response get(const std::string& origin, const std::string& path);
    void observe(std::string_view name, core::ByteView value) const;
    Account* find_account_mut(const core::IdentityPair& identity);

    SecretStore& store_;
    Transport& transport_;
    Confirmer& confirmer_;
    std::shared_ptr<core::Clock> clock_;
    std::shared_ptr<core::RandomSource> rng_;
    core::GroupProfile group_;
    KeyObserver observer_;
};

} // namespace zerotwo::auth
