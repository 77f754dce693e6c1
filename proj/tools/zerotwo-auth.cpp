// Authenticator (phone role) as a command-line tool.

#include <zerotwo/zerotwo.h>

#include <CLI11.hpp>

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <string>
#include <termios.h>
#include <unistd.h>

namespace {

struct Freed {
    void operator()(char* p) const { zt_free(p); }
};
using Text = std::unique_ptr<char, Freed>;

struct Options {
    std::string store = "zerotwo-auth.zt";
    std::string server = "http://127.0.0.1:8080";
    std::uint64_t duration = 8 * 3600;
    bool yes = false;
    std::string password_env = "ZEROTWO_UNLOCK_PASSWORD";
};

int fail_with(zt_status status, const std::string& what) {
    std::cerr << "zerotwo-auth: " << what << ": " << zt_status_name(status);
    if (*zt_last_error()) std::cerr << ": " << zt_last_error();
    std::cerr << "\n";
    return 1;
}

std::string read_tty_line(const std::string& prompt, bool echo) {
    std::FILE* tty = std::fopen("/dev/tty", "r+");
    if (tty == nullptr) return {};
    std::fputs(prompt.c_str(), tty);
    std::fflush(tty);
    termios saved{};
    const int fd = fileno(tty);
    const bool restore = !echo && tcgetattr(fd, &saved) == 0;
    if (restore) {
        termios quiet = saved;
        quiet.c_lflag &= ~static_cast<tcflag_t>(ECHO);
        tcsetattr(fd, TCSANOW, &quiet);
    }
    char buffer[512] = {};
    std::string line;
    if (std::fgets(buffer, sizeof buffer, tty) != nullptr) line = buffer;
    if (restore) {
        tcsetattr(fd, TCSANOW, &saved);
        std::fputs("\n", tty);
    }
    std::fclose(tty);
    std::memset(buffer, 0, sizeof buffer);
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
    return line;
}

std::string unlock_password(const Options& o) {
    if (const char* value = std::getenv(o.password_env.c_str())) return value;
    return read_tty_line("store password: ", false);
}

std::string read_payload(const std::string& source) {
    if (source == "-") {
        return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    }
    std::ifstream in(source, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + source);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int confirm(void* user, const char* prompt_json) {
    const auto* o = static_cast<const Options*>(user);
    std::cerr << "approval requested: " << prompt_json << "\n";
    if (o->yes) {
        std::cerr << "approved (--yes)\n";
        return 1;
    }
    const auto answer = read_tty_line("approve? [y/N] ", true);
    return answer == "y" || answer == "Y" || answer == "yes" ? 1 : 0;
}

class Session {
public:
    explicit Session(Options& o) : options_(o) {}
    ~Session() { zt_auth_close(auth_); }

    zt_status open() {
        password_ = unlock_password(options_);
        zt_unlock unlock{ZT_UNLOCK_PASSWORD, password_.c_str(), 0, nullptr};
        const auto status = zt_auth_open(options_.store.c_str(), &unlock, options_.server.c_str(),
                                         confirm, &options_, &auth_);
        std::fill(password_.begin(), password_.end(), '\0');
        return status;
    }
    zt_auth* get() { return auth_; }

private:
    Options& options_;
    std::string password_;
    zt_auth* auth_ = nullptr;
};

} // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"zerotwo authenticator"};
    app.require_subcommand(1);
    app.add_option("--store", o.store, "encrypted store file")->envname("ZEROTWO_AUTH_STORE");
    app.add_option("--server", o.server, "server base URL")->envname("ZEROTWO_SERVER");
    app.add_option("--duration-seconds", o.duration, "session length requested at login");
    app.add_flag("--yes", o.yes, "approve every prompt without asking");
    app.add_option("--unlock-password-env", o.password_env,
                   "environment variable holding the store password");

    auto* init = app.add_subcommand("init", "create an empty store");
    std::string kdf = "hardened";
    init->add_option("--kdf", kdf, "hardened or fast")
        ->envname("ZEROTWO_KDF_PROFILE")
        ->check(CLI::IsMember({"hardened", "fast"}));

    auto* passphrase = app.add_subcommand("passphrase", "add a master secret");
    unsigned words = 6;
    bool display_once = false;
    std::string import_env;
    passphrase->add_option("--words", words, "words in a generated passphrase");
    passphrase->add_flag("--display-once", display_once, "print the generated passphrase now");
    passphrase->add_option("--import-env", import_env,
                           "import the secret held in this environment variable instead");

    auto* accounts = app.add_subcommand("accounts", "manage accounts");
    accounts->require_subcommand(1);
    auto* accounts_add = accounts->add_subcommand("add", "add an account by hand");
    std::string label;
    std::string iu;
    std::string is;
    std::size_t secret = 0;
    accounts_add->add_option("--label", label);
    accounts_add->add_option("--iu", iu, "user identifier")->required();
    accounts_add->add_option("--is", is, "server identifier")->required();
    accounts_add->add_option("--secret", secret, "index of the master secret");
    auto* accounts_list = accounts->add_subcommand("list", "list accounts");

    auto* enroll = app.add_subcommand("enroll", "enroll using a payload from the server");
    std::string payload;
    enroll->add_option("--payload", payload, "payload file, or - for stdin")->required();
    enroll->add_option("--label", label);
    enroll->add_option("--secret", secret, "index of the master secret");

    auto* approve = app.add_subcommand("approve", "approve a pending login");
    std::string login_id;
    auto* by_id = approve->add_option("--login", login_id, "login id to fetch from the server");
    auto* by_payload = approve->add_option("--payload", payload, "login payload file, or -");
    by_id->excludes(by_payload);

    auto* sessions = app.add_subcommand("sessions", "list local sessions");

    auto* authz = app.add_subcommand("authz", "explicit authorizations");
    authz->require_subcommand(1);
    auto* authz_list = authz->add_subcommand("list", "pending requests for all sessions");
    auto* authz_confirm = authz->add_subcommand("confirm", "approve one request");
    std::string auth_id;
    authz_confirm->add_option("auth_id", auth_id)->required();

    auto* logout = app.add_subcommand("logout", "end a session remotely");
    std::string session_id;
    logout->add_option("session_id", session_id)->required();

    auto* export_cmd = app.add_subcommand("export", "copy the encrypted store as a backup");
    std::string destination;
    export_cmd->add_option("destination", destination)->required();

    CLI11_PARSE(app, argc, argv);

    if (init->parsed()) {
        auto password = unlock_password(o);
        if (password.empty()) {
            std::cerr << "zerotwo-auth: set $" << o.password_env << " or run on a terminal\n";
            return 2;
        }
        zt_unlock unlock{ZT_UNLOCK_PASSWORD, password.c_str(), 0, nullptr};
        const auto status =
            zt_store_init(o.store.c_str(), &unlock, kdf == "fast" ? ZT_KDF_FAST : ZT_KDF_HARDENED);
        std::fill(password.begin(), password.end(), '\0');
        if (status != ZT_OK) return fail_with(status, "init");
        std::cout << "created " << o.store << "\n";
        return 0;
    }

    Session session(o);
    if (auto s = session.open(); s != ZT_OK) return fail_with(s, "unlock");
    zt_auth* auth = session.get();

    try {
        if (passphrase->parsed()) {
            std::size_t index = 0;
            if (!import_env.empty()) {
                const char* value = std::getenv(import_env.c_str());
                if (value == nullptr || *value == '\0') {
                    std::cerr << "zerotwo-auth: $" << import_env << " is empty\n";
                    return 2;
                }
                const auto s = zt_auth_import_secret(auth, reinterpret_cast<const std::uint8_t*>(value),
                                                     std::strlen(value), &index);
                if (s != ZT_OK) return fail_with(s, "import");
            } else {
                char* text = nullptr;
                const auto s = zt_auth_new_passphrase(auth, words, &index, display_once ? &text : nullptr);
                if (s != ZT_OK) return fail_with(s, "passphrase");
                if (text != nullptr) {
                    Text shown(text);
                    std::cout << "passphrase (shown once): " << shown.get() << "\n";
                    std::memset(shown.get(), 0, std::strlen(shown.get()));
                }
            }
            std::cout << "secret " << index << "\n";
        } else if (accounts_add->parsed()) {
            if (auto s = zt_auth_add_account(auth, label.empty() ? iu.c_str() : label.c_str(), iu.c_str(),
                                             is.c_str(), secret);
                s != ZT_OK) {
                return fail_with(s, "accounts add");
            }
        } else if (accounts_list->parsed()) {
            char* json = nullptr;
            if (auto s = zt_auth_list_accounts(auth, &json); s != ZT_OK) return fail_with(s, "accounts list");
            std::cout << Text(json).get() << "\n";
        } else if (enroll->parsed()) {
            const auto text = read_payload(payload);
            if (auto s = zt_auth_enroll(auth, text.c_str(), label.c_str(), secret); s != ZT_OK) {
                return fail_with(s, "enroll");
            }
            std::cout << "enrolled\n";
        } else if (approve->parsed()) {
            std::string login = login_id;
            if (login.empty()) {
                if (payload.empty()) {
                    std::cerr << "zerotwo-auth: approve needs --login or --payload\n";
                    return 2;
                }
                login = read_payload(payload);
            }
            char* sid = nullptr;
            if (auto s = zt_auth_approve(auth, login.c_str(), o.duration, &sid); s != ZT_OK) {
                return fail_with(s, "approve");
            }
            std::cout << "session " << Text(sid).get() << "\n";
        } else if (sessions->parsed()) {
            char* json = nullptr;
            if (auto s = zt_auth_list_sessions(auth, &json); s != ZT_OK) return fail_with(s, "sessions");
            std::cout << Text(json).get() << "\n";
        } else if (authz_list->parsed()) {
            char* json = nullptr;
            if (auto s = zt_auth_list_authz(auth, &json); s != ZT_OK) return fail_with(s, "authz list");
            std::cout << Text(json).get() << "\n";
        } else if (authz_confirm->parsed()) {
            if (auto s = zt_auth_confirm_authz(auth, auth_id.c_str()); s != ZT_OK) {
                return fail_with(s, "authz confirm");
            }
            std::cout << "confirmed\n";
        } else if (logout->parsed()) {
            if (auto s = zt_auth_logout(auth, session_id.c_str()); s != ZT_OK) return fail_with(s, "logout");
            std::cout << "logged out\n";
        } else if (export_cmd->parsed()) {
            if (auto s = zt_auth_export(auth, destination.c_str()); s != ZT_OK) return fail_with(s, "export");
            std::cout << "exported to " << destination << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "zerotwo-auth: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
