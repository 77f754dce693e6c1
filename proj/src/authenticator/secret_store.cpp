#include "authenticator/secret_store.hpp"

#include "core/errors.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <fcntl.h>
#include <unistd.h>

#include <fstream>
#include <iterator>
#include <memory>

namespace zerotwo::auth {

namespace {

using json = nlohmann::json;

constexpr std::uint8_t kVersion = 1;
constexpr std::size_t kSaltSize = 16;
constexpr std::size_t kNonceSize = 12;
constexpr std::size_t kTagSize = 16;
// magic + version + kind + log2N + r + p
constexpr std::size_t kParamsEnd = 4 + 1 + 1 + 1 + 4 + 4;
constexpr std::size_t kHeaderSize = kParamsEnd + kSaltSize + kNonceSize;

// Upper bounds accepted when reading a container, so a crafted header cannot
// demand unbounded memory or time.
constexpr std::uint8_t kMaxLog2N = 22;
constexpr std::uint32_t kMaxR = 32;
constexpr std::uint32_t kMaxP = 16;

[[noreturn]] void unlock_failed() { fail(Errc::authentication_failed, "cannot unlock store"); }

void put_u32(core::Bytes& out, std::uint32_t value) {
    for (int shift = 24; shift >= 0; shift -= 8) {
        out.push_back(static_cast<std::uint8_t>(value >> shift));
    }
}

std::uint32_t get_u32(core::ByteView in, std::size_t at) {
    return (std::uint32_t{in[at]} << 24) | (std::uint32_t{in[at + 1]} << 16) |
           (std::uint32_t{in[at + 2]} << 8) | std::uint32_t{in[at + 3]};
}

std::array<std::uint8_t, 32> derive_key(const UnlockProvider& unlock,
                                        std::span<const std::uint8_t, kSaltSize> salt,
                                        const KdfParams& params) {
    auto credential = unlock.credential();
    const std::uint64_t n = std::uint64_t{1} << params.log2_n;
    // scrypt needs 128 * r * (N + p + 2) bytes; leave headroom.
    const std::uint64_t maxmem = 128ull * params.r * (n + params.p + 2) + (1ull << 20);
    std::array<std::uint8_t, 32> key{};
    const int ok = EVP_PBE_scrypt(reinterpret_cast<const char*>(credential.data()), credential.size(),
                                  salt.data(), salt.size(), n, params.r, params.p, maxmem,
                                  key.data(), key.size());
    core::secure_wipe(credential);
    if (ok != 1) {
        fail(Errc::internal, "scrypt key derivation failed");
    }
    return key;
}

struct CipherCtxDeleter {
    void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

core::Bytes seal(const std::array<std::uint8_t, 32>& key, core::ByteView header,
                 core::ByteView nonce, core::ByteView plaintext) {
    CipherCtx ctx(EVP_CIPHER_CTX_new());
    if (!ctx) {
        fail(Errc::internal, "EVP_CIPHER_CTX_new failed");
    }
    int len = 0;
    core::Bytes out(header.begin(), header.end());
    const std::size_t body = out.size();
    out.resize(body + plaintext.size() + kTagSize);
    if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) != 1 ||
        EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, static_cast<int>(nonce.size()),
                            nullptr) != 1 ||
        EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), nonce.data()) != 1 ||
        EVP_EncryptUpdate(ctx.get(), nullptr, &len, header.data(), static_cast<int>(header.size())) != 1 ||
        EVP_EncryptUpdate(ctx.get(), out.data() + body, &len, plaintext.data(),
                          static_cast<int>(plaintext.size())) != 1 ||
        EVP_EncryptFinal_ex(ctx.get(), out.data() + body + len, &len) != 1 ||
        EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagSize,
                            out.data() + body + plaintext.size()) != 1) {
        fail(Errc::internal, "AES-GCM encryption failed");
    }
    return out;
}

core::Bytes open_sealed(const std::array<std::uint8_t, 32>& key, core::ByteView sealed) {
    const auto header = sealed.first(kHeaderSize);
    const auto nonce = sealed.subspan(kParamsEnd + kSaltSize, kNonceSize);
    const auto ciphertext = sealed.subspan(kHeaderSize, sealed.size() - kHeaderSize - kTagSize);
    core::Bytes tag(sealed.end() - kTagSize, sealed.end());

    CipherCtx ctx(EVP_CIPHER_CTX_new());
    if (!ctx) {
        fail(Errc::internal, "EVP_CIPHER_CTX_new failed");
    }
    core::Bytes plain(ciphertext.size() + 16);
    int len = 0;
    int total = 0;
    if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) != 1 ||
        EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kNonceSize, nullptr) != 1 ||
        EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), nonce.data()) != 1 ||
        EVP_DecryptUpdate(ctx.get(), nullptr, &len, header.data(), static_cast<int>(header.size())) != 1 ||
        EVP_DecryptUpdate(ctx.get(), plain.data(), &len, ciphertext.data(),
                          static_cast<int>(ciphertext.size())) != 1) {
        core::secure_wipe(plain);
        unlock_failed();
    }
    total = len;
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagSize, tag.data()) != 1 ||
        EVP_DecryptFinal_ex(ctx.get(), plain.data() + total, &len) != 1) {
        core::secure_wipe(plain);
        unlock_failed();
    }
    plain.resize(static_cast<std::size_t>(total + len));
    return plain;
}

std::string_view origin_name(core::SecretOrigin origin) {
    return origin == core::SecretOrigin::generated_passphrase ? "generated-passphrase" : "imported";
}

core::SecretOrigin origin_from(const std::string& name) {
    if (name == "generated-passphrase") {
        return core::SecretOrigin::generated_passphrase;
    }
    if (name == "imported") {
        return core::SecretOrigin::imported;
    }
    fail(Errc::parse, "unknown secret origin: " + name);
}

std::string serialize(const StoreContents& contents) {
    json doc;
    doc["secrets"] = json::array();
    for (const auto& s : contents.secrets) {
        doc["secrets"].push_back({{"origin", origin_name(s.secret.origin())},
                                  {"value", core::hex_encode(s.secret.bytes())},
                                  {"created_at", s.created_at}});
    }
    doc["accounts"] = json::array();
    for (const auto& a : contents.accounts) {
        doc["accounts"].push_back({{"label", a.label},
                                   {"iu", a.identity.iu},
                                   {"is", a.identity.is},
                                   {"secret", a.secret_index},
                                   {"enrolled", a.enrolled}});
    }
    doc["sessions"] = json::array();
    for (const auto& s : contents.sessions) {
        doc["sessions"].push_back({{"session_id", s.session_id},
                                   {"iu", s.identity.iu},
                                   {"is", s.identity.is},
                                   {"server", s.server},
                                   {"K", core::hex_encode(s.key.K)},
                                   {"established_at", s.key.established_at},
                                   {"d", s.key.duration}});
    }
    return doc.dump();
}

StoreContents deserialize(core::ByteView plain) {
    StoreContents contents;
    try {
        const auto doc = json::parse(plain.begin(), plain.end());
        for (const auto& s : doc.at("secrets")) {
            auto value = core::hex_decode(s.at("value").get<std::string>());
            contents.secrets.push_back(
                {core::MasterSecret(value, origin_from(s.at("origin").get<std::string>())),
                 s.at("created_at").get<std::int64_t>()});
            core::secure_wipe(value);
        }
        for (const auto& a : doc.at("accounts")) {
            contents.accounts.push_back({a.at("label").get<std::string>(),
                                         {a.at("iu").get<std::string>(), a.at("is").get<std::string>()},
                                         a.at("secret").get<std::size_t>(),
                                         a.at("enrolled").get<bool>()});
        }
        for (const auto& s : doc.at("sessions")) {
            LocalSession session;
            session.session_id = s.at("session_id").get<std::string>();
            session.identity = {s.at("iu").get<std::string>(), s.at("is").get<std::string>()};
            session.server = s.at("server").get<std::string>();
            const auto k = core::hex_decode(s.at("K").get<std::string>());
            if (k.size() != session.key.K.size()) {
                fail(Errc::parse, "stored session key has wrong length");
            }
            std::copy(k.begin(), k.end(), session.key.K.begin());
            session.key.established_at = s.at("established_at").get<std::int64_t>();
            session.key.duration = s.at("d").get<std::uint64_t>();
            contents.sessions.push_back(std::move(session));
        }
    } catch (const json::exception& e) {
        fail(Errc::parse, std::string("store contents: ") + e.what());
    }
    for (const auto& a : contents.accounts) {
        if (a.secret_index >= contents.secrets.size()) {
            fail(Errc::parse, "account refers to a missing secret");
        }
    }
    return contents;
}

void write_file_atomic(const std::filesystem::path& path, core::ByteView data) {
    auto tmp = path;
    tmp += ".tmp";
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0600);
    if (fd < 0) {
        fail(Errc::io, "cannot write " + tmp.string());
    }
    std::size_t written = 0;
    while (written < data.size()) {
        const auto n = ::write(fd, data.data() + written, data.size() - written);
        if (n <= 0) {
            ::close(fd);
            fail(Errc::io, "short write to " + tmp.string());
        }
        written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd) != 0 || ::close(fd) != 0) {
        fail(Errc::io, "cannot flush " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        fail(Errc::io, "cannot replace " + path.string() + ": " + ec.message());
    }
}

} // namespace

PasswordUnlock::PasswordUnlock(std::string password) : password_(std::move(password)) {}
PasswordUnlock::~PasswordUnlock() { core::secure_wipe(password_); }

core::Bytes PasswordUnlock::credential() const {
    const auto view = core::as_bytes(password_);
    return {view.begin(), view.end()};
}

BiometricStubUnlock::BiometricStubUnlock(bool accept, std::string device_key)
    : accept_(accept), device_key_(std::move(device_key)) {}
BiometricStubUnlock::~BiometricStubUnlock() { core::secure_wipe(device_key_); }

core::Bytes BiometricStubUnlock::credential() const {
    if (!accept_) {
        fail(Errc::authentication_failed, "biometric check refused");
    }
    const auto view = core::as_bytes(device_key_);
    return {view.begin(), view.end()};
}

SecretStore SecretStore::create(const std::filesystem::path& path, const UnlockProvider& unlock,
                                KdfParams params, core::RandomSource& rng) {
    if (std::filesystem::exists(path)) {
        fail(Errc::conflict, "store already exists: " + path.string());
    }
    auto store = create_in_memory(unlock, params, rng);
    store.path_ = path;
    write_file_atomic(path, store.sealed_);
    return store;
}

SecretStore SecretStore::create_in_memory(const UnlockProvider& unlock, KdfParams params,
                                          core::RandomSource& rng) {
    if (params.log2_n == 0 || params.log2_n > kMaxLog2N || params.r == 0 || params.r > kMaxR ||
        params.p == 0 || params.p > kMaxP) {
        fail(Errc::config, "scrypt parameters out of range");
    }
    SecretStore store;
    store.kind_ = unlock.kind();
    store.params_ = params;
    rng.fill(store.salt_);
    store.key_ = derive_key(unlock, store.salt_, params);
    store.save(rng);
    return store;
}

SecretStore SecretStore::unlock(const std::filesystem::path& path, const UnlockProvider& unlock) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(Errc::not_found, "no store at " + path.string());
    }
    core::Bytes sealed((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto store = unlock_sealed(sealed, unlock);
    store.path_ = path;
    return store;
}

SecretStore SecretStore::unlock_sealed(core::ByteView sealed, const UnlockProvider& unlock) {
    if (sealed.size() < kStoreMagic.size() ||
        !std::equal(kStoreMagic.begin(), kStoreMagic.end(), sealed.begin())) {
        fail(Errc::parse, "not a store container");
    }
    if (sealed.size() < kHeaderSize + kTagSize) {
        unlock_failed();
    }
    KdfParams params{sealed[6], get_u32(sealed, 7), get_u32(sealed, 11)};
    if (sealed[4] != kVersion || sealed[5] != static_cast<std::uint8_t>(unlock.kind()) ||
        params.log2_n == 0 || params.log2_n > kMaxLog2N || params.r == 0 || params.r > kMaxR ||
        params.p == 0 || params.p > kMaxP) {
        unlock_failed();
    }
    SecretStore store;
    store.kind_ = unlock.kind();
    store.params_ = params;
    std::copy_n(sealed.begin() + kParamsEnd, kSaltSize, store.salt_.begin());
    store.key_ = derive_key(unlock, store.salt_, params);
    auto plain = open_sealed(store.key_, sealed);
    try {
        store.contents_ = deserialize(plain);
    } catch (...) {
        core::secure_wipe(plain);
        throw;
    }
    core::secure_wipe(plain);
    store.sealed_.assign(sealed.begin(), sealed.end());
    return store;
}

SecretStore::SecretStore(SecretStore&& other) noexcept
    : path_(std::move(other.path_)),
      kind_(other.kind_),
      params_(other.params_),
      salt_(other.salt_),
      key_(other.key_),
      contents_(std::move(other.contents_)),
      sealed_(std::move(other.sealed_)) {
    core::secure_wipe(other.key_);
}

SecretStore& SecretStore::operator=(SecretStore&& other) noexcept {
    if (this != &other) {
        core::secure_wipe(key_);
        path_ = std::move(other.path_);
        kind_ = other.kind_;
        params_ = other.params_;
        salt_ = other.salt_;
        key_ = other.key_;
        contents_ = std::move(other.contents_);
        sealed_ = std::move(other.sealed_);
        core::secure_wipe(other.key_);
    }
    return *this;
}

SecretStore::~SecretStore() {
    core::secure_wipe(key_);
    for (auto& s : contents_.sessions) {
        core::secure_wipe(s.key.K);
    }
}

void SecretStore::save(core::RandomSource& rng) {
    core::Bytes header(kStoreMagic.begin(), kStoreMagic.end());
    header.push_back(kVersion);
    header.push_back(static_cast<std::uint8_t>(kind_));
    header.push_back(params_.log2_n);
    put_u32(header, params_.r);
    put_u32(header, params_.p);
    header.insert(header.end(), salt_.begin(), salt_.end());
    std::array<std::uint8_t, kNonceSize> nonce{};
    rng.fill(nonce);
    header.insert(header.end(), nonce.begin(), nonce.end());

    auto text = serialize(contents_);
    auto sealed = seal(key_, header, nonce, core::as_bytes(text));
    core::secure_wipe(text);
    if (path_) {
        write_file_atomic(*path_, sealed);
    }
    sealed_ = std::move(sealed);
}

void SecretStore::export_backup(const std::filesystem::path& destination) const {
    if (std::filesystem::exists(destination)) {
        fail(Errc::conflict, "backup target exists: " + destination.string());
    }
    write_file_atomic(destination, sealed_);
}

} // namespace zerotwo::auth
