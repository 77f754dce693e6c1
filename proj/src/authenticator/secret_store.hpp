#pragma once

#include "core/identity.hpp"
#include "core/protocol.hpp"
#include "core/random.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace zerotwo::auth {

// scrypt cost parameters; N = 2^log2_n.
struct KdfParams {
    std::uint8_t log2_n = 17;
    std::uint32_t r = 8;
    std::uint32_t p = 1;

    static KdfParams hardened() { return {17, 8, 1}; }
    static KdfParams fast() { return {10, 8, 1}; }

    friend bool operator==(const KdfParams&, const KdfParams&) = default;
};

enum class UnlockKind : std::uint8_t { password = 1, biometric_stub = 2 };

// Supplies the credential the container key is derived from.
class UnlockProvider {
public:
    virtual ~UnlockProvider() = default;
    virtual UnlockKind kind() const = 0;
    virtual core::Bytes credential() const = 0;
};

class PasswordUnlock final : public UnlockProvider {
public:
    explicit PasswordUnlock(std::string password);
    ~PasswordUnlock() override;

    UnlockKind kind() const override { return UnlockKind::password; }
    core::Bytes credential() const override;

private:
    std::string password_;
};

// Stand-in for a platform biometric prompt: accepts or refuses by
// configuration and, when it accepts, releases a device-held key.
class BiometricStubUnlock final : public UnlockProvider {
public:
    BiometricStubUnlock(bool accept, std::string device_key);
    ~BiometricStubUnlock() override;

    UnlockKind kind() const override { return UnlockKind::biometric_stub; }
    core::Bytes credential() const override;

private:
    bool accept_;
    std::string device_key_;
};

struct StoredSecret {
    core::MasterSecret secret;
    std::int64_t created_at = 0;
};

struct Account {
    std::string label;
    core::IdentityPair identity;
    std::size_t secret_index = 0;
    bool enrolled = false;
};

struct LocalSession {
    std::string session_id;
    core::IdentityPair identity;
    std::string server; // origin the session was established with
    core::SessionKey key;
};

struct StoreContents {
    std::vector<StoredSecret> secrets;
    std::vector<Account> accounts;
    std::vector<LocalSession> sessions;
};

inline constexpr std::string_view kStoreMagic = "ZT01";

// Encrypted container for the authenticator's master secrets, accounts and
// session keys. Layout:
//   "ZT01" | version u8 | unlock kind u8 | log2 N u8 | r u32 | p u32 |
//   salt[16] | nonce[12] | ciphertext | tag[16]
// The header through the nonce is bound as AES-256-GCM associated data; the
// key is scrypt(credential, salt). Plaintext never touches the disk.
class SecretStore {
public:
    static SecretStore create(const std::filesystem::path& path, const UnlockProvider& unlock,
                              KdfParams params, core::RandomSource& rng);
    static SecretStore create_in_memory(const UnlockProvider& unlock, KdfParams params,
                                        core::RandomSource& rng);
    // Errc::not_found when the file is missing; Errc::authentication_failed on
    // a wrong credential or any corruption.
    static SecretStore unlock(const std::filesystem::path& path, const UnlockProvider& unlock);
    static SecretStore unlock_sealed(core::ByteView sealed, const UnlockProvider& unlock);

    SecretStore(SecretStore&&) noexcept;
    SecretStore& operator=(SecretStore&&) noexcept;
    SecretStore(const SecretStore&) = delete;
    SecretStore& operator=(const SecretStore&) = delete;
    ~SecretStore();

    StoreContents& contents() noexcept { return contents_; }
    const StoreContents& contents() const noexcept { return contents_; }

    // Re-encrypts under a fresh nonce and rewrites the file (atomic rename).
    void save(core::RandomSource& rng);

    const core::Bytes& sealed() const noexcept { return sealed_; }
    const std::optional<std::filesystem::path>& path() const noexcept { return path_; }
    UnlockKind unlock_kind() const noexcept { return kind_; }
    const KdfParams& kdf() const noexcept { return params_; }

    // Backup = the sealed container, byte for byte.
    void export_backup(const std::filesystem::path& destination) const;

private:
    SecretStore() = default;

    std::optional<std::filesystem::path> path_;
    UnlockKind kind_ = UnlockKind::password;
    KdfParams params_;
    std::array<std::uint8_t, 16> salt_{};
    std::array<std::uint8_t, 32> key_{};
    StoreContents contents_;
    core::Bytes sealed_;
};

} // namespace zerotwo::auth
