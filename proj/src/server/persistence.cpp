#include "server/persistence.hpp"

#include "core/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <fcntl.h>
#include <unistd.h>

namespace zerotwo::server {

namespace {

using nlohmann::json;
constexpr int kSnapshotVersion = 1;

core::Digest digest_from_hex(const std::string& hex) {
    const auto bytes = core::hex_decode(hex);
    if (bytes.size() != 32) {
        fail(Errc::parse, "session key must be 32 bytes");
    }
    core::Digest d{};
    std::copy(bytes.begin(), bytes.end(), d.begin());
    return d;
}

} // namespace

std::string serialize_snapshot(const StoreSnapshot& snapshot) {
    json users = json::array();
    for (const auto& u : snapshot.users) {
        users.push_back({{"iu", u.iu},
                         {"v", u.v.to_hex()},
                         {"created_at", u.created_at},
                         {"email_verified", u.email_verified}});
    }
    json sessions = json::array();
    for (const auto& s : snapshot.sessions) {
        sessions.push_back({{"session_id", s.session_id},
                            {"iu", s.iu},
                            {"K", core::hex_encode(s.key.K)},
                            {"established_at", s.key.established_at},
                            {"d", s.key.duration},
                            {"browser_token", s.browser_token},
                            {"revoked", s.revoked}});
    }
    json doc = {{"version", kSnapshotVersion},
                {"domain", snapshot.domain},
                {"users", std::move(users)},
                {"sessions", std::move(sessions)}};
    return doc.dump(2);
}

StoreSnapshot parse_snapshot(std::string_view text) {
    StoreSnapshot out;
    try {
        const json doc = json::parse(text);
        if (doc.at("version").get<int>() != kSnapshotVersion) {
            fail(Errc::parse, "unsupported store version");
        }
        out.domain = doc.at("domain").get<std::string>();
        for (const auto& u : doc.at("users")) {
            out.users.push_back(UserRecord{u.at("iu").get<std::string>(),
                                           core::BigInt::from_hex(u.at("v").get<std::string>()),
                                           u.at("created_at").get<std::int64_t>(),
                                           u.at("email_verified").get<bool>()});
        }
        for (const auto& s : doc.at("sessions")) {
            SessionRecord rec;
            rec.session_id = s.at("session_id").get<std::string>();
            rec.iu = s.at("iu").get<std::string>();
            rec.key.K = digest_from_hex(s.at("K").get<std::string>());
            rec.key.established_at = s.at("established_at").get<std::int64_t>();
            rec.key.duration = s.at("d").get<std::uint64_t>();
            rec.browser_token = s.at("browser_token").get<std::string>();
            rec.revoked = s.at("revoked").get<bool>();
            out.sessions.push_back(std::move(rec));
        }
    } catch (const json::exception& e) {
        fail(Errc::parse, std::string("malformed server store: ") + e.what());
    }
    return out;
}

void write_snapshot(const std::filesystem::path& path, const StoreSnapshot& snapshot) {
    const std::string text = serialize_snapshot(snapshot);
    auto tmp = path;
    tmp += ".tmp";
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
    if (fd < 0) {
        fail(Errc::io, "cannot write " + tmp.string());
    }
    std::size_t written = 0;
    while (written < text.size()) {
        const auto n = ::write(fd, text.data() + written, text.size() - written);
        if (n <= 0) {
            ::close(fd);
            fail(Errc::io, "short write to " + tmp.string());
        }
        written += static_cast<std::size_t>(n);
    }
    ::fsync(fd);
    ::close(fd);
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        fail(Errc::io, "cannot rename store into place: " + ec.message());
    }
}

StoreSnapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        if (!std::filesystem::exists(path)) {
            return {};
        }
        fail(Errc::io, "cannot read " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_snapshot(buf.str());
}

} // namespace zerotwo::server
