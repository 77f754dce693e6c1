#pragma once

#include "server/server.hpp"

#include <filesystem>
#include <vector>

namespace zerotwo::server {

// On-disk state: one JSON document holding users and live sessions.
struct StoreSnapshot {
    std::string domain;
    std::vector<UserRecord> users;
    std::vector<SessionRecord> sessions;
};

std::string serialize_snapshot(const StoreSnapshot& snapshot);
StoreSnapshot parse_snapshot(std::string_view text);

// Write to a sibling temp file, fsync, then rename over the target.
void write_snapshot(const std::filesystem::path& path, const StoreSnapshot& snapshot);
// Returns an empty snapshot when the file does not exist.
StoreSnapshot read_snapshot(const std::filesystem::path& path);

} // namespace zerotwo::server
