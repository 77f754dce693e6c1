#pragma once

#include "core/encoding.hpp"

#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>

namespace zerotwo::core {

// Golden-vector files: one `name = hex` pair per line; blank lines and lines
// starting with '#' are ignored.
using GoldenVectors = std::map<std::string, Bytes>;

GoldenVectors read_golden_vectors(std::istream& in);
GoldenVectors read_golden_vectors(const std::filesystem::path& path);
void write_golden_vectors(std::ostream& out, const GoldenVectors& vectors);

} // namespace zerotwo::core
