#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace evapore {

/// Lowercase hex SHA-256 digest of a byte string.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace evapore
