#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "evapore/config.hpp"

namespace evapore {

struct ManifestEntry {
  /// Path relative to the output directory.
  std::string path;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct Manifest {
  std::string scenario;
  std::vector<ManifestEntry> files;

  const ManifestEntry* find(const std::string& path) const;
  std::string to_json() const;
};

/// Runs one scenario into cfg.out. Every output file, including the config
/// echo, is listed in the returned manifest, which is also written to
/// manifest.json. Errors keep their type and gain a "<scenario>: " prefix.
Manifest run_scenario(const RunConfig& cfg);

}  // namespace evapore
