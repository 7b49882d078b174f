#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "json.hpp"

#include "matrep/trainer.hpp"

namespace matrep::io {

inline constexpr const char* kToolVersion = "0.1.0";

/// Everything needed to rerun a command: resolved configuration, input
/// checksums, seed, tool version and timings. Stored as JSON.
struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::map<std::string, std::string> checksums;  // path -> sha256 hex
  std::uint64_t seed = 0;
  std::string tool_version = kToolVersion;
  std::map<std::string, double> timings;  // seconds
};

nlohmann::json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

void write_manifest(const std::filesystem::path& path, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& path);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace matrep::io
