#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace matrep::io {

/// All lines of a UTF-8 text file, trailing '\r' stripped.
std::vector<std::string> read_lines(const std::filesystem::path& path);
void write_lines(const std::filesystem::path& path, std::span<const std::string> lines);

/// String labels mapped to dense ids in order of first appearance.
struct Labels {
  std::vector<int> ids;
  std::vector<std::string> names;
};

Labels encode_labels(std::span<const std::string> raw);
/// One label per line; blank lines are an error since they break alignment.
Labels read_labels(const std::filesystem::path& path);
/// Same as read_labels but reuses an existing name->id mapping (new names are appended).
Labels read_labels(const std::filesystem::path& path, Labels& vocabulary);

}  // namespace matrep::io
