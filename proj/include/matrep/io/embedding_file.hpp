#pragma once

// Embedding files. Both variants start with the text header "count p r\n".
//
//   text:   one line per entry: name followed by p*r values in row-major
//           order, space separated, shortest round-trip decimal form.
//   binary: name, one space, p*r little-endian float32 values, newline.
//
// Values are returned exactly as stored; no renormalization is applied.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "matrep/bank.hpp"

namespace matrep::io {

enum class EmbeddingFormat { kAuto, kText, kBinary };

struct NamedBank {
  std::vector<std::string> names;
  EmbeddingBank bank;
};

void write_embeddings(const std::filesystem::path& path, std::span<const std::string> names,
                      const EmbeddingBank& bank, bool binary = false);

/// Document banks are named by their zero-based document id.
void write_doc_embeddings(const std::filesystem::path& path, const EmbeddingBank& bank,
                          bool binary = false);

/// Throws FormatError on header/row-count mismatch, truncation, non-finite
/// values, or an entry whose norm is off 1 by more than 0.1 (more than 1e-3
/// only logs a warning). kAuto tries text first, then binary.
NamedBank read_embeddings(const std::filesystem::path& path,
                          EmbeddingFormat format = EmbeddingFormat::kAuto);

}  // namespace matrep::io
