#include "matrep/io/text_files.hpp"

#include <fstream>
#include <stdexcept>

#include "matrep/errors.hpp"

namespace matrep::io {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

void write_lines(const std::filesystem::path& path, std::span<const std::string> lines) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& l : lines) out << l << '\n';
}

namespace {

Labels encode_into(std::span<const std::string> raw, Labels& vocab, const std::string& where) {
  std::unordered_map<std::string, int> ids;
  for (std::size_t i = 0; i < vocab.names.size(); ++i) ids.emplace(vocab.names[i], static_cast<int>(i));
  Labels out;
  out.ids.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i].empty()) throw FormatError(where + ": blank label on line " + std::to_string(i + 1));
    auto [it, inserted] = ids.try_emplace(raw[i], static_cast<int>(vocab.names.size()));
    if (inserted) vocab.names.push_back(raw[i]);
    out.ids.push_back(it->second);
  }
  out.names = vocab.names;
  return out;
}

}  // namespace

Labels encode_labels(std::span<const std::string> raw) {
  Labels vocab;
  return encode_into(raw, vocab, "labels");
}

Labels read_labels(const std::filesystem::path& path) {
  Labels vocab;
  return read_labels(path, vocab);
}

Labels read_labels(const std::filesystem::path& path, Labels& vocabulary) {
  auto lines = read_lines(path);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return encode_into(lines, vocabulary, path.string());
}

}  // namespace matrep::io
