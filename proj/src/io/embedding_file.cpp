#include "matrep/io/embedding_file.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <system_error>

#include <spdlog/spdlog.h>

#include "matrep/errors.hpp"

namespace matrep::io {

namespace {

constexpr double kNormWarn = 1e-3;
constexpr double kNormReject = 0.1;

struct Header {
  std::size_t count = 0, rows = 0, cols = 0;
};

Header read_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("missing header line");
  std::istringstream hs(line);
  Header h;
  std::string extra;
  if (!(hs >> h.count >> h.rows >> h.cols) || (hs >> extra)) {
    throw FormatError("malformed header '" + line + "', expected 'count p r'");
  }
  if (h.rows == 0 || h.cols == 0 || h.cols > h.rows) {
    throw FormatError("header shape " + std::to_string(h.rows) + "x" + std::to_string(h.cols) +
                      " is invalid");
  }
  return h;
}

void check_entry(std::span<const double> values, const std::string& name) {
  double s = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw FormatError("entry '" + name + "' has non-finite values");
    s += v * v;
  }
  const double dev = std::abs(std::sqrt(s) - 1.0);
  if (dev > kNormReject) {
    throw FormatError("entry '" + name + "' has norm off unity by " + std::to_string(dev));
  }
  if (dev > kNormWarn) spdlog::warn("entry '{}' has norm off unity by {:.3g}", name, dev);
}

NamedBank read_text(std::istream& in) {
  const Header h = read_header(in);
  NamedBank out{{}, EmbeddingBank(h.count, h.rows, h.cols)};
  out.names.reserve(h.count);
  std::string line;
  for (std::size_t i = 0; i < h.count; ++i) {
    if (!std::getline(in, line)) {
      throw FormatError("file ends after " + std::to_string(i) + " of " +
                        std::to_string(h.count) + " entries");
    }
    const char* p = line.data();
    const char* end = line.data() + line.size();
    const char* name_end = p;
    while (name_end < end && *name_end != ' ') ++name_end;
    std::string name(p, name_end);
    if (name.empty()) throw FormatError("entry " + std::to_string(i) + " has no name");
    p = name_end;
    auto values = out.bank.entry(i);
    for (double& v : values) {
      while (p < end && *p == ' ') ++p;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) {
        throw FormatError("entry '" + name + "' has too few or unparsable values");
      }
      p = next;
    }
    while (p < end && (*p == ' ' || *p == '\r')) ++p;
    if (p != end) throw FormatError("entry '" + name + "' has trailing data");
    check_entry(values, name);
    out.names.push_back(std::move(name));
  }
  if (std::getline(in, line) && !line.empty()) {
    throw FormatError("more entries than the header's count " + std::to_string(h.count));
  }
  return out;
}

NamedBank read_binary(std::istream& in) {
  const Header h = read_header(in);
  NamedBank out{{}, EmbeddingBank(h.count, h.rows, h.cols)};
  out.names.reserve(h.count);
  for (std::size_t i = 0; i < h.count; ++i) {
    std::string name;
    char c;
    while (in.get(c) && c != ' ') {
      if (c != '\n') name.push_back(c);
    }
    if (!in || name.empty()) {
      throw FormatError("binary file ends after " + std::to_string(i) + " of " +
                        std::to_string(h.count) + " entries");
    }
    auto values = out.bank.entry(i);
    for (double& v : values) {
      unsigned char b[4];
      if (!in.read(reinterpret_cast<char*>(b), 4)) {
        throw FormatError("binary entry '" + name + "' is truncated");
      }
      const std::uint32_t bits = std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) |
                                 (std::uint32_t{b[2]} << 16) | (std::uint32_t{b[3]} << 24);
      v = static_cast<double>(std::bit_cast<float>(bits));
    }
    if (!in.get(c) || c != '\n') throw FormatError("binary entry '" + name + "' is not terminated");
    check_entry(values, name);
    out.names.push_back(std::move(name));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("more entries than the header's count " + std::to_string(h.count));
  }
  return out;
}

}  // namespace

void write_embeddings(const std::filesystem::path& path, std::span<const std::string> names,
                      const EmbeddingBank& bank, bool binary) {
  if (names.size() != bank.size()) throw ShapeMismatchError("one name per bank entry required");
  for (const auto& n : names) {
    if (n.empty() || n.find_first_of(" \t\r\n") != std::string::npos) {
      throw std::invalid_argument("embedding name '" + n + "' is empty or contains whitespace");
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << bank.size() << ' ' << bank.rows() << ' ' << bank.cols() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < bank.size(); ++i) {
    out << names[i];
    if (binary) {
      out.put(' ');
      for (double v : bank.entry(i)) {
        const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
        const char bytes[4] = {static_cast<char>(bits & 0xff), static_cast<char>((bits >> 8) & 0xff),
                               static_cast<char>((bits >> 16) & 0xff),
                               static_cast<char>((bits >> 24) & 0xff)};
        out.write(bytes, 4);
      }
    } else {
      for (double v : bank.entry(i)) {
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        out.put(' ');
        out.write(buf, res.ptr - buf);
      }
    }
    out.put('\n');
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_doc_embeddings(const std::filesystem::path& path, const EmbeddingBank& bank,
                          bool binary) {
  std::vector<std::string> names;
  names.reserve(bank.size());
  for (std::size_t i = 0; i < bank.size(); ++i) names.push_back(std::to_string(i));
  write_embeddings(path, names, bank, binary);
}

NamedBank read_embeddings(const std::filesystem::path& path, EmbeddingFormat format) {
  auto open = [&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open embedding file " + path.string());
    return in;
  };
  if (format == EmbeddingFormat::kBinary) {
    auto in = open();
    return read_binary(in);
  }
  try {
    auto in = open();
    return read_text(in);
  } catch (const FormatError&) {
    if (format == EmbeddingFormat::kText) throw;
    try {
      auto in = open();
      return read_binary(in);
    } catch (const FormatError&) {
    }
    throw;
  }
}

}  // namespace matrep::io
