#include "matrep/io/manifest.hpp"

#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace matrep::io {

nlohmann::json to_json(const TrainConfig& c) {
  return {
      {"size", c.dim},
      {"word_cols", c.word_cols},
      {"doc_cols", c.doc_cols},
      {"margin", c.margin},
      {"alpha", c.alpha},
      {"iter", c.iterations},
      {"window", c.window},
      {"negative", c.negatives},
      {"min_count", c.min_count},
      {"sample", c.sample},
      {"threads", c.threads},
      {"seed", c.seed},
      {"negative_aggregation", c.aggregation == NegativeAggregation::kSum ? "sum" : "mean"},
  };
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.dim = j.at("size").get<std::size_t>();
  c.word_cols = j.at("word_cols").get<std::size_t>();
  c.doc_cols = j.at("doc_cols").get<std::size_t>();
  c.margin = j.at("margin").get<double>();
  c.alpha = j.at("alpha").get<double>();
  c.iterations = j.at("iter").get<int>();
  c.window = j.at("window").get<int>();
  c.negatives = j.at("negative").get<int>();
  c.min_count = j.at("min_count").get<std::int64_t>();
  c.sample = j.at("sample").get<double>();
  c.threads = j.at("threads").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  const auto agg = j.value("negative_aggregation", std::string("sum"));
  if (agg != "sum" && agg != "mean") throw std::invalid_argument("unknown negative aggregation " + agg);
  c.aggregation = agg == "sum" ? NegativeAggregation::kSum : NegativeAggregation::kMean;
  c.validate();
  return c;
}

nlohmann::json to_json(const RunManifest& m) {
  return {{"command", m.command},         {"config", m.config}, {"checksums", m.checksums},
          {"seed", m.seed},               {"tool_version", m.tool_version},
          {"timings", m.timings}};
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.config = j.at("config");
  m.checksums = j.at("checksums").get<std::map<std::string, std::string>>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.tool_version = j.at("tool_version").get<std::string>();
  m.timings = j.value("timings", std::map<std::string, double>{});
  return m;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest " + path.string());
  out << to_json(m).dump(2) << '\n';
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest " + path.string());
  return manifest_from_json(nlohmann::json::parse(in));
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 initialisation failed");
  }
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

}  // namespace matrep::io
