#include "matrep/eval/sts.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string_view>

#include "matrep/errors.hpp"
#include "matrep/similarity.hpp"

namespace matrep::eval {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

}  // namespace

void load_sts_file(const std::filesystem::path& path, StsSplit split, StsDataset& out) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open STS file " + path.string());
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    double score = 0.0;
    if (fields.size() < 7) {
      ++out.skipped_rows;
      continue;
    }
    const auto s = fields[4];
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), score);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(score)) {
      ++out.skipped_rows;
      continue;
    }
    const std::size_t a = out.sentences.size();
    out.sentences.emplace_back(fields[5]);
    out.sentences.emplace_back(fields[6]);
    out.pairs.push_back({a, a + 1, score, split});
  }
}

StsDataset load_sts_benchmark(const std::filesystem::path& dir) {
  StsDataset ds;
  load_sts_file(dir / "sts-train.csv", StsSplit::kTrain, ds);
  load_sts_file(dir / "sts-dev.csv", StsSplit::kDev, ds);
  load_sts_file(dir / "sts-test.csv", StsSplit::kTest, ds);
  return ds;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ShapeMismatchError("pearson: length mismatch");
  if (xs.size() < 2) throw std::invalid_argument("pearson: need at least two points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("pearson: constant input");
  return sxy / std::sqrt(sxx * syy);
}

StsScores sts_evaluate(const EmbeddingBank& docs, std::span<const StsPair> pairs) {
  std::vector<double> model[2], gold[2];
  for (const auto& p : pairs) {
    if (p.sentence_a >= docs.size() || p.sentence_b >= docs.size()) {
      throw std::out_of_range("STS pair references unknown sentence id");
    }
    if (p.split == StsSplit::kTrain) continue;
    const int s = p.split == StsSplit::kDev ? 0 : 1;
    model[s].push_back(sim_g(docs.view(p.sentence_a), docs.view(p.sentence_b)));
    gold[s].push_back(p.gold);
  }
  return {pearson(model[0], gold[0]), pearson(model[1], gold[1])};
}

}  // namespace matrep::eval
