#pragma once

// Semantic textual similarity scoring against the sts-benchmark distribution.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "matrep/bank.hpp"

namespace matrep::eval {

enum class StsSplit { kTrain, kDev, kTest };

struct StsPair {
  std::size_t sentence_a = 0;  // document ids in the training corpus
  std::size_t sentence_b = 0;
  double gold = 0.0;           // [0, 5]
  StsSplit split = StsSplit::kTrain;
};

/// Sentences become documents 2i and 2i+1 for the i-th pair across all splits.
struct StsDataset {
  std::vector<std::string> sentences;
  std::vector<StsPair> pairs;
  std::size_t skipped_rows = 0;
};

/// Appends the rows of one sts-benchmark TSV (genre, file, year, id, score,
/// sentence1, sentence2[, extra...]). Rows with fewer fields or an
/// unparsable score are skipped and counted.
void load_sts_file(const std::filesystem::path& path, StsSplit split, StsDataset& out);
/// Reads sts-train.csv, sts-dev.csv and sts-test.csv from a directory.
StsDataset load_sts_benchmark(const std::filesystem::path& dir);

double pearson(std::span<const double> xs, std::span<const double> ys);

struct StsScores {
  double dev = 0.0;
  double test = 0.0;
};

/// Pearson correlation between sim_g of each pair's document embeddings and gold, per split.
StsScores sts_evaluate(const EmbeddingBank& docs, std::span<const StsPair> pairs);

}  // namespace matrep::eval
