#pragma once

// End-to-end experiment protocols shared by the command-line tool and the
// acceptance suite.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "matrep/bank.hpp"
#include "matrep/eval/classification.hpp"
#include "matrep/eval/contingency.hpp"
#include "matrep/eval/sts.hpp"
#include "matrep/trainer.hpp"

namespace matrep::eval {

struct ClusterProtocol {
  std::size_t k = 20;
  double gamma = 1e-3;
  std::size_t subsample = 0;  // stratified sample size; 0 keeps every document
  std::uint64_t seed = 1;
  int threads = 1;
  NmiNormalization nmi = NmiNormalization::kArithmetic;
};

ClusterScores cluster_and_score(const EmbeddingBank& docs, std::span<const int> labels,
                                const ClusterProtocol& protocol);

F1Scores classify_and_score(const EmbeddingBank& train_docs, std::span<const int> train_labels,
                            const EmbeddingBank& test_docs, std::span<const int> test_labels,
                            std::size_t k = 3, int threads = 1);

F1Scores classify_split(const EmbeddingBank& docs, std::span<const int> labels, const Split& split,
                        std::size_t k = 3, int threads = 1);

/// Training defaults for sentence similarity: 1000 iterations, window 15, 5 negatives.
TrainConfig sts_train_config();

/// Trains on every sentence of every split and scores dev and test.
StsScores train_and_score_sts(const StsDataset& data, const TrainConfig& config,
                              TrainStats* stats = nullptr);

/// (r1, r2) pairs with 1 <= r1 <= r2 <= max_cols, r1 major.
std::vector<std::pair<std::size_t, std::size_t>> column_grid(std::size_t max_cols = 4);

}  // namespace matrep::eval
