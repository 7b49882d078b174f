#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "matrep/bank.hpp"

namespace matrep::eval {

/// k-NN under the paragraph distance dist2. Neighbours are ranked by
/// ascending dist2 (ties: lower training index); the majority label wins and
/// vote ties go to the label of the single nearest neighbour.
std::vector<int> knn_classify(const EmbeddingBank& train, std::span<const int> train_labels,
                              const EmbeddingBank& queries, std::size_t k = 3, int threads = 1);

/// Indices of the k nearest training points to one query, nearest first.
std::vector<std::size_t> nearest_neighbours(const EmbeddingBank& train, MatrixView query,
                                            std::size_t k);

struct F1Scores {
  double macro = 0.0;
  double micro = 0.0;
};

/// Per-class F1 (0 when precision or recall is undefined) averaged over the
/// classes present in gold or predictions (macro), and pooled-count F1 (micro).
F1Scores f1_scores(std::span<const int> predicted, std::span<const int> gold);

/// Deterministic shuffled split: the first round(ratio * n) indices train.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};
Split random_split(std::size_t n, double train_ratio, std::uint64_t seed);

/// Per-class sample keeping each class's share; at most `size` indices, sorted.
std::vector<std::size_t> stratified_subsample(std::span<const int> labels, std::size_t size,
                                              std::uint64_t seed);

EmbeddingBank select(const EmbeddingBank& bank, std::span<const std::size_t> rows);
std::vector<int> select(std::span<const int> labels, std::span<const std::size_t> rows);

}  // namespace matrep::eval
