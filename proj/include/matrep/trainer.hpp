#pragma once

// Joint word/document matrix-embedding trainer.
//
// For a center word U, a context word V in U's window, the document D they
// occur in and sampled negative center words N_k, the loss is
//
//   L = sum_k max(0, m - g(V,U) - g(U,D) + g(V,N_k) + g(N_k,D))
//
// with V, U, N_k in S(p, r1) and D in S(p, r2). Parameters are updated by
// projecting the Euclidean gradient onto the sphere's tangent space (after
// the row-major flatten) and retracting by renormalization.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "matrep/bank.hpp"
#include "matrep/corpus.hpp"
#include "matrep/manifold.hpp"

namespace matrep {

enum class NegativeAggregation { kSum, kMean };

struct TrainConfig {
  std::size_t dim = 100;       // p
  std::size_t word_cols = 1;   // r1
  std::size_t doc_cols = 1;    // r2
  double margin = 0.15;
  double alpha = 0.025;
  int iterations = 35;
  int window = 5;
  int negatives = 2;
  std::int64_t min_count = 5;
  double sample = 1e-3;        // subsampling threshold; 0 disables
  int threads = 1;
  std::uint64_t seed = 1;
  NegativeAggregation aggregation = NegativeAggregation::kSum;

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;
};

struct ModelParams {
  std::size_t dim = 0;
  std::size_t word_cols = 0;
  std::size_t doc_cols = 0;
  EmbeddingBank center_words;   // U / N role; exported as the word embeddings
  EmbeddingBank context_words;  // V role
  EmbeddingBank docs;           // D role
};

ModelParams init_params(std::size_t vocab_size, std::size_t n_docs, const TrainConfig& config,
                        Rng& rng);

double loss_tuple(MatrixView context, MatrixView center, std::span<const MatrixView> negatives,
                  MatrixView doc, double margin,
                  NegativeAggregation aggregation = NegativeAggregation::kSum);

struct TupleGradients {
  double loss = 0.0;
  Matrix context;                 // dL/dV
  Matrix center;                  // dL/dU
  std::vector<Matrix> negatives;  // dL/dN_k, aligned with the input list
  Matrix doc;                     // dL/dD
};

/// Analytic gradients of loss_tuple. Hinge terms that are exactly zero or
/// negative contribute nothing.
TupleGradients grad_tuple(MatrixView context, MatrixView center,
                          std::span<const MatrixView> negatives, MatrixView doc, double margin,
                          NegativeAggregation aggregation = NegativeAggregation::kSum);

/// One Riemannian gradient step: flatten, tangent-project, retract, unflatten.
MatrixEmbedding apply_update(const MatrixEmbedding& param, const Matrix& euclid_grad, double lr);

struct TrainStats {
  std::vector<double> epoch_loss;            // mean loss per positive pair
  std::vector<double> epoch_norm_deviation;  // max | ||x|| - 1 | seen by the audit
  std::uint64_t pairs = 0;
  double seconds = 0.0;
};

/// Runs config.iterations passes over the corpus. With threads == 1 the
/// result is bit-identical for a fixed seed.
ModelParams train(const Corpus& corpus, const TrainConfig& config, TrainStats* stats = nullptr);

}  // namespace matrep
