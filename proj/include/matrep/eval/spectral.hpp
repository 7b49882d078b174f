#pragma once

// Spectral clustering of matrix embeddings (normalized-Laplacian embedding
// followed by k-means) and the linear-algebra pieces it is built from.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "matrep/bank.hpp"
#include "matrep/corpus.hpp"
#include "matrep/manifold.hpp"

namespace matrep::eval {

struct SpectralOptions {
  std::size_t k = 20;
  double gamma = 1e-3;
  std::uint64_t seed = 1;
  int restarts = 10;
  int max_iter = 300;
  int threads = 1;
  /// Above this many points the eigenproblem is solved by Lanczos.
  std::size_t dense_limit = 5000;
  double lanczos_tol = 1e-8;
};

/// N x N kernel matrix exp(-gamma * dist2) with a zero diagonal.
Eigen::MatrixXd affinity_matrix(const EmbeddingBank& points, double gamma, int threads = 1);

/// Clusters from a precomputed symmetric affinity (diagonal ignored).
/// Points with zero degree are left unassigned and returned as -1.
std::vector<int> spectral_cluster_affinity(const Eigen::MatrixXd& affinity,
                                           const SpectralOptions& options);

/// Labels 0..k-1. Zero-degree points take the label of their nearest (dist2)
/// connected point.
std::vector<int> spectral_cluster(const EmbeddingBank& points, const SpectralOptions& options);
std::vector<int> spectral_cluster(std::span<const MatrixEmbedding> points,
                                  const SpectralOptions& options);

struct KMeansResult {
  std::vector<int> labels;
  Eigen::MatrixXd centers;  // k x d
  double inertia = 0.0;
};

/// Lloyd's algorithm with k-means++ seeding; best inertia over `restarts` runs.
KMeansResult kmeans(const Eigen::MatrixXd& points, std::size_t k, Rng& rng, int restarts = 10,
                    int max_iter = 300);

struct EigenPairs {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // columns aligned with values
};

/// Largest-k eigenpairs of a symmetric matrix by Lanczos iteration with full
/// reorthogonalization and locking, so repeated eigenvalues are found with
/// their multiplicity. A Ritz pair counts as converged when its residual is
/// below tol * max(1, |largest Ritz value|); each run stops after max_steps.
EigenPairs lanczos_largest(const Eigen::MatrixXd& symmetric, std::size_t k, double tol,
                           std::size_t max_steps, Rng& rng);

}  // namespace matrep::eval
