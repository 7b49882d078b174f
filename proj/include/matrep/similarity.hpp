#pragma once

// Similarity between matrices with arbitrary column counts, its gradient,
// the paragraph-matrix squared distance and the clustering kernel built on it.
//
// For A = [a_1 .. a_r1] and B = [b_1 .. b_r2] sharing the row dimension p,
//
//   g(A, B)      = sum_ij a_i . b_j / (r1 r2) = colsum(A) . colsum(B) / (r1 r2)
//   dist2(U, V)  = sum_kl |u_k - v_l|^2 / r^2
//                = (|U|_F^2 + |V|_F^2) / r - 2 g(U, V)
//
// Everything factors through the column sums, so they are cached in ColumnSum.

#include <cstddef>
#include <span>
#include <vector>

#include "matrep/manifold.hpp"

namespace matrep {

/// Sum of a matrix's columns (a p-vector) together with the column count it summarizes.
class ColumnSum {
 public:
  explicit ColumnSum(MatrixView m);

  std::span<const double> values() const { return sum_; }
  std::size_t rows() const { return sum_.size(); }
  std::size_t cols() const { return cols_; }

 private:
  std::vector<double> sum_;
  std::size_t cols_;
};

double sim_g(const ColumnSum& a, const ColumnSum& b);
double sim_g(MatrixView a, MatrixView b);
inline double sim_g(const MatrixEmbedding& a, const MatrixEmbedding& b) {
  return sim_g(a.view(), b.view());
}

/// d g(A, B) / dA: a p x r1 matrix whose every column is colsum(B) / (r1 r2).
Matrix grad_g_wrt_a(MatrixView a, MatrixView b);
inline Matrix grad_g_wrt_a(const MatrixEmbedding& a, const MatrixEmbedding& b) {
  return grad_g_wrt_a(a.view(), b.view());
}

/// Precomputed operand for repeated dist2 evaluations (k-NN, affinity matrices).
struct DistanceOperand {
  explicit DistanceOperand(MatrixView m);

  ColumnSum colsum;
  double squared_norm;
};

/// Squared paragraph distance; only defined for operands of identical shape.
/// Not a metric: dist2(U, U) > 0 whenever U has distinct columns.
double dist2(const DistanceOperand& u, const DistanceOperand& v);
double dist2(MatrixView u, MatrixView v);
inline double dist2(const MatrixEmbedding& u, const MatrixEmbedding& v) {
  return dist2(u.view(), v.view());
}

/// exp(-gamma * d2). Throws std::invalid_argument when gamma <= 0.
double affinity_from_dist2(double d2, double gamma);
double affinity(MatrixView u, MatrixView v, double gamma);
inline double affinity(const MatrixEmbedding& u, const MatrixEmbedding& v, double gamma) {
  return affinity(u.view(), v.view(), gamma);
}

}  // namespace matrep
