#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "matrep/manifold.hpp"

namespace matrep {

/// Contiguous store of `count` row-major rows x cols matrices, each of unit
/// Frobenius norm. Entry i occupies values()[i*rows*cols, (i+1)*rows*cols).
class EmbeddingBank {
 public:
  EmbeddingBank() = default;
  EmbeddingBank(std::size_t count, std::size_t rows, std::size_t cols);

  std::size_t size() const { return count_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t stride() const { return rows_ * cols_; }

  std::span<double> entry(std::size_t i) { return {values_.data() + i * stride(), stride()}; }
  std::span<const double> entry(std::size_t i) const {
    return {values_.data() + i * stride(), stride()};
  }
  MatrixView view(std::size_t i) const { return {entry(i), rows_, cols_}; }
  MatrixEmbedding get(std::size_t i) const;
  void set(std::size_t i, const MatrixEmbedding& m);
  void push_back(const MatrixEmbedding& m);

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  /// Largest | ||entry|| - 1 | over the bank.
  double max_norm_deviation() const;
  /// Rescales every entry to unit norm; returns the deviation seen beforehand.
  double renormalize();

  friend bool operator==(const EmbeddingBank&, const EmbeddingBank&) = default;

 private:
  std::size_t count_ = 0;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

}  // namespace matrep
