#include "matrep/bank.hpp"

#include <algorithm>
#include <cmath>

#include "matrep/errors.hpp"

namespace matrep {

EmbeddingBank::EmbeddingBank(std::size_t count, std::size_t rows, std::size_t cols)
    : count_(count), rows_(rows), cols_(cols), values_(count * rows * cols, 0.0) {}

MatrixEmbedding EmbeddingBank::get(std::size_t i) const {
  auto e = entry(i);
  return MatrixEmbedding::from_unit(Matrix(rows_, cols_, {e.begin(), e.end()}));
}

void EmbeddingBank::set(std::size_t i, const MatrixEmbedding& m) {
  if (m.rows() != rows_ || m.cols() != cols_) throw ShapeMismatchError("bank entry shape");
  std::copy(m.values().begin(), m.values().end(), entry(i).begin());
}

void EmbeddingBank::push_back(const MatrixEmbedding& m) {
  if (count_ == 0 && values_.empty()) {
    rows_ = m.rows();
    cols_ = m.cols();
  } else if (m.rows() != rows_ || m.cols() != cols_) {
    throw ShapeMismatchError("bank entry shape");
  }
  values_.insert(values_.end(), m.values().begin(), m.values().end());
  ++count_;
}

double EmbeddingBank::max_norm_deviation() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < count_; ++i) {
    worst = std::max(worst, std::abs(euclidean_norm(entry(i)) - 1.0));
  }
  return worst;
}

double EmbeddingBank::renormalize() {
  double worst = 0.0;
  for (std::size_t i = 0; i < count_; ++i) {
    auto e = entry(i);
    double n = euclidean_norm(e);
    worst = std::max(worst, std::abs(n - 1.0));
    if (n > 0.0 && n != 1.0) {
      for (double& x : e) x /= n;
    }
  }
  return worst;
}

}  // namespace matrep
