#include "matrep/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "matrep/errors.hpp"

namespace matrep {

namespace {

void require_same_rows(std::size_t a, std::size_t b) {
  if (a != b) {
    throw ShapeMismatchError("row dimensions differ: " + std::to_string(a) + " vs " +
                             std::to_string(b));
  }
}

}  // namespace

ColumnSum::ColumnSum(MatrixView m) : sum_(m.rows(), 0.0), cols_(m.cols()) {
  if (cols_ == 1) {
    std::copy(m.values().begin(), m.values().end(), sum_.begin());
    return;
  }
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j);
    sum_[i] = s;
  }
}

double sim_g(const ColumnSum& a, const ColumnSum& b) {
  require_same_rows(a.rows(), b.rows());
  return dot(a.values(), b.values()) / static_cast<double>(a.cols() * b.cols());
}

double sim_g(MatrixView a, MatrixView b) {
  require_same_rows(a.rows(), b.rows());
  return sim_g(ColumnSum(a), ColumnSum(b));
}

Matrix grad_g_wrt_a(MatrixView a, MatrixView b) {
  require_same_rows(a.rows(), b.rows());
  ColumnSum sb(b);
  double scale = 1.0 / static_cast<double>(a.cols() * b.cols());
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double v = sb.values()[i] * scale;
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = v;
  }
  return out;
}

DistanceOperand::DistanceOperand(MatrixView m)
    : colsum(m), squared_norm(dot(m.values(), m.values())) {}

double dist2(const DistanceOperand& u, const DistanceOperand& v) {
  require_same_rows(u.colsum.rows(), v.colsum.rows());
  if (u.colsum.cols() != v.colsum.cols()) {
    throw ShapeMismatchError("dist2 requires equal column counts");
  }
  double r = static_cast<double>(u.colsum.cols());
  double cross = dot(u.colsum.values(), v.colsum.values()) / (r * r);
  return std::max(0.0, (u.squared_norm + v.squared_norm) / r - 2.0 * cross);
}

double dist2(MatrixView u, MatrixView v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) {
    throw ShapeMismatchError("dist2 requires operands of identical shape");
  }
  return dist2(DistanceOperand(u), DistanceOperand(v));
}

double affinity_from_dist2(double d2, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("affinity: gamma must be positive");
  return std::exp(-gamma * d2);
}

double affinity(MatrixView u, MatrixView v, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("affinity: gamma must be positive");
  return affinity_from_dist2(dist2(u, v), gamma);
}

}  // namespace matrep
