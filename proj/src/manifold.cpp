#include "matrep/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "matrep/errors.hpp"

namespace matrep {

namespace {

void check_shape(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw ShapeMismatchError("matrix dimensions must be positive");
  }
  if (cols > rows) {
    throw ShapeMismatchError("column count " + std::to_string(cols) +
                             " exceeds row dimension " + std::to_string(rows));
  }
}

void check_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) throw DegenerateInputError("matrix has non-finite entries");
  }
}

void check_unit(std::span<const double> x) {
  double n = euclidean_norm(x);
  if (std::abs(n - 1.0) > kUnitNormInputTol) {
    throw DegenerateInputError("expected a unit vector, got norm " + std::to_string(n));
  }
}

}  // namespace

MatrixView::MatrixView(std::span<const double> data, std::size_t rows, std::size_t cols)
    : data_(data), rows_(rows), cols_(cols) {
  if (data.size() != rows * cols) {
    throw ShapeMismatchError("view of " + std::to_string(data.size()) + " values cannot be " +
                             std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw ShapeMismatchError("expected " + std::to_string(rows * cols) + " values, got " +
                             std::to_string(values_.size()));
  }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  std::size_t n_rows = rows.size();
  std::size_t n_cols = n_rows ? rows.begin()->size() : 0;
  std::vector<double> values;
  values.reserve(n_rows * n_cols);
  for (const auto& row : rows) {
    if (row.size() != n_cols) throw ShapeMismatchError("ragged matrix literal");
    values.insert(values.end(), row.begin(), row.end());
  }
  return Matrix(n_rows, n_cols, std::move(values));
}

MatrixEmbedding MatrixEmbedding::from_unit(Matrix m) {
  check_shape(m.rows(), m.cols());
  check_finite(m.values());
  check_unit(m.values());
  return MatrixEmbedding(std::move(m));
}

FlatEmbedding::FlatEmbedding(std::vector<double> values, std::size_t rows, std::size_t cols)
    : values_(std::move(values)), rows_(rows), cols_(cols) {
  if (values_.size() != rows * cols) {
    throw ShapeMismatchError("flat length " + std::to_string(values_.size()) +
                             " does not match shape " + std::to_string(rows) + "x" +
                             std::to_string(cols));
  }
  check_shape(rows, cols);
  check_finite(values_);
  check_unit(values_);
}

double euclidean_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeMismatchError("dot product of unequal lengths");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double frobenius_norm(MatrixView m) { return euclidean_norm(m.values()); }

MatrixEmbedding normalize(MatrixView m) {
  check_shape(m.rows(), m.cols());
  check_finite(m.values());
  double n = frobenius_norm(m);
  if (!(n > 0.0)) throw DegenerateInputError("cannot normalize a zero matrix");
  std::vector<double> out(m.values().begin(), m.values().end());
  // Unit input is returned untouched so normalization is exactly idempotent.
  if (n != 1.0) {
    for (double& x : out) x /= n;
  }
  return MatrixEmbedding(Matrix(m.rows(), m.cols(), std::move(out)));
}

FlatEmbedding flatten(const MatrixEmbedding& m) {
  return FlatEmbedding({m.values().begin(), m.values().end()}, m.rows(), m.cols());
}

MatrixEmbedding unflatten(const FlatEmbedding& v) {
  return MatrixEmbedding::from_unit(
      Matrix(v.rows(), v.cols(), {v.values().begin(), v.values().end()}));
}

void tangent_project(std::span<const double> x, std::span<const double> g, std::span<double> out) {
  if (x.size() != g.size() || out.size() != x.size()) {
    throw ShapeMismatchError("tangent_project operands differ in length");
  }
  check_unit(x);
  double radial = dot(x, g);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = g[i] - radial * x[i];
}

std::vector<double> tangent_project(std::span<const double> x, std::span<const double> g) {
  std::vector<double> out(x.size());
  tangent_project(x, g, out);
  return out;
}

void retract(std::span<const double> x, std::span<const double> v, double step,
             std::span<double> out) {
  if (x.size() != v.size() || out.size() != x.size()) {
    throw ShapeMismatchError("retract operands differ in length");
  }
  check_unit(x);
  double vn = euclidean_norm(v);
  if (std::abs(dot(x, v)) > kUnitNormInputTol * std::max(1.0, vn)) {
    throw std::invalid_argument("retract: step direction is not tangent at x");
  }
  if (vn == 0.0 || step == 0.0) {
    std::copy(x.begin(), x.end(), out.begin());
    return;
  }
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - step * v[i];
  double n = euclidean_norm(out);
  if (n < 1e-15) throw DegenerateInputError("retract: step collapsed to the origin");
  for (double& y : out) y /= n;
}

std::vector<double> retract(std::span<const double> x, std::span<const double> v, double step) {
  std::vector<double> out(x.size());
  retract(x, v, step, out);
  return out;
}

}  // namespace matrep
