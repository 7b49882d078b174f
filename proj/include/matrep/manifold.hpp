#pragma once

// Matrices on the unit Frobenius sphere S(p, r) and the first-order
// Riemannian machinery used to move along it.
//
// All matrices are stored row-major, so element (i, j) of a p x r matrix
// lives at flat index i * r + j. Flattening is therefore a copy, and the
// flat vector of a unit-Frobenius matrix is a unit vector in R^{p r}.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace matrep {

inline constexpr double kUnitNormInputTol = 1e-9;
inline constexpr double kUnitNormOutputTol = 1e-12;

/// Non-owning row-major view of a rows x cols block of doubles.
class MatrixView {
 public:
  MatrixView(std::span<const double> data, std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> values() const { return data_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

 private:
  std::span<const double> data_;
  std::size_t rows_;
  std::size_t cols_;
};

/// Dense real matrix with no norm constraint (gradients, pre-normalized input).
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  MatrixView view() const { return {values_, rows_, cols_}; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
};

/// A p x r matrix with unit Frobenius norm and r <= p.
///
/// Construction goes through normalize() or from_unit(); both validate the
/// shape and reject non-finite or zero input.
class MatrixEmbedding {
 public:
  /// Wraps a matrix that is already unit-norm within kUnitNormInputTol.
  static MatrixEmbedding from_unit(Matrix m);

  std::size_t rows() const { return m_.rows(); }
  std::size_t cols() const { return m_.cols(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  std::span<const double> values() const { return m_.values(); }
  MatrixView view() const { return m_.view(); }
  const Matrix& matrix() const { return m_; }

  friend bool operator==(const MatrixEmbedding&, const MatrixEmbedding&) = default;

 private:
  explicit MatrixEmbedding(Matrix m) : m_(std::move(m)) {}
  friend MatrixEmbedding normalize(MatrixView m);

  Matrix m_;
};

/// Row-major flattening of a MatrixEmbedding; a unit vector of length p * r.
class FlatEmbedding {
 public:
  FlatEmbedding(std::vector<double> values, std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const FlatEmbedding&, const FlatEmbedding&) = default;

 private:
  std::vector<double> values_;
  std::size_t rows_;
  std::size_t cols_;
};

double frobenius_norm(MatrixView m);
double euclidean_norm(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

/// M / ||M||_F. Throws DegenerateInputError on zero or non-finite input and
/// ShapeMismatchError when cols > rows or either is zero.
MatrixEmbedding normalize(MatrixView m);
inline MatrixEmbedding normalize(const Matrix& m) { return normalize(m.view()); }

FlatEmbedding flatten(const MatrixEmbedding& m);
MatrixEmbedding unflatten(const FlatEmbedding& v);

/// g - (x . g) x. Requires ||x|| = 1 within kUnitNormInputTol.
void tangent_project(std::span<const double> x, std::span<const double> g, std::span<double> out);
std::vector<double> tangent_project(std::span<const double> x, std::span<const double> g);

/// (x - step * v) / ||x - step * v||, with v tangent at x.
void retract(std::span<const double> x, std::span<const double> v, double step,
             std::span<double> out);
std::vector<double> retract(std::span<const double> x, std::span<const double> v, double step);

}  // namespace matrep
