#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace b3c {

// Dense row-major matrix of doubles. This is the only container network
// weights and batched activations live in; shapes are validated on every
// operation so mismatches fail fast instead of corrupting memory.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, 0.0) {}

  static Matrix zeros(int rows, int cols) { return Matrix(rows, cols); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return data_.size(); }

  double& at(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  double at(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  std::span<double> row(int r) { return {data_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)}; }
  std::span<const double> row(int r) const {
    return {data_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)};
  }

  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  void fill(double v) { data_.assign(data_.size(), v); }
  void resize(int rows, int cols) {
    rows_ = rows;
    cols_ = cols;
    data_.assign(static_cast<size_t>(rows) * cols, 0.0);
  }

  bool all_finite() const;

  bool operator==(const Matrix&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// out = a * b. Shapes: (m x k) * (k x n) -> (m x n). out is resized.
void matmul(const Matrix& a, const Matrix& b, Matrix& out);
// out += a^T * b. Shapes: (k x m)^T * (k x n) -> (m x n). out must be preshaped.
void matmul_tn_accum(const Matrix& a, const Matrix& b, Matrix& out);
// out = a * b^T. Shapes: (m x k) * (n x k)^T -> (m x n). out is resized.
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out);

Matrix matmul(const Matrix& a, const Matrix& b);

// Adds `row` to every row of m (bias broadcast).
void add_row_inplace(Matrix& m, std::span<const double> row);
// Accumulates column sums of m into out (bias gradient).
void add_col_sums(const Matrix& m, std::span<double> out);

}  // namespace b3c
