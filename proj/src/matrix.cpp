#include "b3c/matrix.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Core>

namespace b3c {

namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Map = Eigen::Map<EMat>;
using CMap = Eigen::Map<const EMat>;

CMap cmap(const Matrix& m) { return CMap(m.data(), m.rows(), m.cols()); }
Map mmap(Matrix& m) { return Map(m.data(), m.rows(), m.cols()); }

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

bool Matrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

void matmul(const Matrix& a, const Matrix& b, Matrix& out) {
  require(a.cols() == b.rows(), "matmul: inner dimensions differ");
  if (&out == &a || &out == &b) {
    // noalias() below forbids in-place products; detour through a temporary.
    Matrix tmp;
    matmul(a, b, tmp);
    out = std::move(tmp);
    return;
  }
  if (out.rows() != a.rows() || out.cols() != b.cols()) out.resize(a.rows(), b.cols());
  mmap(out).noalias() = cmap(a) * cmap(b);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix out;
  matmul(a, b, out);
  return out;
}

void matmul_tn_accum(const Matrix& a, const Matrix& b, Matrix& out) {
  require(a.rows() == b.rows(), "matmul_tn_accum: leading dimensions differ");
  require(out.rows() == a.cols() && out.cols() == b.cols(), "matmul_tn_accum: output shape");
  require(&out != &a && &out != &b, "matmul_tn_accum: out must not alias an input");
  mmap(out).noalias() += cmap(a).transpose() * cmap(b);
}

void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out) {
  require(a.cols() == b.cols(), "matmul_nt: trailing dimensions differ");
  if (&out == &a || &out == &b) {
    Matrix tmp;
    matmul_nt(a, b, tmp);
    out = std::move(tmp);
    return;
  }
  if (out.rows() != a.rows() || out.cols() != b.rows()) out.resize(a.rows(), b.rows());
  mmap(out).noalias() = cmap(a) * cmap(b).transpose();
}

void add_row_inplace(Matrix& m, std::span<const double> row) {
  require(static_cast<size_t>(m.cols()) == row.size(), "add_row_inplace: width mismatch");
  for (int r = 0; r < m.rows(); ++r) {
    double* p = m.data() + static_cast<size_t>(r) * m.cols();
    for (int c = 0; c < m.cols(); ++c) p[c] += row[c];
  }
}

void add_col_sums(const Matrix& m, std::span<double> out) {
  require(static_cast<size_t>(m.cols()) == out.size(), "add_col_sums: width mismatch");
  for (int r = 0; r < m.rows(); ++r) {
    const double* p = m.data() + static_cast<size_t>(r) * m.cols();
    for (int c = 0; c < m.cols(); ++c) out[c] += p[c];
  }
}

}  // namespace b3c
