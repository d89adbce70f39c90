#pragma once

#include <cstddef>
#include <vector>

#include "evotherm/errors.hpp"

namespace evotherm {

using Vector = std::vector<double>;

/// Dense real matrix, row-major storage.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(const Vector& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return a_[i * cols_ + j];
  }

  const std::vector<double>& data() const { return a_; }
  std::vector<double>& data() { return a_; }

  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> a_;
};

/// Sparse matrix in triplet form; duplicate entries are summed on build.
class SparseMatrix {
 public:
  struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
  };

  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols,
               std::vector<Triplet> triplets);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<Triplet>& triplets() const { return triplets_; }

  DenseMatrix to_dense() const;
  Vector matvec(const Vector& x) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Triplet> triplets_;  // deduplicated, sorted by (row, col)
};

struct EigenDecomposition {
  Vector eigenvalues;       // ascending
  DenseMatrix eigenvectors; // columns, orthogonal
};

// Basic dense kernels.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& m);
DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix sub(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix scale(const DenseMatrix& m, double c);
Vector matvec(const DenseMatrix& m, const Vector& x);
double frobenius_norm(const DenseMatrix& m);
double max_abs(const DenseMatrix& m);
double dot(const Vector& a, const Vector& b);
double norm2(const Vector& v);

/// Symmetric eigendecomposition. Cyclic Jacobi for n <= 512, Householder
/// tridiagonalization + implicit-shift QL above, so results are
/// deterministic across runs.
EigenDecomposition sym_eig(const DenseMatrix& m);

/// Square root of a symmetric positive semidefinite matrix via sym_eig.
/// Eigenvalues in [-1e-10*norm, 0) are clamped to zero; anything below
/// raises NotPsdError.
DenseMatrix spd_sqrt(const DenseMatrix& m);

/// LU factorization with partial pivoting, reusable across right-hand sides.
class LuFactorization {
 public:
  explicit LuFactorization(const DenseMatrix& m);
  Vector solve(const Vector& b) const;
  DenseMatrix solve(const DenseMatrix& b) const;

 private:
  std::size_t n_ = 0;
  DenseMatrix lu_;
  std::vector<std::size_t> perm_;
};

Vector solve_linear(const DenseMatrix& m, const Vector& b);
DenseMatrix inverse(const DenseMatrix& m);

/// Largest singular value, via sym_eig of M^T M.
double op_norm(const DenseMatrix& m);

}  // namespace evotherm
