#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace biot {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Symmetric sparse matrix with both triangles stored in CSR layout.
class SparseSymMatrix {
 public:
  SparseSymMatrix() = default;
  //! Duplicate (row, col) entries are summed. Throws if the pattern is not symmetric.
  SparseSymMatrix(std::size_t dim, std::vector<Triplet> entries);

  static SparseSymMatrix identity(std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::size_t nonzeros() const { return values_.size(); }
  bool symmetric() const { return symmetric_; }

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;
  double at(std::size_t row, std::size_t col) const;
  std::vector<double> diagonal() const;
  //! Largest |A_ij - A_ji| relative to the largest |A_ij|.
  double asymmetry() const;

  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::size_t> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

 private:
  std::size_t dim_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
  bool symmetric_ = true;
};

struct CgOptions {
  double tol = 1e-10;  // relative residual ||Ax - b|| / ||b||
  int max_iter = 0;    // 0 selects 10 * dim
};

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients from a zero initial guess.
/// Throws SolverStallError when max_iter is reached.
CgResult cg_solve(const SparseSymMatrix& A, std::span<const double> b, const CgOptions& options = {});

//! Sequential left-to-right sum, so results do not depend on threading.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace biot
