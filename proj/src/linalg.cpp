#include "biot/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

#include "biot/error.hpp"

namespace biot {

SparseSymMatrix::SparseSymMatrix(std::size_t dim, std::vector<Triplet> entries) : dim_(dim) {
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  row_ptr_.assign(dim + 1, 0);
  col_idx_.reserve(entries.size());
  values_.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size();) {
    const Triplet& t = entries[k];
    if (t.row >= dim || t.col >= dim) throw Error("sparse entry out of range");
    double sum = 0.0;
    std::size_t j = k;
    for (; j < entries.size() && entries[j].row == t.row && entries[j].col == t.col; ++j) sum += entries[j].value;
    if (!std::isfinite(sum)) throw Error("non-finite sparse matrix entry");
    col_idx_.push_back(t.col);
    values_.push_back(sum);
    ++row_ptr_[t.row + 1];
    k = j;
  }
  for (std::size_t r = 0; r < dim; ++r) row_ptr_[r + 1] += row_ptr_[r];

  for (std::size_t r = 0; r < dim && symmetric_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const std::size_t c = col_idx_[k];
      const auto begin = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[c]);
      const auto end = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[c + 1]);
      if (!std::binary_search(begin, end, r)) {
        symmetric_ = false;
        break;
      }
    }
  if (!symmetric_) throw Error("sparse matrix pattern is not structurally symmetric");
}

SparseSymMatrix SparseSymMatrix::identity(std::size_t dim) {
  std::vector<Triplet> entries;
  entries.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) entries.push_back({i, i, 1.0});
  return SparseSymMatrix(dim, std::move(entries));
}

void SparseSymMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  assert(x.size() == dim_ && y.size() == dim_);
  for (std::size_t r = 0; r < dim_; ++r) {
    double sum = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) sum += values_[k] * x[col_idx_[k]];
    y[r] = sum;
  }
}

std::vector<double> SparseSymMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(dim_);
  multiply(x, y);
  return y;
}

double SparseSymMatrix::at(std::size_t row, std::size_t col) const {
  const auto begin = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
  const auto end = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
  const auto it = std::lower_bound(begin, end, col);
  if (it == end || *it != col) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

std::vector<double> SparseSymMatrix::diagonal() const {
  std::vector<double> d(dim_);
  for (std::size_t r = 0; r < dim_; ++r) d[r] = at(r, r);
  return d;
}

double SparseSymMatrix::asymmetry() const {
  double largest = 0.0;
  double worst = 0.0;
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      largest = std::max(largest, std::abs(values_[k]));
      worst = std::max(worst, std::abs(values_[k] - at(col_idx_[k], r)));
    }
  return largest > 0.0 ? worst / largest : 0.0;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

CgResult cg_solve(const SparseSymMatrix& A, std::span<const double> b, const CgOptions& options) {
  const std::size_t n = A.dim();
  if (b.size() != n) throw Error("right-hand side size does not match matrix dimension");
  for (double v : b)
    if (!std::isfinite(v)) throw Error("non-finite right-hand side");

  CgResult result;
  result.x.assign(n, 0.0);
  const double b_norm = norm2(b);
  if (b_norm == 0.0) return result;

  const int max_iter = options.max_iter > 0 ? options.max_iter : static_cast<int>(10 * std::max<std::size_t>(n, 1));
  std::vector<double> inv_diag = A.diagonal();
  for (double& d : inv_diag) d = d > 0.0 ? 1.0 / d : 1.0;

  std::vector<double> r(b.begin(), b.end());
  std::vector<double> z(n), p(n), Ap(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot(r, z);
  double residual = 1.0;

  for (int it = 1; it <= max_iter; ++it) {
    A.multiply(p, Ap);
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0))
      throw SolverStallError("conjugate gradients lost positive curvature (matrix not SPD)", residual, it);
    const double step = rz / pAp;
    // Energy norm of the error drops by step * rz each iteration.
    assert(step * rz >= 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      result.x[i] += step * p[i];
      r[i] -= step * Ap[i];
    }
    residual = norm2(r) / b_norm;
    result.iterations = it;
    if (residual <= options.tol) {
      // Recompute the true residual to guard against drift in the recurrence.
      std::vector<double> Ax = A.multiply(result.x);
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ax[i];
      residual = norm2(r) / b_norm;
      if (residual <= options.tol) {
        result.relative_residual = residual;
        return result;
      }
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  std::ostringstream os;
  os << "conjugate gradients did not reach tolerance " << options.tol << " in " << max_iter
     << " iterations (relative residual " << residual << ")";
  throw SolverStallError(os.str(), residual, max_iter);
}

}  // namespace biot
