#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wopt {

// Compressed sparse row matrix with sorted column indices.
class CsrMatrix {
 public:
  struct Entry {
    std::size_t row;
    std::size_t col;
    double value;
  };

  CsrMatrix() = default;
  // Duplicate (row, col) entries are summed.
  CsrMatrix(std::size_t n, std::vector<Entry> entries);

  std::size_t rows() const { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
  std::size_t nonzeros() const { return values_.size(); }

  double at(std::size_t row, std::size_t col) const;
  void multiply(std::span<const double> x, std::span<double> y) const;
  // x^T A y
  double bilinear(std::span<const double> x, std::span<const double> y) const;

  bool is_symmetric() const;
  // Largest |row - col| over stored entries.
  std::size_t bandwidth() const;

  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::size_t>& col_index() const { return col_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_;
  std::vector<double> values_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

struct CgResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

// Conjugate gradients for SPD A.  x holds the starting guess on entry and the
// solution on exit; stops when ||b - Ax|| <= rel_tol ||b||.
CgResult conjugate_gradient(const CsrMatrix& a, std::span<const double> b,
                            std::span<double> x, double rel_tol,
                            int max_iterations);

// Cholesky factorisation of an SPD band matrix, L stored row-wise inside the
// band.  Grid Laplacians in row-major cell order have bandwidth equal to the
// row length, so factorisation costs O(n w^2) once and every solve O(n w).
class BandCholesky {
 public:
  explicit BandCholesky(const CsrMatrix& a);

  void solve(std::span<const double> b, std::span<double> x) const;
  std::size_t size() const { return n_; }

 private:
  double& l(std::size_t i, std::size_t j) { return band_[i * (w_ + 1) + (w_ + j - i)]; }
  double l(std::size_t i, std::size_t j) const {
    return band_[i * (w_ + 1) + (w_ + j - i)];
  }

  std::size_t n_ = 0;
  std::size_t w_ = 0;
  std::vector<double> band_;
};

}  // namespace wopt
