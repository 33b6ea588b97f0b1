#include "wopt/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wopt {

CsrMatrix::CsrMatrix(std::size_t n, std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  row_ptr_.assign(n + 1, 0);
  const Entry* prev = nullptr;
  for (const Entry& e : entries) {
    if (e.row >= n || e.col >= n) throw std::out_of_range("entry outside matrix");
    if (prev && prev->row == e.row && prev->col == e.col) {
      values_.back() += e.value;
    } else {
      col_.push_back(e.col);
      values_.push_back(e.value);
      ++row_ptr_[e.row + 1];
    }
    prev = &e;
  }
  for (std::size_t r = 1; r <= n; ++r) row_ptr_[r] += row_ptr_[r - 1];
}

double CsrMatrix::at(std::size_t row, std::size_t col) const {
  const auto first = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
  const auto last = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
  const auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return 0.0;
  return values_[static_cast<std::size_t>(it - col_.begin())];
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = rows();
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      s += values_[k] * x[col_[k]];
    y[r] = s;
  }
}

double CsrMatrix::bilinear(std::span<const double> x,
                           std::span<const double> y) const {
  double total = 0.0;
  const std::size_t n = rows();
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      s += values_[k] * y[col_[k]];
    total += x[r] * s;
  }
  return total;
}

bool CsrMatrix::is_symmetric() const {
  const std::size_t n = rows();
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      if (at(col_[k], r) != values_[k]) return false;
  return true;
}

std::size_t CsrMatrix::bandwidth() const {
  std::size_t w = 0;
  const std::size_t n = rows();
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      w = std::max(w, col_[k] > r ? col_[k] - r : r - col_[k]);
  return w;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

CgResult conjugate_gradient(const CsrMatrix& a, std::span<const double> b,
                            std::span<double> x, double rel_tol,
                            int max_iterations) {
  const std::size_t n = b.size();
  CgResult result;
  const double b_norm = norm2(b);
  if (b_norm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    result.converged = true;
    return result;
  }

  std::vector<double> r(n), p(n), q(n);
  a.multiply(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  p = r;
  double rr = dot(r, r);
  const double target = rel_tol * b_norm;

  int it = 0;
  while (std::sqrt(rr) > target && it < max_iterations) {
    ++it;
    a.multiply(p, q);
    const double alpha = rr / dot(p, q);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    const double rr_new = dot(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  result.iterations = it;
  result.relative_residual = std::sqrt(rr) / b_norm;
  result.converged = std::sqrt(rr) <= target;
  return result;
}

BandCholesky::BandCholesky(const CsrMatrix& a) : n_(a.rows()), w_(a.bandwidth()) {
  band_.assign(n_ * (w_ + 1), 0.0);
  const auto& rp = a.row_ptr();
  const auto& ci = a.col_index();
  const auto& v = a.values();
  for (std::size_t r = 0; r < n_; ++r)
    for (std::size_t k = rp[r]; k < rp[r + 1]; ++k)
      if (ci[k] <= r) l(r, ci[k]) = v[k];

  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t lo = i > w_ ? i - w_ : 0;
    for (std::size_t j = lo; j <= i; ++j) {
      const std::size_t kl = std::max(lo, j > w_ ? j - w_ : std::size_t{0});
      double s = l(i, j);
      for (std::size_t k = kl; k < j; ++k) s -= l(i, k) * l(j, k);
      if (j == i) {
        if (!(s > 0.0)) throw std::runtime_error("matrix is not positive definite");
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
}

void BandCholesky::solve(std::span<const double> b, std::span<double> x) const {
  // L y = b
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t lo = i > w_ ? i - w_ : 0;
    double s = b[i];
    for (std::size_t k = lo; k < i; ++k) s -= l(i, k) * x[k];
    x[i] = s / l(i, i);
  }
  // L^T x = y
  for (std::size_t i = n_; i-- > 0;) {
    const std::size_t hi = std::min(n_ - 1, i + w_);
    double s = x[i];
    for (std::size_t k = i + 1; k <= hi; ++k) s -= l(k, i) * x[k];
    x[i] = s / l(i, i);
  }
}

}  // namespace wopt
