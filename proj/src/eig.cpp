#include "wopt/eig.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wopt/error.hpp"

namespace wopt {

CsrMatrix assemble_stiffness(const GridDomain& domain) {
  std::vector<CsrMatrix::Entry> entries;
  entries.reserve(domain.size() * 5);
  constexpr int dc[4] = {-1, 1, 0, 0};
  constexpr int dr[4] = {0, 0, -1, 1};
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const int c = domain.column(i), r = domain.row(i);
    entries.push_back({i, i, 4.0});
    for (int k = 0; k < 4; ++k) {
      const auto j = domain.index(c + dc[k], r + dr[k]);
      if (j != GridDomain::npos)
        entries.push_back({i, static_cast<std::size_t>(j), -1.0});
    }
  }
  return CsrMatrix(domain.size(), std::move(entries));
}

DirichletLaplacian::DirichletLaplacian(DomainPtr domain, InnerSolver solver,
                                       double cg_tolerance)
    : domain_(std::move(domain)),
      a_(assemble_stiffness(*domain_)),
      solver_(solver),
      cg_tolerance_(cg_tolerance) {
  if (solver_ == InnerSolver::cholesky) factor_ = std::make_unique<BandCholesky>(a_);
}

void DirichletLaplacian::solve(std::span<const double> b, std::span<double> x) const {
  if (factor_) {
    factor_->solve(b, x);
    return;
  }
  // CG needs at most n steps in exact arithmetic; allow slack for rounding.
  const int cap = static_cast<int>(10 * a_.rows() + 100);
  const CgResult r = conjugate_gradient(a_, b, x, cg_tolerance_, cap);
  if (!r.converged)
    throw NoConvergence("inner CG stalled at relative residual " +
                        std::to_string(r.relative_residual));
}

namespace {

void normalise_in_energy(const CsrMatrix& a, std::vector<double>& x,
                         std::vector<double>& ax) {
  a.multiply(x, ax);
  const double energy = dot(x, ax);
  if (!(energy > 0.0)) throw NoConvergence("power iterate collapsed to zero");
  const double s = 1.0 / std::sqrt(energy);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] *= s;
    ax[i] *= s;
  }
}

// Cyclic Jacobi for a small dense symmetric matrix (row-major, k x k).
// Returns the largest eigenvalue and its unit eigenvector.
std::pair<double, std::vector<double>> top_eigenpair(std::vector<double> h, std::size_t k) {
  std::vector<double> v(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) v[i * k + i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, diag = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      diag += h[i * k + i] * h[i * k + i];
      for (std::size_t j = i + 1; j < k; ++j) off += h[i * k + j] * h[i * k + j];
    }
    if (off <= 1e-32 * diag) break;
    for (std::size_t p = 0; p < k; ++p) {
      for (std::size_t q = p + 1; q < k; ++q) {
        const double apq = h[p * k + q];
        if (apq == 0.0) continue;
        const double theta = (h[q * k + q] - h[p * k + p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t r = 0; r < k; ++r) {
          const double hrp = h[r * k + p], hrq = h[r * k + q];
          h[r * k + p] = c * hrp - s * hrq;
          h[r * k + q] = s * hrp + c * hrq;
        }
        for (std::size_t r = 0; r < k; ++r) {
          const double hpr = h[p * k + r], hqr = h[q * k + r];
          h[p * k + r] = c * hpr - s * hqr;
          h[q * k + r] = s * hpr + c * hqr;
        }
        for (std::size_t r = 0; r < k; ++r) {
          const double vrp = v[r * k + p], vrq = v[r * k + q];
          v[r * k + p] = c * vrp - s * vrq;
          v[r * k + q] = s * vrp + c * vrq;
        }
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < k; ++i)
    if (h[i * k + i] > h[best * k + best]) best = i;
  std::vector<double> y(k);
  for (std::size_t r = 0; r < k; ++r) y[r] = v[r * k + best];
  return {h[best * k + best], std::move(y)};
}

}  // namespace

EigenPair principal_positive_eigenvalue(const DirichletLaplacian& laplacian,
                                        const ScalarField& m,
                                        const EigenOptions& options,
                                        const ScalarField* initial) {
  const GridDomain& domain = laplacian.domain();
  if (!domain.same_shape(m.domain()))
    throw DomainMismatch("weight and operator live on different domains");
  if (!(m.max() > 0.0))
    throw WeightNotPositiveAnywhere("weight has no cell with m > 0");

  const CsrMatrix& a = laplacian.stiffness();
  const std::size_t n = domain.size();
  const double area = domain.cell_area();

  std::vector<double> mass(n), abs_mass(n);
  for (std::size_t i = 0; i < n; ++i) {
    mass[i] = m[i] * area;
    abs_mass[i] = std::abs(mass[i]);
  }

  std::vector<double> u(n, 1.0);
  if (initial) {
    if (!domain.same_shape(initial->domain()))
      throw DomainMismatch("initial guess lives on a different domain");
    if (std::any_of(initial->values().begin(), initial->values().end(),
                    [](double v) { return v != 0.0; }))
      std::copy(initial->values().begin(), initial->values().end(), u.begin());
  }

  std::vector<double> au(n), b(n), w(n, 0.0), x(n), ax(n);

  // Spectral radius of A^-1 |M| by plain power steps from |u|.
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = std::abs(u[i]) + 1e-300;
  std::vector<double> av(n);
  normalise_in_energy(a, v, av);
  double radius = 0.0;
  for (int k = 0; k < options.radius_steps; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      b[i] = abs_mass[i] * v[i];
      w[i] = radius * v[i];
    }
    laplacian.solve(b, w);
    v.swap(w);
    normalise_in_energy(a, v, av);
    for (std::size_t i = 0; i < n; ++i) b[i] = abs_mass[i] * v[i];
    radius = dot(v, b);
  }
  const double shift = options.shift_factor * radius;

  normalise_in_energy(a, u, au);
  for (std::size_t i = 0; i < n; ++i) b[i] = mass[i] * u[i];
  double mu = dot(u, b);

  double lambda = 0.0, residual = 0.0;
  // Updates mu from u (u^T A u = 1, au = A u) and reports whether the
  // stopping test holds.
  auto converged = [&]() {
    for (std::size_t i = 0; i < n; ++i) b[i] = mass[i] * u[i];
    const double mu_new = dot(u, b);
    const double change = std::abs(mu_new - mu);
    mu = mu_new;
    if (!(mu > 0.0)) return false;
    lambda = 1.0 / mu;
    double rr = 0.0, aa = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = au[i] - lambda * b[i];
      rr += r * r;
      aa += au[i] * au[i];
    }
    residual = std::sqrt(rr / aa);
    return change <= options.rayleigh_tolerance * mu &&
           residual <= options.residual_tolerance;
  };
  auto finish = [&](int iterations) {
    double sum = 0.0;
    for (double value : u) sum += value;
    if (sum < 0.0)
      for (double& value : u) value = -value;
    return EigenPair{lambda, ScalarField(m.domain_ptr(), std::move(u)), residual,
                     iterations};
  };

  const int power_cap = options.krylov_after > 0
                            ? std::min(options.krylov_after, options.max_iterations)
                            : options.max_iterations;
  int it = 0;
  while (it < power_cap) {
    ++it;
    for (std::size_t i = 0; i < n; ++i) {
      b[i] = mass[i] * u[i];
      w[i] = mu * u[i];
    }
    laplacian.solve(b, w);
    for (std::size_t i = 0; i < n; ++i) x[i] = w[i] + shift * u[i];
    normalise_in_energy(a, x, ax);
    u.swap(x);
    au.swap(ax);
    if (converged()) return finish(it);
  }

  // Restarted Rayleigh-Ritz on span{u, K u, K^2 u, ...}, K = A^-1 M, with the
  // basis A-orthonormal so the projected problem is the symmetric Q^T M Q.
  const std::size_t dim = std::min<std::size_t>(
      static_cast<std::size_t>(std::max(options.krylov_dimension, 2)), n);
  std::vector<std::vector<double>> q, aq;
  while (it < options.max_iterations) {
    q.assign(1, u);
    aq.assign(1, au);
    while (q.size() < dim && it < options.max_iterations) {
      for (std::size_t i = 0; i < n; ++i) {
        b[i] = mass[i] * q.back()[i];
        w[i] = mu * q.back()[i];
      }
      laplacian.solve(b, w);
      ++it;
      a.multiply(w, ax);
      const double before = dot(w, ax);
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t j = 0; j < q.size(); ++j) {
          const double c = dot(w, aq[j]);
          for (std::size_t i = 0; i < n; ++i) w[i] -= c * q[j][i];
        }
      a.multiply(w, ax);
      const double energy = dot(w, ax);
      if (!(energy > 1e-24 * before)) break;  // invariant subspace
      const double s = 1.0 / std::sqrt(energy);
      for (std::size_t i = 0; i < n; ++i) {
        w[i] *= s;
        ax[i] *= s;
      }
      q.push_back(w);
      aq.push_back(ax);
    }
    const std::size_t k = q.size();
    std::vector<double> h(k * k);
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t c = r; c < k; ++c) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += q[r][i] * mass[i] * q[c][i];
        h[r * k + c] = h[c * k + r] = sum;
      }
    const auto [theta, y] = top_eigenpair(std::move(h), k);
    std::fill(u.begin(), u.end(), 0.0);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < n; ++i) u[i] += y[j] * q[j][i];
    normalise_in_energy(a, u, au);
    if (converged()) return finish(it);
  }
  throw NoConvergence("eigensolver did not converge in " +
                      std::to_string(options.max_iterations) +
                      " iterations (residual " + std::to_string(residual) + ")");
}

EigenPair principal_positive_eigenvalue(DomainPtr domain, const ScalarField& m,
                                        const EigenOptions& options) {
  const DirichletLaplacian laplacian(std::move(domain));
  return principal_positive_eigenvalue(laplacian, m, options);
}

double rayleigh(const ScalarField& u, const ScalarField& m, const CsrMatrix& a) {
  require_same_domain(u, m);
  if (std::all_of(u.values().begin(), u.values().end(),
                  [](double v) { return v == 0.0; }))
    throw std::invalid_argument("Rayleigh quotient of the zero function");
  const double area = u.domain().cell_area();
  double num = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) num += m[i] * area * u[i] * u[i];
  return num / a.bilinear(u.values(), u.values());
}

double relative_residual(const CsrMatrix& a, const ScalarField& m,
                         const ScalarField& u, double lambda) {
  const std::size_t n = u.size();
  std::vector<double> au(n);
  a.multiply(u.values(), au);
  const double area = u.domain().cell_area();
  double rr = 0.0, aa = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = au[i] - lambda * m[i] * area * u[i];
    rr += r * r;
    aa += au[i] * au[i];
  }
  return std::sqrt(rr / aa);
}

}  // namespace wopt
