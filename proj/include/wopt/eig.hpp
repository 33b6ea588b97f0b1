#pragma once

#include <memory>
#include <optional>

#include "wopt/error.hpp"
#include "wopt/grid.hpp"
#include "wopt/sparse.hpp"

namespace wopt {

// 5-point Dirichlet stiffness matrix on the in-domain cells, scaled so that
// u^T A u approximates \int |grad u|^2: 4 on the diagonal, -1 for each
// in-domain neighbour.  Off-mask and off-grid neighbours are zero Dirichlet
// nodes and simply drop out.
CsrMatrix assemble_stiffness(const GridDomain& domain);

enum class InnerSolver {
  cholesky,            // band Cholesky, factorised once per domain
  conjugate_gradient,  // warm-started CG at relative residual cg_tolerance
};

// Stiffness matrix of a domain together with a solver for A x = b.
// Immutable after construction; solve() is reentrant.
class DirichletLaplacian {
 public:
  explicit DirichletLaplacian(DomainPtr domain,
                              InnerSolver solver = InnerSolver::cholesky,
                              double cg_tolerance = 1e-11);

  const GridDomain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  const CsrMatrix& stiffness() const { return a_; }
  InnerSolver inner_solver() const { return solver_; }

  // Solves A x = b.  For CG, x carries the warm start on entry.
  void solve(std::span<const double> b, std::span<double> x) const;

 private:
  DomainPtr domain_;
  CsrMatrix a_;
  InnerSolver solver_;
  double cg_tolerance_;
  std::unique_ptr<BandCholesky> factor_;
};

struct EigenOptions {
  double rayleigh_tolerance = 1e-10;  // relative change between iterations
  double residual_tolerance = 1e-8;   // ||Au - lambda M u|| / ||Au||
  int max_iterations = 20000;
  int radius_steps = 50;   // power steps for the spectral radius of A^-1 |M|
  double shift_factor = 1.1;
  // Power steps before switching to restarted Krylov (Rayleigh-Ritz)
  // acceleration; 0 disables the switch.
  int krylov_after = 500;
  int krylov_dimension = 30;
};

struct EigenPair {
  double lambda1;
  ScalarField u;      // positive, normalised by u^T A u = 1
  double residual;    // relative residual ||Au - lambda1 M u|| / ||Au||
  int iterations;
};

// Smallest positive eigenvalue of A u = lambda M u with M = diag(m h^2),
// i.e. 1/lambda1 = max (u^T M u)/(u^T A u).
//
// Shifted power iteration on K = A^-1 M + sigma I.  The eigenvalues of A^-1 M
// are the reciprocals mu = 1/lambda; the most positive one, mu1 = 1/lambda1,
// is simple.  With sigma = 1.1 rho(A^-1 |M|) every other eigenvalue of K is
// smaller in modulus than mu1 + sigma, however large the negative part of the
// spectrum is.  A^-1 M is self-adjoint in the A inner product, so the Rayleigh
// estimate converges at the square of the vector rate.
//
// When mu2 is close to mu1 (two positive wells separated by a negative
// region) the power rate 1 - (mu1 - mu2)/(mu1 + sigma) is hopeless.  After
// krylov_after steps the iterate seeds restarted Rayleigh-Ritz on Krylov
// spaces of A^-1 M, which converges with the square root of that gap.  Both
// phases use the same stopping test; `iterations` counts inner solves.
//
// `initial` (if given, on the same domain) seeds the iteration.
// Throws WeightNotPositiveAnywhere or NoConvergence.
EigenPair principal_positive_eigenvalue(const DirichletLaplacian& laplacian,
                                        const ScalarField& m,
                                        const EigenOptions& options = {},
                                        const ScalarField* initial = nullptr);

EigenPair principal_positive_eigenvalue(DomainPtr domain, const ScalarField& m,
                                        const EigenOptions& options = {});

// (u^T M u) / (u^T A u).  Throws std::invalid_argument for u = 0.
double rayleigh(const ScalarField& u, const ScalarField& m, const CsrMatrix& a);

// ||A u - lambda M u|| / ||A u||.
double relative_residual(const CsrMatrix& a, const ScalarField& m,
                         const ScalarField& u, double lambda);

}  // namespace wopt
