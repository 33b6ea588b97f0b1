#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "wopt/grid.hpp"
#include "wopt/rearrange.hpp"

// Slow, obviously-correct reference computations for small instances.  Used
// by the tests and by the CLI verify task; nothing in the main pipeline
// depends on them.
namespace wopt::oracle {

struct DenseEigen {
  double lambda1;
  std::vector<double> u;  // u^T A u = 1, sum(u) > 0
};

// Principal positive eigenvalue by a dense symmetric eigendecomposition of
// L^-1 M L^-T, where A = L L^T.  Throws WeightNotPositiveAnywhere when no
// positive eigenvalue exists.
DenseEigen dense_principal(const ScalarField& m);

struct Enumeration {
  double lambda1;
  ScalarField weight;
  std::size_t arrangements;  // distinct arrangements examined
};

// Minimum of lambda1 over every distinct placement of the profile's values on
// the domain's cells.  Intended for a dozen cells or so.
Enumeration minimize_by_enumeration(DomainPtr domain, const StepProfile& profile);

// max over permutations pi of sum_i f_i g_{pi(i)}, times the cell area.
double max_permuted_pairing(const ScalarField& f, const ScalarField& g);

// max over subsets A with k cells of \int_A f.
double max_subset_integral(const ScalarField& f, std::size_t k);

// Random test instances.

// Connected set of `cells` cells grown from one seed cell, cropped to its
// bounding box.  Connectedness keeps the principal eigenfunction positive.
DomainPtr random_polyomino(std::mt19937_64& rng, std::size_t cells, double h = 0.25);

// Domain whose rows are centred intervals about the vertical centre axis
// (some rows may be empty), so Steiner symmetrisation applies.
DomainPtr random_axis_domain(std::mt19937_64& rng, int max_width, int max_height);

// Uniform values in [lo, hi]; with `levels` > 0 the values are drawn from
// that many equally spaced levels instead, which produces ties.
ScalarField random_field(std::mt19937_64& rng, DomainPtr domain, double lo, double hi,
                         int levels = 0);

}  // namespace wopt::oracle
