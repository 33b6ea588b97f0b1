#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "wopt/eig.hpp"
#include "wopt/grid.hpp"
#include "wopt/rearrange.hpp"

namespace wopt {

struct OptimizeOptions {
  int seeds = 8;
  std::uint64_t rng_seed = 20240917;
  int max_iterations = 500;
  // Seed 0 starts from the superlevel sets of the m = 1 eigenfunction
  // instead of a random arrangement.
  bool principal_start = true;
  // Exchange moves tried at a fixed point: this many cells on each side of
  // every level interface (0 turns them off).  A swap is taken only when it
  // lowers lambda1 by more than the relative exchange_gain.
  int exchange_candidates = 2;
  double exchange_gain = 1e-10;
  // Worker threads for the seed loop; 0 = hardware concurrency.
  unsigned threads = 0;
  EigenOptions eigen;
  double descent_slack = 1e-9;
};

struct OptimizeReport {
  std::vector<double> lambda_history;  // best seed, one entry per weight visited
  EigenPair final;
  ScalarField weight;
  bool stabilized = false;
  int restarts_used = 0;  // seeds run
  int iterations = 0;     // rearrangement steps taken by the best seed
  int best_seed = 0;
  bool cycled = false;
  std::vector<double> seed_lambdas;
};

// The element of the class of `profile` that is comonotone with u: cells are
// sorted by u descending (ties by cell index) and receive the profile's values
// in decreasing order.  Among all rearrangements of the profile it maximises
// \int m u^2.  Throws std::invalid_argument unless u > 0 everywhere.
ScalarField rearrangement_step(const StepProfile& profile, const ScalarField& u);

// True when sorting cells by u descending (ties by index) reads the weight in
// non-increasing order.
bool comonotone(const ScalarField& weight, const ScalarField& u);

// Fixed-point iteration m_{k+1} = rearrangement_step(profile, u(m_k)) from
// `options.seeds` starting arrangements of the profile (seed 0 optionally the
// principal start, the rest random).  Each step cannot increase lambda1; a
// step that does (beyond descent_slack) raises Error.  At a fixed point the
// exchange moves are tried and, if one lowers lambda1, the iteration resumes
// from it.  Stops at a fixed point no exchange improves, on a revisited weight
// (cycle) or after max_iterations steps.  Returns the best seed (ties: lowest
// seed index).
OptimizeReport optimize_profile(const DirichletLaplacian& laplacian,
                                const StepProfile& generator,
                                const OptimizeOptions& options = {});

// Single resource: -m2 <= m <= m1, \int m = m3.
struct SingleClass {
  double m1;
  double m2;
  double m3;
};

// Cell count of the level set {m = m1}: round(e / h^2).
std::size_t single_level_cells(const GridDomain& domain, SingleClass cls);
StepProfile single_generator(const GridDomain& domain, SingleClass cls);

// Throws Infeasible unless -m2|Omega| < m3 < m1|Omega| and m1 > 0.
OptimizeReport optimize_single(const DirichletLaplacian& laplacian,
                               SingleClass cls,
                               const OptimizeOptions& options = {});

// Levels of the optimal two-resource weight before quantisation.
struct TwoLevelPlan {
  double e1;
  double e2;
  double gamma;  // min(e1, e2)
  double delta;  // max(e1, e2)
  double top;    // q1 + q2
  double mid;    // r
  double bottom; // -(p1 + p2)
  std::size_t top_cells;    // round(gamma / h^2)
  std::size_t upper_cells;  // round(delta / h^2)
};

TwoLevelPlan plan_two_resource(const GridDomain& domain, const ResourceClass& c1,
                               const ResourceClass& c2);
StepProfile two_resource_generator(const GridDomain& domain, const TwoLevelPlan& plan);

// Three-valued optimal weight: top on E, mid on G \ E, bottom off G.
struct BangBangWeight {
  DomainPtr domain;
  CellMask e;
  CellMask g;
  double top;
  double mid;
  double bottom;
  std::pair<double, double> realized_integrals;  // \int f1, \int f2 after quantisation

  ScalarField field() const;
};

struct TwoResourceResult {
  OptimizeReport report;
  BangBangWeight weight;
};

TwoResourceResult optimize_two(const DirichletLaplacian& laplacian,
                               const ResourceClass& c1, const ResourceClass& c2,
                               const OptimizeOptions& options = {});

// Splits the optimal weight into its two resource components.  On E both are
// at their maximum, off G both at their minimum; on G \ E the resource with
// the larger level measure sits at q_i and the other at -p_i.
// Throws DomainMismatch when the weight's levels or level sets do not belong
// to the given classes.
std::pair<ScalarField, ScalarField> decompose(const BangBangWeight& w,
                                              const ResourceClass& c1,
                                              const ResourceClass& c2);

struct ClassComparison {
  double lambda_two_resource;
  double lambda_single;
  TwoResourceResult two;
  OptimizeReport single;
};

// Optimises the same domain once under two separate resource constraints and
// once under a single combined constraint.
ClassComparison compare_classes(const DirichletLaplacian& laplacian,
                                const ResourceClass& c1, const ResourceClass& c2,
                                SingleClass single, const OptimizeOptions& options = {});

// Food / predator example: (p, q, l) = (0, 1, 2|Omega|/3) and (1, 0, -|Omega|/2)
// against the single class -1 <= f <= 1, \int f = |Omega|/6.  The single
// constraint admits a strictly smaller eigenvalue.
ClassComparison compare_remark(const DirichletLaplacian& laplacian,
                               const OptimizeOptions& options = {});

}  // namespace wopt
