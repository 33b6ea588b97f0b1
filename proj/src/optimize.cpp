#include "wopt/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <cmath>
#include <exception>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_set>

#include "wopt/error.hpp"
#include "wopt/sum.hpp"

namespace wopt {

namespace {

std::uint64_t weight_hash(std::span<const double> values) {
  std::uint64_t h = 1469598103934665603ULL;
  for (double v : values) {
    std::uint64_t bits;
    static_assert(sizeof bits == sizeof v);
    std::memcpy(&bits, &v, sizeof bits);
    for (int k = 0; k < 8; ++k) {
      h ^= (bits >> (8 * k)) & 0xffU;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

double weighted_mass(const ScalarField& m, const ScalarField& u) {
  CompensatedSum s;
  for (std::size_t i = 0; i < m.size(); ++i) s += m[i] * u[i] * u[i];
  return s.value() * m.domain().cell_area();
}

// At a fixed point every level occupies a run of consecutive ranks in the
// u-order.  Swapping a cell at the bottom of one run with a cell at the top of
// the next one can still lower lambda1 even though the rearrangement step
// never proposes it.  Tries the `exchange_candidates` cells on either side of
// every interface and returns the best swap if it lowers lambda1.
std::optional<std::pair<ScalarField, EigenPair>> exchange_move(
    const DirichletLaplacian& laplacian, const StepProfile& generator,
    const ScalarField& weight, const EigenPair& eig, const OptimizeOptions& options) {
  const std::size_t b = static_cast<std::size_t>(std::max(options.exchange_candidates, 0));
  if (b == 0) return std::nullopt;
  const std::vector<std::size_t> order = decreasing_order(eig.u.values());
  const std::vector<std::size_t>& ends = generator.ends();

  std::optional<std::pair<ScalarField, EigenPair>> best;
  double best_lambda = eig.lambda1 * (1.0 - options.exchange_gain);
  for (std::size_t k = 0; k + 1 < ends.size(); ++k) {
    const std::size_t lo = k == 0 ? 0 : ends[k - 1];
    const std::size_t cut = ends[k], hi = ends[k + 1];
    for (std::size_t p = cut; p > lo && cut - p < b; --p) {
      for (std::size_t q = cut; q < hi && q - cut < b; ++q) {
        ScalarField trial = weight;
        std::swap(trial[order[p - 1]], trial[order[q]]);
        EigenPair e = principal_positive_eigenvalue(laplacian, trial, options.eigen, &eig.u);
        if (e.lambda1 < best_lambda) {
          best_lambda = e.lambda1;
          best.emplace(std::move(trial), std::move(e));
        }
      }
    }
  }
  return best;
}

struct SeedOutcome {
  std::vector<double> history;
  EigenPair final;
  ScalarField weight;
  bool stabilized;
  bool cycled;
  int iterations;
};

SeedOutcome run_seed(const DirichletLaplacian& laplacian,
                     const StepProfile& generator, int seed,
                     const OptimizeOptions& options) {
  const DomainPtr& domain = laplacian.domain_ptr();
  const std::size_t n = domain->size();

  ScalarField weight = ScalarField::constant(domain, 1.0);
  if (seed == 0 && options.principal_start) {
    // Superlevel arrangement of the unweighted ground state.
    weight = rearrangement_step(
        generator, principal_positive_eigenvalue(laplacian, weight, options.eigen).u);
  } else {
    std::seed_seq seq{static_cast<std::uint32_t>(options.rng_seed),
                      static_cast<std::uint32_t>(options.rng_seed >> 32),
                      static_cast<std::uint32_t>(seed)};
    std::mt19937_64 rng(seq);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);

    const std::vector<double> levels = generator.expanded();
    for (std::size_t k = 0; k < n; ++k) weight[order[k]] = levels[k];
  }

  EigenPair eig = principal_positive_eigenvalue(laplacian, weight, options.eigen);
  SeedOutcome out{{eig.lambda1}, eig, weight, false, false, 0};

  // One level: the class has a single element.
  if (generator.steps() == 1) {
    out.stabilized = true;
    return out;
  }

  std::unordered_set<std::uint64_t> seen{weight_hash(weight.values())};
  auto accept = [&](ScalarField next, EigenPair next_eig, int it) {
    if (next_eig.lambda1 > eig.lambda1 * (1.0 + options.descent_slack))
      throw Error("descent violated: lambda1 rose from " +
                  std::to_string(eig.lambda1) + " to " +
                  std::to_string(next_eig.lambda1));
    weight = std::move(next);
    eig = std::move(next_eig);
    out.history.push_back(eig.lambda1);
    out.iterations = it;
    return seen.insert(weight_hash(weight.values())).second;
  };

  int it = 0;
  while (it < options.max_iterations) {
    ++it;
    ScalarField next = rearrangement_step(generator, eig.u);
    if (next == weight) {
      // Fixed point.  Try the exchange moves before giving up.
      auto moved = exchange_move(laplacian, generator, weight, eig, options);
      if (!moved) {
        out.stabilized = true;
        break;
      }
      if (!accept(std::move(moved->first), std::move(moved->second), it)) {
        out.cycled = true;
        break;
      }
      continue;
    }

    const double before = weighted_mass(weight, eig.u);
    const double after = weighted_mass(next, eig.u);
    if (after < before - 1e-12 * std::abs(before))
      throw Error("rearrangement step decreased \\int m u^2");

    EigenPair next_eig =
        principal_positive_eigenvalue(laplacian, next, options.eigen, &eig.u);
    if (!accept(std::move(next), std::move(next_eig), it)) {
      out.cycled = true;
      break;
    }
  }
  out.final = std::move(eig);
  out.weight = std::move(weight);
  return out;
}

}  // namespace

ScalarField rearrangement_step(const StepProfile& profile, const ScalarField& u) {
  if (profile.cells() != u.size())
    throw DomainMismatch("profile and field have different cell counts");
  for (double v : u.values())
    if (!(v > 0.0))
      throw std::invalid_argument("rearrangement step needs u > 0 everywhere");
  const std::vector<std::size_t> order = decreasing_order(u.values());
  std::vector<double> m(u.size());
  std::size_t start = 0;
  for (std::size_t k = 0; k < profile.steps(); ++k) {
    for (std::size_t r = start; r < profile.ends()[k]; ++r)
      m[order[r]] = profile.values()[k];
    start = profile.ends()[k];
  }
  return ScalarField(u.domain_ptr(), std::move(m));
}

bool comonotone(const ScalarField& weight, const ScalarField& u) {
  require_same_domain(weight, u);
  const std::vector<std::size_t> order = decreasing_order(u.values());
  for (std::size_t k = 1; k < order.size(); ++k)
    if (weight[order[k]] > weight[order[k - 1]]) return false;
  return true;
}

OptimizeReport optimize_profile(const DirichletLaplacian& laplacian,
                                const StepProfile& generator,
                                const OptimizeOptions& options) {
  if (generator.cells() != laplacian.domain().size())
    throw DomainMismatch("generator profile does not cover the domain");
  if (!(generator.values().front() > 0.0))
    throw WeightNotPositiveAnywhere("generator profile has no positive level");
  if (options.seeds < 1) throw std::invalid_argument("need at least one seed");

  const int seeds = options.seeds;
  std::vector<std::optional<SeedOutcome>> outcomes(static_cast<std::size_t>(seeds));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(seeds));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int s = next++; s < seeds; s = next++) {
      try {
        outcomes[s] = run_seed(laplacian, generator, s, options);
      } catch (...) {
        errors[s] = std::current_exception();
      }
    }
  };

  unsigned threads = options.threads ? options.threads
                                     : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(seeds));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  int best = 0;
  for (int s = 1; s < seeds; ++s)
    if (outcomes[s]->final.lambda1 < outcomes[best]->final.lambda1) best = s;

  std::vector<double> seed_lambdas;
  for (const auto& o : outcomes) seed_lambdas.push_back(o->final.lambda1);
  SeedOutcome& b = *outcomes[best];
  return OptimizeReport{std::move(b.history), std::move(b.final), std::move(b.weight),
                        b.stabilized,         seeds,              b.iterations,
                        best,                 b.cycled,           std::move(seed_lambdas)};
}

std::size_t single_level_cells(const GridDomain& domain, SingleClass cls) {
  const double e = (cls.m2 * domain.measure() + cls.m3) / (cls.m1 + cls.m2);
  const double cells = std::round(e / domain.cell_area());
  return static_cast<std::size_t>(
      std::clamp(cells, 0.0, static_cast<double>(domain.size())));
}

StepProfile single_generator(const GridDomain& domain, SingleClass cls) {
  const std::size_t top = single_level_cells(domain, cls);
  return StepProfile::from_levels({{cls.m1, top}, {-cls.m2, domain.size() - top}},
                                  domain.cell_area());
}

OptimizeReport optimize_single(const DirichletLaplacian& laplacian, SingleClass cls,
                               const OptimizeOptions& options) {
  const GridDomain& domain = laplacian.domain();
  if (!(cls.m1 > 0.0)) throw Infeasible("single class needs m1 > 0");
  ResourceClass(cls.m2, cls.m1, cls.m3, domain.measure());  // validates
  if (single_level_cells(domain, cls) == 0)
    throw Infeasible("level set {m = m1} rounds to zero cells on this grid");
  return optimize_profile(laplacian, single_generator(domain, cls), options);
}

TwoLevelPlan plan_two_resource(const GridDomain& domain, const ResourceClass& c1,
                               const ResourceClass& c2) {
  const double omega = domain.measure();
  for (const ResourceClass* c : {&c1, &c2})
    if (std::abs(c->domain_measure - omega) > 1e-12 * omega)
      throw DomainMismatch("resource class built for a different domain measure");
  if (!(c1.q + c2.q > 0.0)) throw Infeasible("two-resource class needs q1 + q2 > 0");

  TwoLevelPlan plan{};
  plan.e1 = c1.level_measure();
  plan.e2 = c2.level_measure();
  plan.gamma = std::min(plan.e1, plan.e2);
  plan.delta = std::max(plan.e1, plan.e2);
  plan.top = c1.q + c2.q;
  plan.bottom = -(c1.p + c2.p);
  const bool equal = std::abs(plan.e1 - plan.e2) <= 1e-12 * omega;
  if (equal)
    plan.mid = 0.0;
  else if (plan.e1 > plan.e2)
    plan.mid = c1.q - c2.p;
  else
    plan.mid = c2.q - c1.p;

  const double a = domain.cell_area();
  const auto cells = [&](double measure) {
    return static_cast<std::size_t>(std::clamp(
        std::round(measure / a), 0.0, static_cast<double>(domain.size())));
  };
  plan.top_cells = cells(plan.gamma);
  plan.upper_cells = equal ? plan.top_cells : cells(plan.delta);
  if (plan.top_cells == 0 && !(plan.mid > 0.0 && plan.upper_cells > 0))
    throw Infeasible("combined weight is never positive on this grid");
  return plan;
}

StepProfile two_resource_generator(const GridDomain& domain, const TwoLevelPlan& plan) {
  return StepProfile::from_levels(
      {{plan.top, plan.top_cells},
       {plan.mid, plan.upper_cells - plan.top_cells},
       {plan.bottom, domain.size() - plan.upper_cells}},
      domain.cell_area());
}

ScalarField BangBangWeight::field() const {
  std::vector<double> v(domain->size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const int k = domain->grid_position(i);
    v[i] = e[k] ? top : (g[k] ? mid : bottom);
  }
  return ScalarField(domain, std::move(v));
}

TwoResourceResult optimize_two(const DirichletLaplacian& laplacian,
                               const ResourceClass& c1, const ResourceClass& c2,
                               const OptimizeOptions& options) {
  const GridDomain& domain = laplacian.domain();
  const TwoLevelPlan plan = plan_two_resource(domain, c1, c2);
  OptimizeReport report =
      optimize_profile(laplacian, two_resource_generator(domain, plan), options);

  BangBangWeight w{laplacian.domain_ptr(),
                   CellMask(domain.mask().size(), 0),
                   CellMask(domain.mask().size(), 0),
                   plan.top,
                   plan.mid,
                   plan.bottom,
                   {0.0, 0.0}};
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const int k = domain.grid_position(i);
    const double v = report.weight[i];
    if (v == plan.top) w.e[k] = w.g[k] = 1;
    else if (v == plan.mid && plan.upper_cells > plan.top_cells) w.g[k] = 1;
  }
  const auto [f1, f2] = decompose(w, c1, c2);
  w.realized_integrals = {f1.integral(), f2.integral()};
  return TwoResourceResult{std::move(report), std::move(w)};
}

std::pair<ScalarField, ScalarField> decompose(const BangBangWeight& w,
                                              const ResourceClass& c1,
                                              const ResourceClass& c2) {
  const GridDomain& domain = *w.domain;
  const TwoLevelPlan plan = plan_two_resource(domain, c1, c2);
  if (w.top != plan.top || w.bottom != plan.bottom)
    throw DomainMismatch("weight levels do not match the resource classes");

  const bool first_is_larger = plan.e1 > plan.e2;
  std::size_t between = 0;
  std::vector<double> f1(domain.size()), f2(domain.size());
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const int k = domain.grid_position(i);
    if (w.e[k] && !w.g[k]) throw DomainMismatch("E is not contained in G");
    if (w.e[k]) {
      f1[i] = c1.q;
      f2[i] = c2.q;
    } else if (w.g[k]) {
      ++between;
      f1[i] = first_is_larger ? c1.q : -c1.p;
      f2[i] = first_is_larger ? -c2.p : c2.q;
    } else {
      f1[i] = -c1.p;
      f2[i] = -c2.p;
    }
  }
  if (between > 0 && (plan.upper_cells == plan.top_cells || w.mid != plan.mid))
    throw DomainMismatch("weight has a middle level the classes do not allow");
  return {ScalarField(w.domain, std::move(f1)), ScalarField(w.domain, std::move(f2))};
}

ClassComparison compare_classes(const DirichletLaplacian& laplacian,
                                const ResourceClass& c1, const ResourceClass& c2,
                                SingleClass single, const OptimizeOptions& options) {
  TwoResourceResult two = optimize_two(laplacian, c1, c2, options);
  OptimizeReport one = optimize_single(laplacian, single, options);
  const double a = two.report.final.lambda1;
  const double b = one.final.lambda1;
  return ClassComparison{a, b, std::move(two), std::move(one)};
}

ClassComparison compare_remark(const DirichletLaplacian& laplacian,
                               const OptimizeOptions& options) {
  const double omega = laplacian.domain().measure();
  const ResourceClass food(0.0, 1.0, 2.0 * omega / 3.0, omega);
  const ResourceClass predators(1.0, 0.0, -omega / 2.0, omega);
  return compare_classes(laplacian, food, predators, SingleClass{1.0, 1.0, omega / 6.0},
                         options);
}

}  // namespace wopt
