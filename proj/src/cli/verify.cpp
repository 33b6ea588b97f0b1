#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "wopt/cli.hpp"
#include "wopt/eig.hpp"
#include "wopt/oracle.hpp"
#include "wopt/steiner.hpp"

namespace wopt::cli {

namespace {

using nlohmann::json;

struct Suite {
  explicit Suite(std::string n) : name(std::move(n)) {}
  std::string name;
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::string detail;
  bool skipped = false;

  void check(bool ok, const std::string& what) {
    ++checks;
    if (!ok && failures++ == 0) detail = what;
  }
  // Runs body, turning an exception into a failed check.
  template <class F>
  void guarded(const std::string& what, F&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      check(false, what + ": " + e.what());
    }
  }
  json to_json() const {
    return {{"name", name},         {"passed", failures == 0}, {"checks", checks},
            {"failures", failures}, {"skipped", skipped},      {"detail", detail}};
  }
};

bool close_to(double a, double b, double rel, double scale) {
  return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), scale});
}

std::string describe(const char* what, int trial) {
  return std::string(what) + " (trial " + std::to_string(trial) + ")";
}

ScalarField cellwise(const ScalarField& f, double (*fn)(double)) {
  std::vector<double> v(f.values().begin(), f.values().end());
  for (double& x : v) x = fn(x);
  return ScalarField(f.domain_ptr(), std::move(v));
}

double magnitude(const ScalarField& f, const ScalarField& g) {
  return std::max(std::abs(f.max()), std::abs(f.min())) *
         std::max(std::abs(g.max()), std::abs(g.min())) * f.domain().measure();
}

bool has_sections(const GridDomain& d) {
  try {
    axis_sections(d);
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

Suite hardy_littlewood(const RunConfig& c, std::mt19937_64& rng) {
  Suite s("hardy_littlewood");
  const double tol = c.tolerances.integral;
  std::uniform_int_distribution<std::size_t> cells(1, 30);
  for (int t = 0; t < c.verify_trials; ++t) {
    const DomainPtr d = t % 2 == 0 ? c.domain : oracle::random_polyomino(rng, cells(rng));
    const int levels = t % 3 == 0 ? 4 : 0;
    const ScalarField f = oracle::random_field(rng, d, -2.0, 2.0, levels);
    const ScalarField g = oracle::random_field(rng, d, -2.0, 2.0, levels);
    const double scale = magnitude(f, g);
    const HardyLittlewood hl = hl_inner(f, g);
    s.check(hl.actual <= hl.bound + tol * scale, describe("actual <= bound", t));
    const ScalarField paired = hl_pairing(f, g);
    s.check(equimeasurable(paired, g), describe("pairing is a rearrangement", t));
    s.check(close_to(hl_inner(f, paired).actual, hl.bound, tol, scale),
            describe("pairing attains the bound", t));
  }
  // Exhaustive check of the bound and of the subset supremum.
  std::uniform_int_distribution<std::size_t> small(2, 8);
  for (int t = 0; t < std::max(5, c.verify_trials / 10); ++t) {
    const DomainPtr d = oracle::random_polyomino(rng, small(rng));
    const ScalarField f = oracle::random_field(rng, d, -2.0, 2.0, t % 2 ? 3 : 0);
    const ScalarField g = oracle::random_field(rng, d, -2.0, 2.0, t % 2 ? 3 : 0);
    const double scale = magnitude(f, g);
    s.check(close_to(hl_inner(f, g).bound, oracle::max_permuted_pairing(f, g), tol, scale),
            describe("bound equals the best permutation", t));
    const StepProfile fs = decreasing_rearrangement(f);
    for (std::size_t k = 0; k <= d->size(); ++k)
      s.check(close_to(oracle::max_subset_integral(f, k),
                       fs.cumulative(static_cast<double>(k) * d->cell_area()), tol, scale),
              describe("subset supremum equals the cumulative profile", t));
  }
  return s;
}

Suite majorisation(const RunConfig& c, std::mt19937_64& rng) {
  Suite s("majorisation");
  std::uniform_int_distribution<std::size_t> cells(1, 30);
  for (int t = 0; t < c.verify_trials; ++t) {
    const DomainPtr d = t % 2 == 0 ? c.domain : oracle::random_polyomino(rng, cells(rng));
    const int levels = t % 3 == 0 ? 3 : 0;
    const ScalarField f = oracle::random_field(rng, d, -1.0, 1.0, levels);
    const ScalarField h = oracle::random_field(rng, d, -1.0, 1.0, levels);
    const ScalarField g = hl_pairing(h, f);  // a rearrangement of f
    s.check(precedes(f, f), describe("reflexive", t));
    s.check(precedes(ScalarField::constant(d, f.integral() / d->measure()), f),
            describe("mean constant precedes f", t));
    s.check(equimeasurable(f, g) && precedes(f, g) && precedes(g, f),
            describe("rearrangements precede each other", t));
    s.check(equimeasurable(f, h) == (precedes(f, h) && precedes(h, f)),
            describe("mutual precedence iff equimeasurable", t));
    s.check(equimeasurable(cellwise(f, [](double x) { return x * x; }),
                           cellwise(g, [](double x) { return x * x; })) &&
                equimeasurable(cellwise(f, [](double x) { return std::max(x, 0.0); }),
                               cellwise(g, [](double x) { return std::max(x, 0.0); })),
            describe("monotone transforms keep rearrangements", t));

    const std::vector<ScalarField> in{f, h};
    const std::vector<ScalarField> out = pair_family(in);
    s.check(equimeasurable(out[0], f) && equimeasurable(out[1], h),
            describe("pair_family keeps each class", t));
    s.check(decreasing_rearrangement(out[0] + out[1]) ==
                decreasing_rearrangement(f) + decreasing_rearrangement(h),
            describe("profile of the paired sum is the sum of profiles", t));
  }
  return s;
}

struct ConfiguredRun {
  std::optional<OptimizeReport> report;
  std::optional<StepProfile> generator;
  std::optional<BangBangWeight> two;
  std::string error;
};

ConfiguredRun run_configured(const RunConfig& c, const DirichletLaplacian& lap) {
  ConfiguredRun r;
  try {
    if (c.classes) {
      const auto& [c1, c2] = *c.classes;
      r.generator = two_resource_generator(lap.domain(), plan_two_resource(lap.domain(), c1, c2));
      TwoResourceResult res = optimize_two(lap, c1, c2, c.optimize);
      r.report = std::move(res.report);
      r.two = std::move(res.weight);
    } else {
      const SingleClass k = c.single.value_or(SingleClass{1.0, 1.0, 0.0});
      r.generator = single_generator(lap.domain(), k);
      r.report = optimize_single(lap, k, c.optimize);
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

void check_run(Suite& s, const OptimizeReport& rep, const StepProfile& generator,
               double slack, const std::string& label) {
  bool monotone = true;
  for (std::size_t k = 1; k < rep.lambda_history.size(); ++k)
    monotone = monotone && rep.lambda_history[k] <=
                               rep.lambda_history[k - 1] * (1.0 + slack);
  s.check(monotone, label + ": lambda history increases");
  s.check(comonotone(rep.weight, rep.final.u), label + ": final weight not comonotone with u");
  s.check(decreasing_rearrangement(rep.weight) == generator,
          label + ": final weight left the class");
}

Suite descent(const RunConfig& c, const ConfiguredRun& run, std::mt19937_64& rng) {
  Suite s("descent");
  if (!run.error.empty()) s.check(false, "configured run: " + run.error);
  else check_run(s, *run.report, *run.generator, c.optimize.descent_slack, "configured run");

  OptimizeOptions opts = c.optimize;
  opts.seeds = 4;
  std::uniform_int_distribution<std::size_t> cells(4, 40);
  for (int t = 0; t < std::max(3, c.verify_trials / 20); ++t) {
    s.guarded(describe("random run", t), [&] {
      const DomainPtr d = oracle::random_polyomino(rng, cells(rng));
      const DirichletLaplacian lap(d);
      std::uniform_int_distribution<std::size_t> ne(1, d->size());
      const std::size_t top = ne(rng);
      const StepProfile gen =
          StepProfile::from_levels({{1.0, top}, {-1.0, d->size() - top}}, d->cell_area());
      opts.rng_seed = rng();
      check_run(s, optimize_profile(lap, gen, opts), gen, opts.descent_slack,
                describe("random run", t));
    });
  }
  return s;
}

Suite optimum_symmetry(const RunConfig& c, const ConfiguredRun& run) {
  Suite s("symmetry");
  const GridDomain& d = *c.domain;
  if (!d.axis() || !has_sections(d)) {
    s.skipped = true;
    s.detail = "domain has no usable vertical axis";
    return s;
  }
  if (!run.error.empty()) {
    s.check(false, "configured run: " + run.error);
    return s;
  }
  const double tol = c.tolerances.symmetry_defect;
  std::vector<std::pair<std::string, ScalarField>> fields{{"weight", run.report->weight}};
  if (run.two) {
    fields.emplace_back("E", indicator(c.domain, run.two->e));
    fields.emplace_back("G", indicator(c.domain, run.two->g));
  }
  for (const auto& [label, f] : fields) {
    const double v = symmetry_defect(f);
    s.check(v <= tol, label + ": vertical defect " + std::to_string(v));
    if (d.row_axis() && has_sections(*transpose(d))) {
      const double hz = row_symmetry_defect(f);
      s.check(hz <= tol, label + ": horizontal defect " + std::to_string(hz));
    }
  }
  return s;
}

std::vector<DomainPtr> axis_domains(const RunConfig& c, std::mt19937_64& rng, int count) {
  std::vector<DomainPtr> out;
  if (c.domain->axis() && has_sections(*c.domain)) out.push_back(c.domain);
  while (static_cast<int>(out.size()) < count)
    out.push_back(oracle::random_axis_domain(rng, 12, 8));
  return out;
}

Suite steiner(const RunConfig& c, std::mt19937_64& rng) {
  Suite s("steiner");
  const double tol = c.tolerances.integral;
  const auto domains = axis_domains(c, rng, c.verify_trials);
  for (int t = 0; t < static_cast<int>(domains.size()); ++t) {
    const DomainPtr& d = domains[t];
    const ScalarField f = oracle::random_field(rng, d, -1.0, 1.0, t % 2 ? 4 : 0);
    const ScalarField fs = symmetrize_function(f);

    CellMask mask(d->mask().size(), 0);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i = 0; i < d->size(); ++i)
      mask[d->grid_position(i)] = coin(rng) ? 1 : 0;
    const CellMask ms = symmetrize_set(*d, mask);
    s.check(cell_count(ms) == cell_count(mask), describe("set measure preserved", t));
    s.check(symmetrize_set(*d, ms) == ms, describe("set symmetrisation idempotent", t));
    s.check(equimeasurable(f, fs), describe("function equimeasurable", t));
    s.check(symmetrize_function(fs) == fs, describe("function symmetrisation idempotent", t));
    s.check(cellwise(fs, [](double x) { return 2.0 * x + 1.0; }) ==
                symmetrize_function(cellwise(f, [](double x) { return 2.0 * x + 1.0; })),
            describe("increasing transform commutes", t));

    const ScalarField u = oracle::random_field(rng, d, 0.0, 1.0);
    const ScalarField m = oracle::random_field(rng, d, 0.0, 1.0, t % 2 ? 3 : 0);
    const SteinerCheck chk = check_ps_hl(u, m, assemble_stiffness(*d));
    s.check(chk.weighted_mass <= chk.weighted_mass_sym +
                                     tol * std::max(chk.weighted_mass_sym, 1e-300),
            describe("Hardy-Littlewood under symmetrisation", t));
    s.check(chk.transform_ok, describe("transform identity", t));
  }
  return s;
}

Suite superlevel(const RunConfig& c, std::mt19937_64& rng) {
  Suite s("superlevel_consistency");
  const ParityRule set_rule =
      c.inject_broken_tie_rule ? ParityRule::right_first : ParityRule::left_first;
  const auto domains = axis_domains(c, rng, c.verify_trials);
  for (int t = 0; t < static_cast<int>(domains.size()); ++t) {
    const DomainPtr& d = domains[t];
    const ScalarField f = oracle::random_field(rng, d, -1.0, 1.0, t % 2 ? 5 : 0);
    const ScalarField fs = symmetrize_function(f);
    std::set<double> thresholds(f.values().begin(), f.values().end());
    thresholds.insert(f.min() - 1.0);
    bool ok = true;
    for (double level : thresholds)
      ok = ok && superlevel_mask(fs, level) ==
                     symmetrize_set(*d, superlevel_mask(f, level), set_rule);
    s.check(ok, describe("{f# > t} = {f > t}#", t));
  }
  return s;
}

Suite tiny_oracle(const RunConfig& c, std::mt19937_64& rng) {
  Suite s("oracle");
  OptimizeOptions opts = c.optimize;
  opts.seeds = 20;
  for (int t = 0; t < std::max(4, c.verify_trials / 25); ++t) {
    s.guarded(describe("tiny domain", t), [&] {
      const DomainPtr d = oracle::random_polyomino(rng, 10);
      const DirichletLaplacian lap(d);

      ScalarField m = oracle::random_field(rng, d, -1.0, 1.0);
      m[0] = 1.0;
      s.check(close_to(principal_positive_eigenvalue(lap, m, c.optimize.eigen).lambda1,
                       oracle::dense_principal(m).lambda1, 1e-8, 0.0),
              describe("power iteration matches dense eigenvalue", t));

      std::uniform_int_distribution<std::size_t> ne(1, 9);
      const std::size_t a = ne(rng);
      const std::size_t b = std::uniform_int_distribution<std::size_t>(0, 10 - a)(rng);
      const std::vector<StepProfile> profiles{
          StepProfile::from_levels({{1.0, a}, {-1.0, 10 - a}}, d->cell_area()),
          StepProfile::from_levels({{2.0, a}, {0.5, b}, {-1.0, 10 - a - b}}, d->cell_area())};
      for (const StepProfile& p : profiles) {
        opts.rng_seed = rng();
        const double found = optimize_profile(lap, p, opts).final.lambda1;
        const double exact = oracle::minimize_by_enumeration(d, p).lambda1;
        s.check(close_to(found, exact, 1e-8, 0.0),
                describe("fixed point reaches the enumerated minimum", t));
      }
    });
  }
  return s;
}

}  // namespace

json verify_suites(const RunConfig& c) {
  std::mt19937_64 rng(c.optimize.rng_seed);
  const DirichletLaplacian lap(c.domain);
  const ConfiguredRun run = run_configured(c, lap);

  std::vector<Suite> suites;
  suites.push_back(hardy_littlewood(c, rng));
  suites.push_back(majorisation(c, rng));
  suites.push_back(descent(c, run, rng));
  suites.push_back(optimum_symmetry(c, run));
  suites.push_back(steiner(c, rng));
  suites.push_back(superlevel(c, rng));
  suites.push_back(tiny_oracle(c, rng));

  json out = json::array();
  bool passed = true;
  for (const Suite& s : suites) {
    out.push_back(s.to_json());
    passed = passed && s.failures == 0;
  }
  json result = {{"passed", passed}, {"suites", out}};
  if (run.report) result["configured_lambda1"] = run.report->final.lambda1;
  return result;
}

}  // namespace wopt::cli
