#include <doctest.h>

#include <cmath>
#include <random>

#include "wopt/error.hpp"
#include "wopt/optimize.hpp"
#include "wopt/oracle.hpp"
#include "wopt/steiner.hpp"

using namespace wopt;

namespace {

DomainPtr square(int n) { return make_rectangle(n, n, 1.0 / n); }

std::size_t count(const CellMask& m) { return cell_count(m); }

void check_descent(const OptimizeReport& r, double slack = 1e-9) {
  REQUIRE(!r.lambda_history.empty());
  for (std::size_t k = 1; k < r.lambda_history.size(); ++k)
    CHECK(r.lambda_history[k] <= r.lambda_history[k - 1] * (1 + slack));
  CHECK(r.lambda_history.back() == r.final.lambda1);
}

// Food and predators: (0, 1, 2|Omega|/3) and (1, 0, -|Omega|/2).
std::pair<ResourceClass, ResourceClass> remark_classes(double omega) {
  return {ResourceClass(0.0, 1.0, 2.0 * omega / 3.0, omega),
          ResourceClass(1.0, 0.0, -omega / 2.0, omega)};
}

}  // namespace

TEST_CASE("rearrangement step on three cells") {
  const DomainPtr d = make_masked(3, 1, 1.0, {1, 1, 1});
  const StepProfile p = StepProfile::from_levels({{1.0, 2}, {-1.0, 1}}, 1.0);
  const ScalarField u(d, {0.2, 0.9, 0.5});
  CHECK(rearrangement_step(p, u) == ScalarField(d, {-1.0, 1.0, 1.0}));

  // Brute force over the three placements of the -1.
  double best = -1e300;
  std::size_t arg = 0;
  for (std::size_t j = 0; j < 3; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i) s += (i == j ? -1.0 : 1.0) * u[i] * u[i];
    if (s > best) best = s, arg = j;
  }
  CHECK(arg == 0);
}

TEST_CASE("rearrangement step fixed point and ties") {
  const DomainPtr d = make_masked(4, 1, 1.0, {1, 1, 1, 1});
  const StepProfile p = StepProfile::from_levels({{2.0, 1}, {0.5, 2}, {-1.0, 1}}, 1.0);
  const ScalarField m(d, {0.5, 2.0, -1.0, 0.5});
  const ScalarField u(d, {0.6, 0.9, 0.1, 0.3});
  REQUIRE(comonotone(m, u));
  CHECK(rearrangement_step(p, u) == m);
  // Constant u: values laid out in cell order.
  CHECK(rearrangement_step(p, ScalarField::constant(d, 1.0)) ==
        ScalarField(d, {2.0, 0.5, 0.5, -1.0}));
  CHECK_THROWS_AS(rearrangement_step(p, ScalarField(d, {1.0, 0.0, 1.0, 1.0})),
                  std::invalid_argument);
  CHECK_THROWS_AS(rearrangement_step(p, ScalarField(d, {1.0, -0.1, 1.0, 1.0})),
                  std::invalid_argument);
}

TEST_CASE("comonotone") {
  const DomainPtr d = make_masked(3, 1, 1.0, {1, 1, 1});
  CHECK(comonotone(ScalarField(d, {1, 1, -1}), ScalarField(d, {3, 2, 1})));
  CHECK_FALSE(comonotone(ScalarField(d, {-1, 1, 1}), ScalarField(d, {3, 2, 1})));
  // Ties in u follow the cell index.
  CHECK(comonotone(ScalarField(d, {1, -1, -1}), ScalarField(d, {1, 1, 1})));
  CHECK_FALSE(comonotone(ScalarField(d, {-1, 1, -1}), ScalarField(d, {1, 1, 1})));
}

TEST_CASE("level cell count for the single class") {
  const DomainPtr d = square(64);
  const SingleClass cls{1.0, 1.0, 1.0 / 6.0};
  CHECK(single_level_cells(*d, cls) == static_cast<std::size_t>(std::lround(7.0 * 4096 / 12)));
  const StepProfile p = single_generator(*d, cls);
  CHECK(p.values() == std::vector<double>{1.0, -1.0});
  CHECK(p.ends()[0] == 2389);
}

TEST_CASE("single class optimum on a square") {
  const DomainPtr d = square(32);
  const DirichletLaplacian lap(d);
  const SingleClass cls{1.0, 1.0, 1.0 / 6.0};
  const OptimizeReport r = optimize_single(lap, cls);
  check_descent(r);
  CHECK(r.stabilized);
  CHECK(r.restarts_used == 8);
  CHECK(r.seed_lambdas.size() == 8);
  for (double l : r.seed_lambdas) CHECK(r.final.lambda1 <= l);
  CHECK(decreasing_rearrangement(r.weight) == single_generator(*d, cls));
  CHECK(comonotone(r.weight, r.final.u));
  CHECK(count(superlevel_mask(r.weight, 0.0)) == single_level_cells(*d, cls));
  // The realised integral misses m3 by less than one cell of (m1 + m2).
  CHECK(std::abs(r.weight.integral() - cls.m3) <= 2.0 * d->cell_area());
  CHECK(symmetry_defect(r.weight) <= 0.02);
  CHECK(row_symmetry_defect(r.weight) <= 0.02);
}

TEST_CASE("class filling the domain needs no iterations") {
  const DomainPtr d = square(12);
  const DirichletLaplacian lap(d);
  const SingleClass cls{2.0, 1.0, 2.0 * (1 - 1e-6)};
  const OptimizeReport r = optimize_single(lap, cls);
  CHECK(r.iterations == 0);
  CHECK(r.weight == ScalarField::constant(d, 2.0));
  CHECK(r.final.lambda1 ==
        doctest::Approx(principal_positive_eigenvalue(d, ScalarField::constant(d, 1.0)).lambda1 / 2));
}

TEST_CASE("infeasible single classes") {
  const DirichletLaplacian lap(square(8));
  CHECK_THROWS_AS(optimize_single(lap, {1.0, 1.0, 1.0}), Infeasible);
  CHECK_THROWS_AS(optimize_single(lap, {1.0, 1.0, -1.0}), Infeasible);
  CHECK_THROWS_AS(optimize_single(lap, {0.0, 1.0, -0.5}), Infeasible);
  // Level set smaller than half a cell.
  CHECK_THROWS_AS(optimize_single(lap, {1.0, 1.0, -1.0 + 1.0 / 256}), Infeasible);
}

TEST_CASE("disk optimum is centred and symmetric in both axes") {
  const DomainPtr d = make_ellipse(33, 33, 1.0 / 33, {0.48, 0.48});
  const DirichletLaplacian lap(d);
  const OptimizeReport r = optimize_single(lap, {1.0, 1.0, 0.0});
  check_descent(r);
  CHECK(symmetry_defect(r.weight) <= 0.02);
  CHECK(row_symmetry_defect(r.weight) <= 0.02);
  CHECK(r.weight[static_cast<std::size_t>(d->index(16, 16))] == 1.0);
  CHECK(comonotone(r.weight, r.final.u));
}

TEST_CASE("two-resource plan for the food and predator classes") {
  const DomainPtr d = square(12);
  const auto [c1, c2] = remark_classes(d->measure());
  const TwoLevelPlan plan = plan_two_resource(*d, c1, c2);
  CHECK(plan.e1 == doctest::Approx(2.0 / 3));
  CHECK(plan.e2 == doctest::Approx(0.5));
  CHECK(plan.gamma == doctest::Approx(0.5));
  CHECK(plan.delta == doctest::Approx(2.0 / 3));
  CHECK(plan.top == 1.0);
  CHECK(plan.mid == 0.0);  // r = q1 - p2
  CHECK(plan.bottom == -1.0);
  CHECK(plan.top_cells == 72);
  CHECK(plan.upper_cells == 96);
  const StepProfile g = two_resource_generator(*d, plan);
  CHECK(g.values() == std::vector<double>{1.0, 0.0, -1.0});
  CHECK(g.ends() == std::vector<std::size_t>{72, 96, 144});
}

TEST_CASE("middle value follows the case table") {
  const DomainPtr d = square(10);
  const double w = d->measure();
  // e1 < e2: r = q2 - p1.
  const ResourceClass a(1.0, 3.0, -0.2 * w, w);   // e1 = 0.2
  const ResourceClass b(2.0, 1.0, 0.4 * w, w);    // e2 = 0.8
  const TwoLevelPlan p = plan_two_resource(*d, a, b);
  CHECK(p.e1 == doctest::Approx(0.2));
  CHECK(p.e2 == doctest::Approx(0.8));
  CHECK(p.mid == doctest::Approx(1.0 - 1.0));
  CHECK(p.top == 4.0);
  CHECK(p.bottom == -3.0);
  const TwoLevelPlan q = plan_two_resource(*d, b, a);
  CHECK(q.mid == doctest::Approx(1.0 - 1.0));
  const ResourceClass c(0.5, 2.0, 0.0, w);  // e = 0.2
  CHECK(plan_two_resource(*d, c, b).mid == doctest::Approx(1.0 - 0.5));
}

TEST_CASE("two-resource optimum has the three-level structure") {
  const DomainPtr d = square(24);
  const DirichletLaplacian lap(d);
  const auto [c1, c2] = remark_classes(d->measure());
  const TwoResourceResult res = optimize_two(lap, c1, c2);
  const BangBangWeight& w = res.weight;
  const TwoLevelPlan plan = plan_two_resource(*d, c1, c2);
  check_descent(res.report);

  for (std::size_t k = 0; k < w.e.size(); ++k)
    if (w.e[k]) CHECK(w.g[k]);
  CHECK(count(w.e) == plan.top_cells);
  CHECK(count(w.g) == plan.upper_cells);
  CHECK(std::abs(measure(*d, w.e) - plan.gamma * d->measure()) <= d->cell_area());
  CHECK(std::abs(measure(*d, w.g) - plan.delta * d->measure()) <= d->cell_area());
  CHECK(w.field() == res.report.weight);
  CHECK(decreasing_rearrangement(w.field()).values() == std::vector<double>{1.0, 0.0, -1.0});

  const auto [f1, f2] = decompose(w, c1, c2);
  CHECK(f1 + f2 == w.field());
  // e1 > e2: the food sits at q1 on all of G, the predators at -p2 off E.
  for (std::size_t i = 0; i < d->size(); ++i) {
    const int k = d->grid_position(i);
    CHECK(f1[i] == (w.g[k] ? 1.0 : 0.0));
    CHECK(f2[i] == (w.e[k] ? 0.0 : -1.0));
  }
  CHECK(in_closure(f1, ResourceClass(0.0, 1.0, f1.integral(), d->measure())));
  CHECK(std::abs(w.realized_integrals.first - c1.l) <= (c1.p + c1.q) * d->cell_area());
  CHECK(std::abs(w.realized_integrals.second - c2.l) <= (c2.p + c2.q) * d->cell_area());
  CHECK(symmetry_defect(w.field()) <= 0.02);
}

TEST_CASE("equal level measures give E = G") {
  const DomainPtr d = square(16);
  const DirichletLaplacian lap(d);
  const double w = d->measure();
  const ResourceClass c1(1.0, 2.0, 0.0, w);  // e = 1/3
  const ResourceClass c2(2.0, 1.0, -w, w);   // e = 1/3
  const TwoResourceResult res = optimize_two(lap, c1, c2);
  CHECK(res.weight.e == res.weight.g);
  CHECK(decreasing_rearrangement(res.weight.field()).values() == std::vector<double>{3.0, -3.0});
  const auto [f1, f2] = decompose(res.weight, c1, c2);
  for (std::size_t i = 0; i < d->size(); ++i) {
    const bool in_e = res.weight.e[d->grid_position(i)];
    CHECK(f1[i] == (in_e ? 2.0 : -1.0));
    CHECK(f2[i] == (in_e ? 1.0 : -2.0));
  }
}

TEST_CASE("symmetric classes force half the domain") {
  const DomainPtr d = square(16);
  const DirichletLaplacian lap(d);
  const ResourceClass c(1.0, 1.0, 0.0, d->measure());
  const TwoResourceResult res = optimize_two(lap, c, c);
  CHECK(count(res.weight.e) == d->size() / 2);
  CHECK(count(res.weight.g) == d->size() / 2);
}

TEST_CASE("decompose rejects mismatched classes") {
  const DomainPtr d = square(12);
  const DirichletLaplacian lap(d);
  const auto [c1, c2] = remark_classes(d->measure());
  const TwoResourceResult res = optimize_two(lap, c1, c2);
  const ResourceClass other(2.0, 1.0, 0.0, d->measure());
  CHECK_THROWS_AS(decompose(res.weight, other, c2), DomainMismatch);
  BangBangWeight broken = res.weight;
  for (std::size_t k = 0; k < broken.e.size(); ++k)
    if (broken.e[k]) {
      broken.g[k] = 0;
      break;
    }
  CHECK_THROWS_AS(decompose(broken, c1, c2), DomainMismatch);
}

TEST_CASE("single constraint beats two constraints at n = 16") {
  const DirichletLaplacian lap(square(16));
  const ClassComparison cmp = compare_remark(lap);
  CHECK(cmp.lambda_single < cmp.lambda_two_resource);
  CHECK(cmp.lambda_two_resource - cmp.lambda_single > 1e-7);
}

TEST_CASE("identical classes give identical optima") {
  const DomainPtr d = square(16);
  const DirichletLaplacian lap(d);
  const double w = d->measure();
  // Two halves of the class -1 <= f <= 1, \int f = |Omega|/6.
  const ResourceClass half(0.5, 0.5, w / 12.0, w);
  const ClassComparison cmp = compare_classes(lap, half, half, {1.0, 1.0, w / 6.0});
  CHECK(cmp.lambda_two_resource == doctest::Approx(cmp.lambda_single).epsilon(1e-8));
}

TEST_CASE("seed results do not depend on the thread count") {
  const DomainPtr d = make_ellipse(21, 17, 0.05, {0.5, 0.4});
  const DirichletLaplacian lap(d);
  OptimizeOptions one, four;
  one.threads = 1;
  four.threads = 4;
  const OptimizeReport a = optimize_single(lap, {1.0, 2.0, 0.1}, one);
  const OptimizeReport b = optimize_single(lap, {1.0, 2.0, 0.1}, four);
  CHECK(a.weight == b.weight);
  CHECK(a.seed_lambdas == b.seed_lambdas);
  CHECK(a.lambda_history == b.lambda_history);
}

TEST_CASE("matches exhaustive enumeration on small domains") {
  std::mt19937_64 rng(31);
  OptimizeOptions opt;
  opt.seeds = 20;
  int compared = 0;
  for (int t = 0; t < 25; ++t) {
    const DomainPtr d = oracle::random_polyomino(rng, 6 + t % 7);
    const std::size_t n = d->size();
    std::vector<std::pair<double, std::size_t>> levels;
    if (t % 2) {
      const std::size_t top = 1 + rng() % (n - 1);
      levels = {{1.0, top}, {-1.0, n - top}};
    } else {
      const std::size_t top = 1 + rng() % (n - 2);
      const std::size_t mid = 1 + rng() % (n - top - 1);
      levels = {{1.5, top}, {0.2, mid}, {-1.0, n - top - mid}};
    }
    const StepProfile g = StepProfile::from_levels(levels, d->cell_area());
    const oracle::Enumeration best = oracle::minimize_by_enumeration(d, g);
    const OptimizeReport r = optimize_profile(DirichletLaplacian(d), g, opt);
    CHECK(r.final.lambda1 == doctest::Approx(best.lambda1).epsilon(1e-8));
    check_descent(r);
    ++compared;
  }
  CHECK(compared == 25);
}
