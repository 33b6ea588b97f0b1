#include <doctest.h>

#include <cmath>
#include <random>

#include "wopt/eig.hpp"
#include "wopt/oracle.hpp"
#include "wopt/rearrange.hpp"
#include "wopt/steiner.hpp"

using namespace wopt;

namespace {

// Random subset of a domain as a full-grid mask.
CellMask random_subset(std::mt19937_64& rng, const GridDomain& d, double p) {
  std::bernoulli_distribution coin(p);
  CellMask m(d.mask().size(), 0);
  for (std::size_t i = 0; i < d.size(); ++i) m[d.grid_position(i)] = coin(rng) ? 1 : 0;
  return m;
}

ScalarField row_field(std::vector<double> v) {
  const int w = static_cast<int>(v.size());
  DomainPtr d = make_masked(w, 1, 1.0, CellMask(v.size(), 1), centre_axis(w));
  return ScalarField(std::move(d), std::move(v));
}

}  // namespace

TEST_CASE("symmetrize_set centres each row") {
  const DomainPtr d = make_rectangle(9, 3, 1.0);
  REQUIRE(d->axis()->twice_index == 8);
  CellMask m(27, 0);
  for (int c : {2, 5, 7}) m[9 + c] = 1;   // middle row
  for (int c = 0; c < 9; ++c) m[18 + c] = 1;  // full bottom row
  const CellMask s = symmetrize_set(*d, m);
  CellMask expected(27, 0);
  for (int c : {3, 4, 5}) expected[9 + c] = 1;
  for (int c = 0; c < 9; ++c) expected[18 + c] = 1;
  CHECK(s == expected);
}

TEST_CASE("parity slack goes to the left") {
  const DomainPtr odd = make_rectangle(5, 3, 1.0);
  CellMask m(15, 0);
  m[0] = m[4] = 1;  // two cells, axis through column 2
  CellMask left(15, 0);
  left[1] = left[2] = 1;
  CHECK(symmetrize_set(*odd, m) == left);
  CellMask right(15, 0);
  right[2] = right[3] = 1;
  CHECK(symmetrize_set(*odd, m, ParityRule::right_first) == right);

  const DomainPtr even = make_rectangle(4, 3, 1.0);
  CellMask one(12, 0);
  one[3] = 1;  // axis between columns 1 and 2
  CellMask at1(12, 0);
  at1[1] = 1;
  CHECK(symmetrize_set(*even, one) == at1);
}

TEST_CASE("symmetrize_function on one row") {
  CHECK(symmetrize_function(row_field({0, 2, 1})) == row_field({1, 2, 0}));
  CHECK(symmetrize_function(row_field({2, 3, 1})) == row_field({2, 3, 1}));
  const ScalarField even = symmetrize_function(row_field({4, 1, 3, 2}));
  CHECK(even == row_field({2, 4, 3, 1}));
}

TEST_CASE("indicator symmetrises like its set") {
  std::mt19937_64 rng(41);
  const DomainPtr d = make_ellipse(19, 15, 0.05, {0.45, 0.35});
  for (int t = 0; t < 20; ++t) {
    const CellMask e = random_subset(rng, *d, 0.4);
    CHECK(symmetrize_function(indicator(d, e)) == indicator(d, symmetrize_set(*d, e)));
  }
}

TEST_CASE("missing axis is an error") {
  const DomainPtr d = make_masked(3, 2, 1.0, {1, 1, 1, 1, 1, 1});
  CHECK_THROWS_AS(symmetrize_set(*d, CellMask(6, 0)), std::invalid_argument);
  CHECK_THROWS_AS(symmetrize_function(ScalarField::constant(d, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(symmetry_defect(ScalarField::constant(d, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(axis_sections(*d), std::invalid_argument);
}

TEST_CASE("axis sections of an ellipse") {
  const DomainPtr d = make_ellipse(21, 13, 0.05, {0.5, 0.3});
  const auto sections = axis_sections(*d);
  std::size_t cells = 0;
  for (const AxisSection& s : sections) {
    CHECK(s.first + s.last == 20);
    cells += static_cast<std::size_t>(s.length());
  }
  CHECK(cells == d->size());
}

TEST_CASE("symmetry defect") {
  const DomainPtr d = make_rectangle(8, 4, 0.25);
  CellMask left(32, 0), band(32, 0);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      left[r * 8 + c] = 1;
      band[r * 8 + c + 2] = 1;
    }
  CHECK(symmetry_defect(indicator(d, band)) == 0.0);
  // Half of the left cells are outside the band: defect 2 * 8 / 16.
  CHECK(symmetry_defect(indicator(d, left)) == doctest::Approx(1.0));
  CHECK(symmetry_defect(ScalarField::constant(d, 0.0)) == 0.0);

  // Rows with the axis's parity centre exactly, so a set and its mirror
  // have the same defect.
  std::mt19937_64 rng(42);
  const DomainPtr odd = make_rectangle(11, 7, 0.1);
  for (int t = 0; t < 30; ++t) {
    CellMask m(77, 0);
    for (int r = 0; r < 7; ++r) {
      std::vector<int> cols(11);
      for (int c = 0; c < 11; ++c) cols[c] = c;
      std::shuffle(cols.begin(), cols.end(), rng);
      const int k = 2 * static_cast<int>(rng() % 6) + 1;
      for (int j = 0; j < k; ++j) m[r * 11 + cols[j]] = 1;
    }
    const ScalarField f = indicator(odd, m);
    const DomainPtr mirrored = mirror_columns(*odd);
    CHECK(symmetry_defect(mirror_columns(f, mirrored)) ==
          doctest::Approx(symmetry_defect(f)).epsilon(1e-14));
  }
}

TEST_CASE("Steiner properties on random fields") {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 200; ++t) {
    const DomainPtr d = oracle::random_axis_domain(rng, 12, 9);
    const ScalarField f = oracle::random_field(rng, d, -1.0, 1.0, t % 2 ? 4 : 0);
    const ScalarField fs = symmetrize_function(f);
    CHECK(equimeasurable(f, fs));
    CHECK(symmetrize_function(fs) == fs);
    CHECK(symmetry_defect(fs) == 0.0);

    const CellMask e = random_subset(rng, *d, 0.5);
    const CellMask es = symmetrize_set(*d, e);
    CHECK(cell_count(es) == cell_count(e));
    CHECK(symmetrize_set(*d, es) == es);

    for (double v : f.values())
      CHECK(superlevel_mask(fs, v) == symmetrize_set(*d, superlevel_mask(f, v)));
    CHECK(superlevel_mask(fs, -2.0) == symmetrize_set(*d, superlevel_mask(f, -2.0)));
  }
}

TEST_CASE("mismatched parity rules break superlevel consistency") {
  const ScalarField f = row_field({0.1, 0.7, 0.3, 0.9});
  const ScalarField fs = symmetrize_function(f, ParityRule::right_first);
  const GridDomain& d = f.domain();
  bool all = true;
  for (double v : f.values())
    all = all && superlevel_mask(fs, v) == symmetrize_set(d, superlevel_mask(f, v));
  CHECK_FALSE(all);
}

TEST_CASE("Polya-Szego and Hardy-Littlewood checks") {
  const DomainPtr d = make_ellipse(25, 25, 0.04, {0.48, 0.48});
  const DirichletLaplacian lap(d);
  const EigenPair ep = principal_positive_eigenvalue(lap, ScalarField::constant(d, 1.0));
  const ScalarField us = symmetrize_function(ep.u);
  const SteinerCheck same = check_ps_hl(us, symmetrize_function(ScalarField::constant(d, 1.0)),
                                        lap.stiffness());
  CHECK(same.energy == same.energy_sym);
  CHECK(same.weighted_mass == same.weighted_mass_sym);
  CHECK(same.transform_error == 0.0);
  CHECK(same.ps_ok);
  CHECK(same.hl_ok);

  std::mt19937_64 rng(44);
  for (int t = 0; t < 50; ++t) {
    const ScalarField u = oracle::random_field(rng, d, 0.0, 1.0);
    const ScalarField m = oracle::random_field(rng, d, 0.0, 2.0, t % 2 ? 3 : 0);
    const SteinerCheck c = check_ps_hl(u, m, lap.stiffness());
    CHECK(c.hl_ok);
    CHECK(c.weighted_mass <= c.weighted_mass_sym * (1 + 1e-12));
    CHECK(c.transform_ok);
    CHECK(c.transform_error <= 1e-9);
    CHECK(c.ps_ok);
  }
  CHECK_THROWS_AS(check_ps_hl(ScalarField::constant(d, -1.0), ScalarField::constant(d, 1.0),
                              lap.stiffness()),
                  std::invalid_argument);
}

TEST_CASE("increasing transforms commute with symmetrisation") {
  std::mt19937_64 rng(45);
  for (int t = 0; t < 100; ++t) {
    const DomainPtr d = oracle::random_axis_domain(rng, 10, 10);
    const ScalarField u = oracle::random_field(rng, d, 0.0, 1.0, t % 3 ? 0 : 3);
    ScalarField psi_u = u;
    for (double& v : psi_u.values()) v = std::exp(v);
    ScalarField psi_us = symmetrize_function(u);
    for (double& v : psi_us.values()) v = std::exp(v);
    CHECK(symmetrize_function(psi_u) == psi_us);
  }
}

TEST_CASE("row defect uses the horizontal axis") {
  const DomainPtr d = make_rectangle(5, 6, 0.2);
  CellMask top(30, 0);
  for (int c = 0; c < 5; ++c) top[c] = top[5 + c] = top[10 + c] = 1;
  const ScalarField f = indicator(d, top);
  CHECK(symmetry_defect(f) == 0.0);
  CHECK(row_symmetry_defect(f) > 0.0);
  CHECK_THROWS_AS(row_symmetry_defect(ScalarField::constant(
                      make_masked(3, 1, 1.0, {1, 1, 1}, centre_axis(3)), 1.0)),
                  std::invalid_argument);
}
