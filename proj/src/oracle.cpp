#include "wopt/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "wopt/eig.hpp"
#include "wopt/error.hpp"

namespace wopt::oracle {

DenseEigen dense_principal(const ScalarField& m) {
  const GridDomain& d = m.domain();
  const auto n = static_cast<Eigen::Index>(d.size());
  const CsrMatrix sparse = assemble_stiffness(d);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t r = 0; r < d.size(); ++r)
    for (std::size_t k = sparse.row_ptr()[r]; k < sparse.row_ptr()[r + 1]; ++k)
      a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(sparse.col_index()[k])) =
          sparse.values()[k];

  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw Error("stiffness matrix is not SPD");
  const Eigen::MatrixXd l = llt.matrixL();
  Eigen::MatrixXd linv = l.triangularView<Eigen::Lower>().solve(
      Eigen::MatrixXd::Identity(n, n));
  Eigen::VectorXd mass(n);
  for (Eigen::Index i = 0; i < n; ++i) mass(i) = m[static_cast<std::size_t>(i)] * d.cell_area();
  const Eigen::MatrixXd c = linv * mass.asDiagonal() * linv.transpose();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (c + c.transpose()));
  if (es.info() != Eigen::Success) throw Error("dense eigensolver failed");
  const double mu = es.eigenvalues()(n - 1);
  if (!(mu > 0.0)) throw WeightNotPositiveAnywhere("no positive eigenvalue");

  // y = L^T u with |y| = 1 gives u^T A u = 1.
  Eigen::VectorXd u = l.transpose().triangularView<Eigen::Upper>().solve(
      Eigen::VectorXd(es.eigenvectors().col(n - 1)));
  if (u.sum() < 0.0) u = -u;
  return {1.0 / mu, std::vector<double>(u.data(), u.data() + n)};
}

Enumeration minimize_by_enumeration(DomainPtr domain, const StepProfile& profile) {
  if (profile.cells() != domain->size())
    throw DomainMismatch("profile and domain have different cell counts");
  std::vector<double> values = profile.expanded();
  std::sort(values.begin(), values.end());

  Enumeration best{std::numeric_limits<double>::infinity(),
                   ScalarField(domain, values), 0};
  do {
    ++best.arrangements;
    ScalarField m(domain, values);
    if (m.max() <= 0.0) continue;
    const double lambda = dense_principal(m).lambda1;
    if (lambda < best.lambda1) {
      best.lambda1 = lambda;
      best.weight = m;
    }
  } while (std::next_permutation(values.begin(), values.end()));
  return best;
}

double max_permuted_pairing(const ScalarField& f, const ScalarField& g) {
  require_same_domain(f, g);
  std::vector<std::size_t> pi(g.size());
  std::iota(pi.begin(), pi.end(), 0);
  double best = -std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[pi[i]];
    best = std::max(best, s);
  } while (std::next_permutation(pi.begin(), pi.end()));
  return best * f.domain().cell_area();
}

double max_subset_integral(const ScalarField& f, std::size_t k) {
  const std::size_t n = f.size();
  if (k > n) throw std::invalid_argument("subset larger than the domain");
  std::vector<char> pick(n, 0);
  std::fill(pick.end() - static_cast<std::ptrdiff_t>(k), pick.end(), 1);
  double best = -std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (pick[i]) s += f[i];
    best = std::max(best, s);
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best * f.domain().cell_area();
}

DomainPtr random_polyomino(std::mt19937_64& rng, std::size_t cells, double h) {
  if (cells == 0) throw std::invalid_argument("polyomino needs at least one cell");
  const int box = static_cast<int>(2 * cells + 1);
  CellMask grid(static_cast<std::size_t>(box) * box, 0);
  const int mid = static_cast<int>(cells);
  grid[static_cast<std::size_t>(mid) * box + mid] = 1;
  std::vector<int> frontier;
  auto push_neighbours = [&](int k) {
    const int r = k / box, c = k % box;
    const int nb[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
    for (const auto& q : nb)
      if (q[0] >= 0 && q[0] < box && q[1] >= 0 && q[1] < box && !grid[q[0] * box + q[1]])
        frontier.push_back(q[0] * box + q[1]);
  };
  push_neighbours(mid * box + mid);
  for (std::size_t added = 1; added < cells;) {
    std::uniform_int_distribution<std::size_t> pick(0, frontier.size() - 1);
    const std::size_t j = pick(rng);
    const int k = frontier[j];
    frontier[j] = frontier.back();
    frontier.pop_back();
    if (grid[k]) continue;
    grid[k] = 1;
    ++added;
    push_neighbours(k);
  }
  int r0 = box, r1 = -1, c0 = box, c1 = -1;
  for (int k = 0; k < box * box; ++k)
    if (grid[k]) {
      r0 = std::min(r0, k / box), r1 = std::max(r1, k / box);
      c0 = std::min(c0, k % box), c1 = std::max(c1, k % box);
    }
  const int w = c1 - c0 + 1, ht = r1 - r0 + 1;
  CellMask mask(static_cast<std::size_t>(w) * ht);
  for (int r = 0; r < ht; ++r)
    for (int c = 0; c < w; ++c) mask[r * w + c] = grid[(r + r0) * box + (c + c0)];
  return make_masked(w, ht, h, std::move(mask));
}

DomainPtr random_axis_domain(std::mt19937_64& rng, int max_width, int max_height) {
  std::uniform_int_distribution<int> wd(1, max_width), hd(1, max_height);
  const int w = wd(rng), ht = hd(rng);
  CellMask mask(static_cast<std::size_t>(w) * ht, 0);
  std::uniform_int_distribution<int> margin(0, (w - 1) / 2);
  bool any = false;
  for (int r = 0; r < ht; ++r) {
    if (std::uniform_int_distribution<int>(0, 5)(rng) == 0) continue;  // empty row
    const int first = margin(rng);
    for (int c = first; c <= w - 1 - first; ++c) mask[r * w + c] = 1;
    any = true;
  }
  if (!any)
    for (int c = 0; c < w; ++c) mask[c] = 1;
  return make_masked(w, ht, 1.0 / std::max(w, ht), std::move(mask), centre_axis(w));
}

ScalarField random_field(std::mt19937_64& rng, DomainPtr domain, double lo, double hi,
                         int levels) {
  std::vector<double> v(domain->size());
  if (levels > 0) {
    std::uniform_int_distribution<int> pick(0, levels - 1);
    const double step = levels > 1 ? (hi - lo) / (levels - 1) : 0.0;
    for (double& x : v) x = lo + step * pick(rng);
  } else {
    std::uniform_real_distribution<double> dist(lo, hi);
    for (double& x : v) x = dist(rng);
  }
  return ScalarField(std::move(domain), std::move(v));
}

}  // namespace wopt::oracle
