#include "wopt/steiner.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "wopt/sum.hpp"

namespace wopt {

namespace {

int floor_half(int x) { return x >= 0 ? x / 2 : -((-x + 1) / 2); }
int ceil_half(int x) { return -floor_half(-x); }

// Columns of a section in fill order: the first k entries are the k cells
// nearest the axis, for every k.
std::vector<int> fill_order(const AxisSection& s, ParityRule rule) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(s.length()));
  const int t = s.axis.twice_index;
  int prev_start = 0;
  for (int k = 1; k <= s.length(); ++k) {
    const int start = rule == ParityRule::left_first ? floor_half(t - k + 1)
                                                     : ceil_half(t - k + 1);
    const int col = (k == 1 || start < prev_start) ? start : start + k - 1;
    if (col < s.first || col > s.last)
      throw std::logic_error("fill order left the row section");
    out.push_back(col);
    prev_start = start;
  }
  return out;
}

}  // namespace

std::vector<AxisSection> axis_sections(const GridDomain& domain) {
  if (!domain.axis()) throw std::invalid_argument("domain has no symmetry axis");
  const SymmetryAxis axis = *domain.axis();
  std::vector<AxisSection> out;
  for (int r = 0; r < domain.height(); ++r) {
    int first = -1, last = -1, count = 0;
    for (int c = 0; c < domain.width(); ++c) {
      if (!domain.inside(c, r)) continue;
      if (first < 0) first = c;
      last = c;
      ++count;
    }
    if (count == 0) continue;
    if (count != last - first + 1 || first + last != axis.twice_index)
      throw std::invalid_argument("row " + std::to_string(r) +
                                  " is not a single interval centred on the axis");
    out.push_back({r, first, last, axis});
  }
  return out;
}

CellMask symmetrize_set(const GridDomain& domain, const CellMask& mask,
                        ParityRule rule) {
  measure(domain, mask);  // mask must lie in the domain
  CellMask out(mask.size(), 0);
  const int w = domain.width();
  for (const AxisSection& s : axis_sections(domain)) {
    int k = 0;
    for (int c = s.first; c <= s.last; ++c) k += mask[s.row * w + c] ? 1 : 0;
    const std::vector<int> order = fill_order(s, rule);
    for (int j = 0; j < k; ++j) out[s.row * w + order[j]] = 1;
  }
  return out;
}

ScalarField symmetrize_function(const ScalarField& f, ParityRule rule) {
  const GridDomain& domain = f.domain();
  std::vector<double> out(f.size());
  std::vector<double> row;
  for (const AxisSection& s : axis_sections(domain)) {
    row.clear();
    for (int c = s.first; c <= s.last; ++c)
      row.push_back(f[static_cast<std::size_t>(domain.index(c, s.row))]);
    std::sort(row.begin(), row.end(), std::greater<>());
    const std::vector<int> order = fill_order(s, rule);
    for (std::size_t j = 0; j < row.size(); ++j)
      out[static_cast<std::size_t>(domain.index(order[j], s.row))] = row[j];
  }
  return ScalarField(f.domain_ptr(), std::move(out));
}

double symmetry_defect(const ScalarField& f) {
  const ScalarField sym = symmetrize_function(f);
  CompensatedSum diff, mass;
  for (std::size_t i = 0; i < f.size(); ++i) {
    diff += std::abs(f[i] - sym[i]);
    mass += std::abs(f[i]);
  }
  return diff.value() /
         std::max(mass.value(), std::numeric_limits<double>::min());
}

double row_symmetry_defect(const ScalarField& f) {
  if (!f.domain().row_axis())
    throw std::invalid_argument("domain has no horizontal symmetry axis");
  const DomainPtr t = transpose(f.domain());
  return symmetry_defect(transpose(f, t));
}

SteinerCheck check_ps_hl(const ScalarField& u, const ScalarField& m,
                         const CsrMatrix& a) {
  require_same_domain(u, m);
  for (double v : u.values())
    if (v < 0.0) throw std::invalid_argument("check_ps_hl needs u >= 0");

  const ScalarField us = symmetrize_function(u);
  const ScalarField ms = symmetrize_function(m);
  SteinerCheck c{};
  c.energy = a.bilinear(u.values(), u.values());
  c.energy_sym = a.bilinear(us.values(), us.values());

  CompensatedSum wm, wms;
  for (std::size_t i = 0; i < u.size(); ++i) {
    wm += m[i] * u[i] * u[i];
    wms += ms[i] * us[i] * us[i];
  }
  const double area = u.domain().cell_area();
  c.weighted_mass = wm.value() * area;
  c.weighted_mass_sym = wms.value() * area;

  std::vector<double> psi(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) psi[i] = 2.0 * u[i] + 1.0;
  const ScalarField psi_sym = symmetrize_function(ScalarField(u.domain_ptr(), psi));
  for (std::size_t i = 0; i < u.size(); ++i)
    c.transform_error =
        std::max(c.transform_error, std::abs(2.0 * us[i] + 1.0 - psi_sym[i]));

  c.ps_ok = c.energy_sym <= (1.0 + kPolyaSzegoSlack) * c.energy;
  c.hl_ok = c.weighted_mass <=
            c.weighted_mass_sym +
                1e-12 * (std::abs(c.weighted_mass) + std::abs(c.weighted_mass_sym));
  c.transform_ok = c.transform_error <= 1e-9;
  return c;
}

}  // namespace wopt
