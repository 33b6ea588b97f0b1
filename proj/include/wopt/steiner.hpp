#pragma once

#include <vector>

#include "wopt/grid.hpp"
#include "wopt/sparse.hpp"

namespace wopt {

// One grid row of a Steiner-symmetric domain: its in-domain cells are the
// single column interval [first, last], centred on the axis.
struct AxisSection {
  int row;
  int first;
  int last;
  SymmetryAxis axis;

  int length() const { return last - first + 1; }
};

// Sections of every non-empty row.  Throws std::invalid_argument when the
// domain has no vertical axis or a row is not a single centred interval.
std::vector<AxisSection> axis_sections(const GridDomain& domain);

// Where the cells of a row go when they cannot be centred exactly.  The
// library always uses left_first; right_first exists only to show that the
// set and function symmetrisations must agree on it.
enum class ParityRule { left_first, right_first };

// Per row, the k mask cells become the k cells nearest the axis; with a
// parity mismatch the extra cell goes to the lower column index.
CellMask symmetrize_set(const GridDomain& domain, const CellMask& mask,
                        ParityRule rule = ParityRule::left_first);

// Per row, values sorted descending and laid out from the axis outward in
// the same order symmetrize_set fills cells, so {f# > t} = {f > t}# for all t.
ScalarField symmetrize_function(const ScalarField& f,
                                ParityRule rule = ParityRule::left_first);

// \int |f - f#| / max(\int |f|, eps).
double symmetry_defect(const ScalarField& f);
// Defect with respect to the horizontal axis, via transposition.
double row_symmetry_defect(const ScalarField& f);

struct SteinerCheck {
  double energy;            // u^T A u
  double energy_sym;        // u#^T A u#
  double weighted_mass;     // \int m u^2
  double weighted_mass_sym; // \int m# (u#)^2
  double transform_error;   // max |psi(u#) - psi(u)#|, psi(t) = 2t + 1
  bool ps_ok;               // energy_sym <= (1 + ps_slack) energy
  bool hl_ok;
  bool transform_ok;
};

inline constexpr double kPolyaSzegoSlack = 0.05;

// Diagnostics for the symmetrisation inequalities.  Requires u >= 0.
SteinerCheck check_ps_hl(const ScalarField& u, const ScalarField& m,
                         const CsrMatrix& a);

}  // namespace wopt
