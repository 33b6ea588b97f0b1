#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "wopt/grid.hpp"

namespace wopt {

// Decreasing rearrangement f* of a field on a discrete measure space: a
// right-continuous step function on (0, |Omega|].  Step k takes values()[k] on
// (ends()[k-1]*a, ends()[k]*a] where a is the cell area; values strictly
// decrease and the last end is the total cell count.  Ends are kept as integer
// cell counts so that sums and comparisons of profiles on one grid are exact.
class StepProfile {
 public:
  StepProfile(std::vector<double> values, std::vector<std::size_t> ends,
              double cell_area);

  // Builds a profile from (value, cell count) levels listed in any order;
  // empty levels are dropped and equal values merged.
  static StepProfile from_levels(std::vector<std::pair<double, std::size_t>> levels,
                                 double cell_area);

  const std::vector<double>& values() const { return values_; }
  const std::vector<std::size_t>& ends() const { return ends_; }
  double cell_area() const { return cell_area_; }
  std::size_t steps() const { return values_.size(); }
  std::size_t cells() const { return ends_.back(); }
  double total_measure() const;
  std::vector<double> breakpoints() const;

  // Value taken by the k-th cell in decreasing order (k = 0 is the largest).
  double value_at_rank(std::size_t k) const;
  // All cell values in decreasing order.
  std::vector<double> expanded() const;

  // \int_0^t f*(s) ds for t in [0, |Omega|].
  double cumulative(double t) const;
  double integral() const { return cumulative(total_measure()); }

  friend bool operator==(const StepProfile&, const StepProfile&) = default;

 private:
  std::vector<double> values_;
  std::vector<std::size_t> ends_;
  double cell_area_;
};

// Pointwise sum of two profiles on the same cell area and cell count.
StepProfile operator+(const StepProfile& a, const StepProfile& b);

// Constraint set {-p <= f <= q, \int f = l} on a domain of measure |Omega|.
// Its extreme points are q chi_E - p chi_{Omega \ E} with |E| = level_measure().
struct ResourceClass {
  ResourceClass(double p, double q, double l, double domain_measure);

  double p;
  double q;
  double l;
  double domain_measure;

  // e = (p |Omega| + l) / (p + q), strictly inside (0, |Omega|).
  double level_measure() const;
};

StepProfile decreasing_rearrangement(const ScalarField& f);

// Cells sorted by decreasing value, ties by ascending cell index.
std::vector<std::size_t> decreasing_order(std::span<const double> values);

// g ~ f: identical decreasing rearrangements.  Domains may differ but must
// have equal measure.
bool equimeasurable(const ScalarField& f, const ScalarField& g);

// g < f in the sense of majorisation: \int_0^t g* <= \int_0^t f* for all t
// and equal totals.  Checked at the union of both profiles' breakpoints,
// which is exhaustive because the cumulative integrals are piecewise linear.
bool precedes(const ScalarField& g, const ScalarField& f);
bool precedes(const StepProfile& g, const StepProfile& f);

// Membership in the weak* closure of the class generated by the class's
// bang-bang extreme point, tested through the explicit bounds-and-integral
// description.  The integral is compared at 1e-12 relative.
bool in_closure(const ScalarField& f, const ResourceClass& cls);

struct HardyLittlewood {
  double actual;  // \int f g dx
  double bound;   // \int_0^{|Omega|} f* g* ds
};

HardyLittlewood hl_inner(const ScalarField& f, const ScalarField& g);

// Rearrangement g~ of g that attains the Hardy-Littlewood bound against f:
// g's values in decreasing order, placed along f's decreasing cell order.
ScalarField hl_pairing(const ScalarField& f, const ScalarField& g);

// Rearranges every field along one shared cell order (that of the first
// field), so all outputs are pairwise comonotone.  Output i ~ input i and the
// decreasing rearrangement of the sum is the sum of the rearrangements.
std::vector<ScalarField> pair_family(std::span<const ScalarField> fields);

// alpha f.  The closure of the class of alpha f is alpha times the closure of
// the class of f.
ScalarField scale_class_generator(const ScalarField& f, double alpha);

}  // namespace wopt
