#include "wopt/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "wopt/error.hpp"
#include "wopt/sum.hpp"

namespace wopt {

namespace {

constexpr double kRelTol = 1e-12;

bool same_measure(double a, double b) {
  return std::abs(a - b) <= kRelTol * std::max(std::abs(a), std::abs(b));
}

std::vector<double> sorted_descending(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

// \int |f*| ds, used to scale tolerances.
double absolute_mass(const StepProfile& p) {
  CompensatedSum s;
  std::size_t start = 0;
  for (std::size_t k = 0; k < p.steps(); ++k) {
    s += std::abs(p.values()[k]) * static_cast<double>(p.ends()[k] - start);
    start = p.ends()[k];
  }
  return s.value() * p.cell_area();
}

}  // namespace

StepProfile::StepProfile(std::vector<double> values,
                         std::vector<std::size_t> ends, double cell_area)
    : values_(std::move(values)), ends_(std::move(ends)), cell_area_(cell_area) {
  if (values_.empty() || values_.size() != ends_.size())
    throw std::invalid_argument("profile needs one end per value");
  if (!(cell_area_ > 0.0))
    throw std::invalid_argument("profile cell area must be positive");
  std::size_t prev = 0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (ends_[k] <= prev)
      throw std::invalid_argument("profile ends must strictly increase");
    if (k > 0 && !(values_[k] < values_[k - 1]))
      throw std::invalid_argument("profile values must strictly decrease");
    prev = ends_[k];
  }
}

StepProfile StepProfile::from_levels(
    std::vector<std::pair<double, std::size_t>> levels, double cell_area) {
  std::stable_sort(levels.begin(), levels.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<double> values;
  std::vector<std::size_t> ends;
  std::size_t total = 0;
  for (const auto& [value, count] : levels) {
    if (count == 0) continue;
    total += count;
    if (!values.empty() && values.back() == value) {
      ends.back() = total;
    } else {
      values.push_back(value);
      ends.push_back(total);
    }
  }
  return StepProfile(std::move(values), std::move(ends), cell_area);
}

double StepProfile::total_measure() const {
  return static_cast<double>(cells()) * cell_area_;
}

std::vector<double> StepProfile::breakpoints() const {
  std::vector<double> out(ends_.size());
  for (std::size_t k = 0; k < ends_.size(); ++k)
    out[k] = static_cast<double>(ends_[k]) * cell_area_;
  return out;
}

double StepProfile::value_at_rank(std::size_t k) const {
  if (k >= cells()) throw std::out_of_range("rank beyond profile");
  const auto it = std::upper_bound(ends_.begin(), ends_.end(), k);
  return values_[static_cast<std::size_t>(it - ends_.begin())];
}

std::vector<double> StepProfile::expanded() const {
  std::vector<double> out;
  out.reserve(cells());
  std::size_t start = 0;
  for (std::size_t k = 0; k < steps(); ++k) {
    out.insert(out.end(), ends_[k] - start, values_[k]);
    start = ends_[k];
  }
  return out;
}

double StepProfile::cumulative(double t) const {
  CompensatedSum s;
  double left = 0.0;
  for (std::size_t k = 0; k < steps(); ++k) {
    const double right = static_cast<double>(ends_[k]) * cell_area_;
    if (t >= right) {
      s += values_[k] * (right - left);
    } else {
      if (t > left) s += values_[k] * (t - left);
      break;
    }
    left = right;
  }
  return s.value();
}

StepProfile operator+(const StepProfile& a, const StepProfile& b) {
  if (a.cell_area() != b.cell_area() || a.cells() != b.cells())
    throw DomainMismatch("profiles on different grids");
  std::vector<std::pair<double, std::size_t>> levels;
  std::size_t ia = 0, ib = 0, start = 0;
  while (start < a.cells()) {
    const std::size_t end = std::min(a.ends()[ia], b.ends()[ib]);
    levels.emplace_back(a.values()[ia] + b.values()[ib], end - start);
    start = end;
    if (a.ends()[ia] == end) ++ia;
    if (ib < b.steps() && b.ends()[ib] == end) ++ib;
  }
  return StepProfile::from_levels(std::move(levels), a.cell_area());
}

ResourceClass::ResourceClass(double p_, double q_, double l_, double measure_)
    : p(p_), q(q_), l(l_), domain_measure(measure_) {
  if (!(domain_measure > 0.0))
    throw Infeasible("resource class needs a positive domain measure");
  if (!(-p * domain_measure < l && l < q * domain_measure))
    throw Infeasible("resource class requires -p|Omega| < l < q|Omega|");
}

double ResourceClass::level_measure() const {
  return (p * domain_measure + l) / (p + q);
}

std::vector<std::size_t> decreasing_order(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return values[i] > values[j];
  });
  return order;
}

StepProfile decreasing_rearrangement(const ScalarField& f) {
  const std::vector<double> sorted = sorted_descending(f.values());
  std::vector<double> values;
  std::vector<std::size_t> ends;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (!values.empty() && values.back() == sorted[k]) {
      ends.back() = k + 1;
    } else {
      values.push_back(sorted[k]);
      ends.push_back(k + 1);
    }
  }
  return StepProfile(std::move(values), std::move(ends), f.domain().cell_area());
}

bool equimeasurable(const ScalarField& f, const ScalarField& g) {
  if (!same_measure(f.domain().measure(), g.domain().measure()))
    throw DomainMismatch("equimeasurability needs domains of equal measure");
  const StepProfile pf = decreasing_rearrangement(f);
  const StepProfile pg = decreasing_rearrangement(g);
  return pf.values() == pg.values() && pf.breakpoints() == pg.breakpoints();
}

bool precedes(const StepProfile& g, const StepProfile& f) {
  if (!same_measure(g.total_measure(), f.total_measure()))
    throw DomainMismatch("majorisation needs domains of equal measure");
  const double tol = kRelTol * std::max(absolute_mass(f), absolute_mass(g));

  std::vector<double> ts = f.breakpoints();
  const std::vector<double> tg = g.breakpoints();
  ts.insert(ts.end(), tg.begin(), tg.end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  for (double t : ts)
    if (g.cumulative(t) > f.cumulative(t) + tol) return false;
  return std::abs(g.integral() - f.integral()) <= tol;
}

bool precedes(const ScalarField& g, const ScalarField& f) {
  return precedes(decreasing_rearrangement(g), decreasing_rearrangement(f));
}

bool in_closure(const ScalarField& f, const ResourceClass& cls) {
  if (!same_measure(f.domain().measure(), cls.domain_measure))
    throw DomainMismatch("field domain measure differs from the class's");
  CompensatedSum total, mass;
  for (double v : f.values()) {
    if (v < -cls.p || v > cls.q) return false;
    total += v;
    mass += std::abs(v);
  }
  const double a = f.domain().cell_area();
  const double scale = std::max(std::abs(cls.l), mass.value() * a);
  return std::abs(total.value() * a - cls.l) <= kRelTol * scale;
}

HardyLittlewood hl_inner(const ScalarField& f, const ScalarField& g) {
  require_same_domain(f, g);
  const double a = f.domain().cell_area();
  CompensatedSum actual;
  for (std::size_t i = 0; i < f.size(); ++i) actual += f[i] * g[i];
  const std::vector<double> fs = sorted_descending(f.values());
  const std::vector<double> gs = sorted_descending(g.values());
  CompensatedSum bound;
  for (std::size_t k = 0; k < fs.size(); ++k) bound += fs[k] * gs[k];
  return {actual.value() * a, bound.value() * a};
}

ScalarField hl_pairing(const ScalarField& f, const ScalarField& g) {
  require_same_domain(f, g);
  const std::vector<std::size_t> order = decreasing_order(f.values());
  const std::vector<double> gs = sorted_descending(g.values());
  std::vector<double> out(g.size());
  for (std::size_t k = 0; k < order.size(); ++k) out[order[k]] = gs[k];
  return ScalarField(g.domain_ptr(), std::move(out));
}

std::vector<ScalarField> pair_family(std::span<const ScalarField> fields) {
  if (fields.empty()) throw std::invalid_argument("pair_family needs a field");
  for (const ScalarField& f : fields) require_same_domain(fields.front(), f);
  const std::vector<std::size_t> order = decreasing_order(fields.front().values());
  std::vector<ScalarField> out;
  out.reserve(fields.size());
  for (const ScalarField& f : fields) {
    const std::vector<double> fs = sorted_descending(f.values());
    std::vector<double> v(f.size());
    for (std::size_t k = 0; k < order.size(); ++k) v[order[k]] = fs[k];
    out.emplace_back(f.domain_ptr(), std::move(v));
  }
  return out;
}

ScalarField scale_class_generator(const ScalarField& f, double alpha) {
  std::vector<double> v(f.values().begin(), f.values().end());
  for (double& x : v) x *= alpha;
  return ScalarField(f.domain_ptr(), std::move(v));
}

}  // namespace wopt
