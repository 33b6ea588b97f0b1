#include "wopt/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wopt/error.hpp"
#include "wopt/sum.hpp"

namespace wopt {

GridDomain::GridDomain(int width, int height, double h, CellMask mask,
                       std::optional<SymmetryAxis> axis,
                       std::optional<SymmetryAxis> row_axis)
    : width_(width),
      height_(height),
      h_(h),
      mask_(std::move(mask)),
      axis_(axis),
      row_axis_(row_axis) {
  if (width_ < 1 || height_ < 1)
    throw std::invalid_argument("grid dimensions must be positive");
  if (!(h_ > 0.0) || !std::isfinite(h_))
    throw std::invalid_argument("grid spacing must be positive");
  if (mask_.size() != static_cast<std::size_t>(width_) * height_)
    throw std::invalid_argument("mask size does not match grid dimensions");

  lookup_.assign(mask_.size(), npos);
  for (int k = 0; k < static_cast<int>(mask_.size()); ++k) {
    if (mask_[k]) {
      mask_[k] = 1;
      lookup_[k] = static_cast<std::ptrdiff_t>(cells_.size());
      cells_.push_back(k);
    }
  }
  if (cells_.empty())
    throw std::invalid_argument("domain has no cells");

  if (axis_ && !is_reflection_symmetric(width_, height_, mask_, *axis_))
    throw std::invalid_argument("mask is not symmetric about the vertical axis");
  if (row_axis_) {
    // Reflect rows by checking the transposed mask.
    CellMask t(mask_.size());
    for (int r = 0; r < height_; ++r)
      for (int c = 0; c < width_; ++c) t[c * height_ + r] = mask_[r * width_ + c];
    if (!is_reflection_symmetric(height_, width_, t, *row_axis_))
      throw std::invalid_argument(
          "mask is not symmetric about the horizontal axis");
  }
}

bool GridDomain::inside(int column, int row) const {
  if (column < 0 || row < 0 || column >= width_ || row >= height_) return false;
  return mask_[row * width_ + column] != 0;
}

std::ptrdiff_t GridDomain::index(int column, int row) const {
  if (column < 0 || row < 0 || column >= width_ || row >= height_) return npos;
  return lookup_[row * width_ + column];
}

bool GridDomain::same_shape(const GridDomain& other) const {
  return width_ == other.width_ && height_ == other.height_ &&
         h_ == other.h_ && mask_ == other.mask_;
}

ScalarField::ScalarField(DomainPtr domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (!domain_) throw std::invalid_argument("field needs a domain");
  if (values_.size() != domain_->size())
    throw std::invalid_argument("field size " + std::to_string(values_.size()) +
                                " does not match domain size " +
                                std::to_string(domain_->size()));
  for (double v : values_)
    if (!std::isfinite(v))
      throw std::invalid_argument("field values must be finite");
}

ScalarField ScalarField::constant(DomainPtr domain, double value) {
  const std::size_t n = domain->size();
  return ScalarField(std::move(domain), std::vector<double>(n, value));
}

double ScalarField::max() const {
  return *std::max_element(values_.begin(), values_.end());
}

double ScalarField::min() const {
  return *std::min_element(values_.begin(), values_.end());
}

double ScalarField::integral() const {
  CompensatedSum s;
  for (double v : values_) s += v;
  return s.value() * domain_->cell_area();
}

bool operator==(const ScalarField& a, const ScalarField& b) {
  return same_domain(a, b) && a.values_ == b.values_;
}

bool same_domain(const ScalarField& a, const ScalarField& b) {
  return a.domain_ptr() == b.domain_ptr() ||
         a.domain().same_shape(b.domain());
}

void require_same_domain(const ScalarField& a, const ScalarField& b) {
  if (!same_domain(a, b))
    throw DomainMismatch("fields live on different domains");
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  require_same_domain(a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  return ScalarField(a.domain_ptr(), std::move(out));
}

SymmetryAxis centre_axis(int extent) { return SymmetryAxis{extent - 1}; }

bool is_reflection_symmetric(int width, int height, const CellMask& mask,
                             SymmetryAxis axis) {
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (!mask[r * width + c]) continue;
      const int m = axis.mirror(c);
      if (m < 0 || m >= width || !mask[r * width + m]) return false;
    }
  }
  return true;
}

DomainPtr make_rectangle(int width_cells, int height_cells, double h) {
  if (width_cells < 3 || height_cells < 3)
    throw std::invalid_argument("rectangle needs at least 3x3 cells");
  if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  CellMask mask(static_cast<std::size_t>(width_cells) * height_cells, 1);
  return std::make_shared<const GridDomain>(width_cells, height_cells, h,
                                            std::move(mask),
                                            centre_axis(width_cells),
                                            centre_axis(height_cells));
}

DomainPtr make_ellipse(int nx, int ny, double h, SemiAxes semi_axes) {
  if (nx < 3 || ny < 3)
    throw std::invalid_argument("ellipse grid needs at least 3x3 cells");
  if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  if (!(semi_axes.a > 0.0) || !(semi_axes.b > 0.0))
    throw std::invalid_argument("ellipse semi-axes must be positive");
  // The outermost ring of cell centres must not be strictly inside.
  if (semi_axes.a > 0.5 * (nx - 1) * h || semi_axes.b > 0.5 * (ny - 1) * h)
    throw std::invalid_argument("ellipse exceeds the grid");

  CellMask mask(static_cast<std::size_t>(nx) * ny, 0);
  const double half_h = 0.5 * h;
  for (int r = 0; r < ny; ++r) {
    // Offsets from the centre as odd multiples of h/2 so that mirrored cells
    // see bit-identical magnitudes.
    const double dy = static_cast<double>(2 * r + 1 - ny) * half_h / semi_axes.b;
    for (int c = 0; c < nx; ++c) {
      const double dx =
          static_cast<double>(2 * c + 1 - nx) * half_h / semi_axes.a;
      if (dx * dx + dy * dy < 1.0) mask[r * nx + c] = 1;
    }
  }
  if (std::none_of(mask.begin(), mask.end(), [](auto v) { return v != 0; }))
    throw std::invalid_argument("ellipse contains no cell centre");
  return std::make_shared<const GridDomain>(nx, ny, h, std::move(mask),
                                            centre_axis(nx), centre_axis(ny));
}

DomainPtr make_masked(int width, int height, double h, CellMask mask,
                      std::optional<SymmetryAxis> axis,
                      std::optional<SymmetryAxis> row_axis) {
  return std::make_shared<const GridDomain>(width, height, h, std::move(mask),
                                            axis, row_axis);
}

std::size_t cell_count(const CellMask& mask) {
  return static_cast<std::size_t>(
      std::count_if(mask.begin(), mask.end(), [](auto v) { return v != 0; }));
}

double measure(const GridDomain& domain, const CellMask& subset) {
  if (subset.size() != domain.mask().size())
    throw DomainMismatch("subset mask has the wrong size");
  std::size_t n = 0;
  for (std::size_t k = 0; k < subset.size(); ++k) {
    if (!subset[k]) continue;
    if (!domain.mask()[k])
      throw DomainMismatch("subset cell " + std::to_string(k) +
                           " lies outside the domain");
    ++n;
  }
  return static_cast<double>(n) * domain.cell_area();
}

CellMask superlevel_mask(const ScalarField& f, double threshold) {
  const GridDomain& d = f.domain();
  CellMask out(d.mask().size(), 0);
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] > threshold) out[d.grid_position(i)] = 1;
  return out;
}

ScalarField indicator(DomainPtr domain, const CellMask& subset) {
  measure(*domain, subset);  // validates
  std::vector<double> v(domain->size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = subset[domain->grid_position(i)] ? 1.0 : 0.0;
  return ScalarField(std::move(domain), std::move(v));
}

DomainPtr transpose(const GridDomain& domain) {
  const int w = domain.width(), h = domain.height();
  CellMask t(domain.mask().size());
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) t[c * h + r] = domain.mask()[r * w + c];
  return std::make_shared<const GridDomain>(h, w, domain.spacing(), std::move(t),
                                            domain.row_axis(), domain.axis());
}

ScalarField transpose(const ScalarField& f, DomainPtr transposed) {
  const GridDomain& d = f.domain();
  if (transposed->width() != d.height() || transposed->height() != d.width() ||
      transposed->size() != d.size())
    throw DomainMismatch("target is not the transposed domain");
  std::vector<double> v(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto j = transposed->index(d.row(i), d.column(i));
    if (j == GridDomain::npos)
      throw DomainMismatch("target is not the transposed domain");
    v[static_cast<std::size_t>(j)] = f[i];
  }
  return ScalarField(std::move(transposed), std::move(v));
}

DomainPtr mirror_columns(const GridDomain& domain) {
  const int w = domain.width(), h = domain.height();
  CellMask m(domain.mask().size());
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) m[r * w + (w - 1 - c)] = domain.mask()[r * w + c];
  std::optional<SymmetryAxis> axis;
  if (domain.axis()) axis = SymmetryAxis{2 * (w - 1) - domain.axis()->twice_index};
  return std::make_shared<const GridDomain>(w, h, domain.spacing(), std::move(m),
                                            axis, domain.row_axis());
}

ScalarField mirror_columns(const ScalarField& f, DomainPtr mirrored) {
  const GridDomain& d = f.domain();
  std::vector<double> v(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto j = mirrored->index(d.width() - 1 - d.column(i), d.row(i));
    if (j == GridDomain::npos || mirrored->size() != d.size())
      throw DomainMismatch("target is not the mirrored domain");
    v[static_cast<std::size_t>(j)] = f[i];
  }
  return ScalarField(std::move(mirrored), std::move(v));
}

ScalarField reflect_across_axis(const ScalarField& f) {
  const GridDomain& d = f.domain();
  if (!d.axis()) throw std::invalid_argument("domain has no symmetry axis");
  std::vector<double> v(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto j = d.index(d.axis()->mirror(d.column(i)), d.row(i));
    v[static_cast<std::size_t>(j)] = f[i];
  }
  return ScalarField(f.domain_ptr(), std::move(v));
}

}  // namespace wopt
