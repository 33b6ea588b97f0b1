#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace wopt {

// A symmetry line of the grid, stored as twice its index coordinate: an
// even value 2c passes through the centre of column (or row) c, an odd value
// 2c+1 runs between c and c+1.  Mirroring is then exact integer arithmetic.
struct SymmetryAxis {
  int twice_index = 0;

  int mirror(int index) const { return twice_index - index; }
  bool through_cell() const { return twice_index % 2 == 0; }

  friend bool operator==(SymmetryAxis, SymmetryAxis) = default;
};

// Full-grid cell mask, row-major over width x height.  Used for subsets of a
// domain (superlevel sets, the optimal sets E and G, ...).
using CellMask = std::vector<std::uint8_t>;

// Bounded open set discretised by uniform square cells of side h.  Cells are
// stored row-major; in-domain cells are numbered 0..size()-1 in that order and
// every field on the domain is indexed by that numbering.  Neighbours that are
// off-mask or off-grid are homogeneous Dirichlet nodes.
//
// `axis` is the vertical line of Steiner symmetry (reflection acts on the
// column index); `row_axis` is the horizontal one.  Both are optional and,
// when present, the mask is reflection-invariant across them cell-exactly.
class GridDomain {
 public:
  GridDomain(int width, int height, double h, CellMask mask,
             std::optional<SymmetryAxis> axis = std::nullopt,
             std::optional<SymmetryAxis> row_axis = std::nullopt);

  int width() const { return width_; }
  int height() const { return height_; }
  double spacing() const { return h_; }
  double cell_area() const { return h_ * h_; }

  // Number of in-domain cells.
  std::size_t size() const { return cells_.size(); }
  double measure() const { return static_cast<double>(size()) * cell_area(); }

  bool inside(int column, int row) const;

  static constexpr std::ptrdiff_t npos = -1;
  // In-domain index of a grid cell, or npos.
  std::ptrdiff_t index(int column, int row) const;

  int column(std::size_t i) const { return cells_[i] % width_; }
  int row(std::size_t i) const { return cells_[i] / width_; }
  // Row-major grid position of in-domain cell i.
  int grid_position(std::size_t i) const { return cells_[i]; }

  const CellMask& mask() const { return mask_; }
  const std::optional<SymmetryAxis>& axis() const { return axis_; }
  const std::optional<SymmetryAxis>& row_axis() const { return row_axis_; }

  bool same_shape(const GridDomain& other) const;

 private:
  int width_;
  int height_;
  double h_;
  CellMask mask_;
  std::vector<int> cells_;
  std::vector<std::ptrdiff_t> lookup_;
  std::optional<SymmetryAxis> axis_;
  std::optional<SymmetryAxis> row_axis_;
};

using DomainPtr = std::shared_ptr<const GridDomain>;

// Values of a bounded function at the cell centres of a domain.
class ScalarField {
 public:
  ScalarField(DomainPtr domain, std::vector<double> values);
  static ScalarField constant(DomainPtr domain, double value);

  const GridDomain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double max() const;
  double min() const;
  // Cell sum times h^2.
  double integral() const;

  friend bool operator==(const ScalarField& a, const ScalarField& b);

 private:
  DomainPtr domain_;
  std::vector<double> values_;
};

bool same_domain(const ScalarField& a, const ScalarField& b);
void require_same_domain(const ScalarField& a, const ScalarField& b);

// Cellwise sum; requires a common domain.
ScalarField operator+(const ScalarField& a, const ScalarField& b);

DomainPtr make_rectangle(int width_cells, int height_cells, double h);

struct SemiAxes {
  double a = 0.0;  // horizontal
  double b = 0.0;  // vertical
};

// Cells whose centres lie strictly inside the ellipse centred on the grid.
DomainPtr make_ellipse(int nx, int ny, double h, SemiAxes semi_axes);

// Domain from an explicit full-grid mask.  Symmetry axes are attached only
// when requested; they are validated, never guessed.
DomainPtr make_masked(int width, int height, double h, CellMask mask,
                      std::optional<SymmetryAxis> axis = std::nullopt,
                      std::optional<SymmetryAxis> row_axis = std::nullopt);

// Axis through the centre of a grid of the given extent.
SymmetryAxis centre_axis(int extent);
bool is_reflection_symmetric(int width, int height, const CellMask& mask,
                             SymmetryAxis axis);

// |subset| = (cell count) * h^2.  Throws DomainMismatch when a subset cell
// lies outside the domain.
double measure(const GridDomain& domain, const CellMask& subset);
std::size_t cell_count(const CellMask& mask);

// Full-grid mask of {f > threshold}.
CellMask superlevel_mask(const ScalarField& f, double threshold);
// Indicator of a subset as a field (1 on the subset, 0 elsewhere).
ScalarField indicator(DomainPtr domain, const CellMask& subset);

// Grid symmetries.  Transposition exchanges the two axes; the mirror reflects
// column indices about the grid centre.
DomainPtr transpose(const GridDomain& domain);
ScalarField transpose(const ScalarField& f, DomainPtr transposed);
DomainPtr mirror_columns(const GridDomain& domain);
ScalarField mirror_columns(const ScalarField& f, DomainPtr mirrored);
// Reflection of f across the domain's vertical axis (same domain).
ScalarField reflect_across_axis(const ScalarField& f);

}  // namespace wopt
