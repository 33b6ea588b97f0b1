#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "wopt/grid.hpp"

namespace wopt {

// Field CSV: first line "<nx>,<ny>,<h>", then one value per grid cell in
// row-major order, out-of-domain cells written as "nan".  Values use the
// shortest representation that reads back to the same double.
std::string format_field_csv(const ScalarField& f);
void write_field_csv(const std::filesystem::path& path, const ScalarField& f);

// Reads a field CSV.  Without a domain, one is rebuilt from the non-nan cells
// (no symmetry axes).  With a domain, the grid and mask must match it.
ScalarField parse_field_csv(std::istream& in, DomainPtr domain = nullptr);
ScalarField read_field_csv(const std::filesystem::path& path, DomainPtr domain = nullptr);

struct PgmImage {
  int width = 0;
  int height = 0;
  int maxval = 255;
  std::vector<int> pixels;  // row-major, first row first
};

// P2 (ASCII) or P5 (binary) greymap.
PgmImage read_pgm(const std::filesystem::path& path);
// P2 heatmap: values mapped linearly onto 0..255 (min -> 0, max -> 255),
// out-of-domain cells 0.
std::string format_heatmap_pgm(const ScalarField& f);
void write_heatmap_pgm(const std::filesystem::path& path, const ScalarField& f);

// {"shape": "rectangle" | "ellipse" | "mask_file", "nx", "ny", "h",
//  "semi_axes": [a, b], "mask_path", "axis": "none" | "centre"}.
// Mask files count nonzero pixels as in-domain; relative mask paths resolve
// against base_dir.  Throws std::invalid_argument on schema errors.
DomainPtr domain_from_json(const nlohmann::json& spec,
                           const std::filesystem::path& base_dir = {});

}  // namespace wopt
