#include "wopt/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "wopt/error.hpp"

namespace wopt {

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, int line) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\r' || last[-1] == '\t')) --last;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw std::invalid_argument("line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

std::ifstream open_input(const std::filesystem::path& path, std::ios::openmode mode = {}) {
  std::ifstream in(path, std::ios::in | mode);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  return in;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

std::string format_field_csv(const ScalarField& f) {
  const GridDomain& d = f.domain();
  std::string out = std::to_string(d.width()) + "," + std::to_string(d.height()) + "," +
                    shortest(d.spacing()) + "\n";
  for (int r = 0; r < d.height(); ++r) {
    for (int c = 0; c < d.width(); ++c) {
      const auto i = d.index(c, r);
      out += i == GridDomain::npos ? std::string("nan")
                                   : shortest(f[static_cast<std::size_t>(i)]);
      out += '\n';
    }
  }
  return out;
}

void write_field_csv(const std::filesystem::path& path, const ScalarField& f) {
  write_text(path, format_field_csv(f));
}

ScalarField parse_field_csv(std::istream& in, DomainPtr domain) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty field file");
  std::vector<std::string> head;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) head.push_back(tok);
  }
  if (head.size() != 3) throw std::invalid_argument("line 1: expected nx,ny,h");
  const double nx_d = parse_double(head[0], 1), ny_d = parse_double(head[1], 1);
  const double h = parse_double(head[2], 1);
  if (nx_d < 1 || ny_d < 1 || nx_d != std::floor(nx_d) || ny_d != std::floor(ny_d))
    throw std::invalid_argument("line 1: grid dimensions must be positive integers");
  const int nx = static_cast<int>(nx_d), ny = static_cast<int>(ny_d);

  const std::size_t total = static_cast<std::size_t>(nx) * ny;
  std::vector<double> grid(total);
  for (std::size_t k = 0; k < total; ++k) {
    if (!std::getline(in, line))
      throw std::invalid_argument("field file ends after " + std::to_string(k) +
                                  " of " + std::to_string(total) + " values");
    grid[k] = parse_double(line, static_cast<int>(k) + 2);
  }

  CellMask mask(total);
  for (std::size_t k = 0; k < total; ++k) mask[k] = std::isnan(grid[k]) ? 0 : 1;
  if (domain) {
    if (domain->width() != nx || domain->height() != ny || domain->spacing() != h ||
        domain->mask() != mask)
      throw DomainMismatch("field file does not match the domain");
  } else {
    domain = make_masked(nx, ny, h, mask);
  }
  std::vector<double> values;
  values.reserve(domain->size());
  for (std::size_t k = 0; k < total; ++k)
    if (mask[k]) values.push_back(grid[k]);
  return ScalarField(std::move(domain), std::move(values));
}

ScalarField read_field_csv(const std::filesystem::path& path, DomainPtr domain) {
  std::ifstream in = open_input(path);
  return parse_field_csv(in, std::move(domain));
}

PgmImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in = open_input(path, std::ios::binary);
  auto token = [&]() {
    std::string tok;
    char ch;
    while (in.get(ch)) {
      if (ch == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(ch))) {
        if (!tok.empty()) break;
        continue;
      }
      tok += ch;
    }
    if (tok.empty()) throw std::invalid_argument(path.string() + ": truncated PGM header");
    return tok;
  };
  const std::string magic = token();
  if (magic != "P2" && magic != "P5")
    throw std::invalid_argument(path.string() + ": not a P2/P5 PGM file");
  PgmImage img;
  img.width = std::stoi(token());
  img.height = std::stoi(token());
  img.maxval = std::stoi(token());
  if (img.width < 1 || img.height < 1 || img.maxval < 1 || img.maxval > 65535)
    throw std::invalid_argument(path.string() + ": bad PGM header");
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  img.pixels.resize(n);
  if (magic == "P2") {
    for (std::size_t k = 0; k < n; ++k) img.pixels[k] = std::stoi(token());
  } else {
    const int bytes = img.maxval < 256 ? 1 : 2;
    for (std::size_t k = 0; k < n; ++k) {
      int v = 0;
      for (int b = 0; b < bytes; ++b) {
        const int ch = in.get();
        if (ch == EOF) throw std::invalid_argument(path.string() + ": truncated PGM data");
        v = (v << 8) | ch;
      }
      img.pixels[k] = v;
    }
  }
  return img;
}

std::string format_heatmap_pgm(const ScalarField& f) {
  const GridDomain& d = f.domain();
  const double lo = f.min(), hi = f.max();
  std::string out = "P2\n" + std::to_string(d.width()) + " " +
                    std::to_string(d.height()) + "\n255\n";
  for (int r = 0; r < d.height(); ++r) {
    for (int c = 0; c < d.width(); ++c) {
      const auto i = d.index(c, r);
      int level = 0;
      if (i != GridDomain::npos && hi > lo)
        level = static_cast<int>(
            std::lround(255.0 * (f[static_cast<std::size_t>(i)] - lo) / (hi - lo)));
      else if (i != GridDomain::npos)
        level = 255;
      out += std::to_string(level);
      out += c + 1 < d.width() ? ' ' : '\n';
    }
  }
  return out;
}

void write_heatmap_pgm(const std::filesystem::path& path, const ScalarField& f) {
  write_text(path, format_heatmap_pgm(f));
}

DomainPtr domain_from_json(const nlohmann::json& spec,
                           const std::filesystem::path& base_dir) {
  if (!spec.is_object()) throw std::invalid_argument("domain: expected an object");
  auto number = [&](const char* key) -> double {
    if (!spec.contains(key) || !spec[key].is_number())
      throw std::invalid_argument(std::string("domain.") + key + ": expected a number");
    return spec[key].get<double>();
  };
  auto integer = [&](const char* key) -> int {
    if (!spec.contains(key) || !spec[key].is_number_integer())
      throw std::invalid_argument(std::string("domain.") + key + ": expected an integer");
    return spec[key].get<int>();
  };
  if (!spec.contains("shape") || !spec["shape"].is_string())
    throw std::invalid_argument("domain.shape: expected a string");
  const std::string shape = spec["shape"];
  for (const auto& item : spec.items()) {
    static const char* const known[] = {"shape", "nx",        "ny",  "h",
                                        "semi_axes", "mask_path", "axis"};
    if (std::find(std::begin(known), std::end(known), item.key()) == std::end(known))
      throw std::invalid_argument("domain: unknown key '" + item.key() + "'");
  }
  const double h = number("h");

  if (shape == "rectangle") return make_rectangle(integer("nx"), integer("ny"), h);
  if (shape == "ellipse") {
    if (!spec.contains("semi_axes") || !spec["semi_axes"].is_array() ||
        spec["semi_axes"].size() != 2)
      throw std::invalid_argument("domain.semi_axes: expected [a, b]");
    const SemiAxes axes{spec["semi_axes"][0].get<double>(),
                        spec["semi_axes"][1].get<double>()};
    return make_ellipse(integer("nx"), integer("ny"), h, axes);
  }
  if (shape == "mask_file") {
    if (!spec.contains("mask_path") || !spec["mask_path"].is_string())
      throw std::invalid_argument("domain.mask_path: expected a string");
    std::filesystem::path p = spec["mask_path"].get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    const PgmImage img = read_pgm(p);
    if (spec.contains("nx") && integer("nx") != img.width)
      throw std::invalid_argument("domain.nx does not match the mask file");
    if (spec.contains("ny") && integer("ny") != img.height)
      throw std::invalid_argument("domain.ny does not match the mask file");
    CellMask mask(img.pixels.size());
    for (std::size_t k = 0; k < mask.size(); ++k) mask[k] = img.pixels[k] != 0 ? 1 : 0;

    const std::string axis = spec.value("axis", std::string("none"));
    if (axis == "none") return make_masked(img.width, img.height, h, std::move(mask));
    if (axis == "centre")
      return make_masked(img.width, img.height, h, std::move(mask),
                         centre_axis(img.width), centre_axis(img.height));
    throw std::invalid_argument("domain.axis: expected \"none\" or \"centre\"");
  }
  throw std::invalid_argument("domain.shape: unknown shape '" + shape + "'");
}

}  // namespace wopt
