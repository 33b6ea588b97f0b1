#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "wopt/error.hpp"
#include "wopt/io.hpp"
#include "wopt/oracle.hpp"

using namespace wopt;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "wopt_test_io";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream(p, std::ios::binary) << s;
}

}  // namespace

TEST_CASE("field CSV layout") {
  const DomainPtr d = make_masked(3, 2, 0.5, {1, 0, 1, 1, 1, 0});
  const ScalarField f(d, {0.1, -2.0, 3.0, 1e-300});
  CHECK(format_field_csv(f) == "3,2,0.5\n0.1\nnan\n-2\n3\n1e-300\nnan\n");
}

TEST_CASE("field CSV round-trips bit-exactly") {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 20; ++t) {
    const DomainPtr d = t % 2 ? oracle::random_polyomino(rng, 30, 1.0 / 7)
                              : make_ellipse(17, 13, 1.0 / 3, {2.6, 2.0});
    const ScalarField f = oracle::random_field(rng, d, -1e3, 1e3);
    std::istringstream in(format_field_csv(f));
    const ScalarField back = parse_field_csv(in, d);
    CHECK(back == f);
    std::istringstream again(format_field_csv(f));
    const ScalarField rebuilt = parse_field_csv(again);
    CHECK(rebuilt.domain().same_shape(*d));
    CHECK(rebuilt.domain().spacing() == d->spacing());
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(rebuilt[i] == f[i]);
  }
  const fs::path p = scratch("field.csv");
  const DomainPtr d = make_rectangle(4, 3, 0.125);
  const ScalarField f = oracle::random_field(rng, d, 0.0, 1.0);
  write_field_csv(p, f);
  CHECK(read_field_csv(p, d) == f);
}

TEST_CASE("field CSV errors") {
  const DomainPtr d = make_rectangle(3, 3, 0.5);
  auto parse = [&](const std::string& s) {
    std::istringstream in(s);
    return parse_field_csv(in, d);
  };
  CHECK_THROWS_AS(parse("3,3\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("3,3,0.5\n1\n2\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("3,3,0.5\n1\n1\n1\n1\nx\n1\n1\n1\n1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("4,2,0.5\n1\n1\n1\n1\n1\n1\n1\n1\n"), DomainMismatch);
  CHECK_THROWS_AS(parse("3,3,0.5\nnan\n1\n1\n1\n1\n1\n1\n1\n1\n"), DomainMismatch);
  CHECK_THROWS_AS(read_field_csv(scratch("does_not_exist.csv")), std::exception);
}

TEST_CASE("heatmap PGM") {
  const DomainPtr d = make_masked(2, 2, 1.0, {1, 1, 0, 1});
  const ScalarField f(d, {-1.0, 1.0, 0.0});
  CHECK(format_heatmap_pgm(f) == "P2\n2 2\n255\n0 255\n0 128\n");
  CHECK(format_heatmap_pgm(ScalarField::constant(d, 3.0)) == "P2\n2 2\n255\n255 255\n0 255\n");

  const fs::path p = scratch("heat.pgm");
  write_heatmap_pgm(p, f);
  const PgmImage img = read_pgm(p);
  CHECK(img.width == 2);
  CHECK(img.height == 2);
  CHECK(img.maxval == 255);
  CHECK(img.pixels == std::vector<int>{0, 255, 0, 128});
}

TEST_CASE("PGM reader") {
  const fs::path p2 = scratch("a.pgm");
  write_text(p2, "P2\n# comment\n3 1\n# another\n7\n0 7 3\n");
  const PgmImage a = read_pgm(p2);
  CHECK(a.maxval == 7);
  CHECK(a.pixels == std::vector<int>{0, 7, 3});

  const fs::path p5 = scratch("b.pgm");
  write_text(p5, std::string("P5\n2 2\n255\n") + std::string("\x01\x00\xff\x10", 4));
  const PgmImage b = read_pgm(p5);
  CHECK(b.pixels == std::vector<int>{1, 0, 255, 16});

  const fs::path bad = scratch("c.pgm");
  write_text(bad, "P3\n1 1\n255\n0 0 0\n");
  CHECK_THROWS_AS(read_pgm(bad), std::invalid_argument);
  write_text(bad, "P2\n2 2\n255\n0 0 0\n");
  CHECK_THROWS_AS(read_pgm(bad), std::invalid_argument);
}

TEST_CASE("domain specs") {
  using nlohmann::json;
  const DomainPtr r = domain_from_json(json{{"shape", "rectangle"}, {"nx", 6}, {"ny", 4}, {"h", 0.25}});
  CHECK(r->size() == 24);
  CHECK(r->axis());
  const DomainPtr e = domain_from_json(
      json{{"shape", "ellipse"}, {"nx", 11}, {"ny", 11}, {"h", 0.1}, {"semi_axes", {0.5, 0.5}}});
  CHECK(e->same_shape(*make_ellipse(11, 11, 0.1, {0.5, 0.5})));

  const fs::path dir = scratch("").parent_path();
  write_text(dir / "plus.pgm", "P2\n3 3\n1\n0 1 0\n1 1 1\n0 1 0\n");
  const DomainPtr m = domain_from_json(
      json{{"shape", "mask_file"}, {"mask_path", "plus.pgm"}, {"h", 0.5}}, dir);
  CHECK(m->size() == 5);
  CHECK_FALSE(m->axis());
  const DomainPtr ma = domain_from_json(
      json{{"shape", "mask_file"}, {"mask_path", "plus.pgm"}, {"h", 0.5}, {"axis", "centre"}},
      dir);
  CHECK(ma->axis());
  CHECK(ma->row_axis());

  write_text(dir / "lop.pgm", "P2\n3 2\n1\n1 1 0\n1 1 1\n");
  CHECK_THROWS_AS(domain_from_json(json{{"shape", "mask_file"}, {"mask_path", "lop.pgm"},
                                        {"h", 0.5}, {"axis", "centre"}},
                                   dir),
                  std::invalid_argument);
  CHECK_THROWS_AS(domain_from_json(json{{"shape", "mask_file"}, {"mask_path", "plus.pgm"},
                                        {"h", 0.5}, {"nx", 4}},
                                   dir),
                  std::invalid_argument);
  CHECK_THROWS_AS(domain_from_json(json{{"shape", "hexagon"}}), std::invalid_argument);
  CHECK_THROWS_AS(domain_from_json(json{{"shape", "rectangle"}, {"nx", 6}, {"h", 0.25}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      domain_from_json(json{{"shape", "rectangle"}, {"nx", 6}, {"ny", 4}, {"h", 0.25}, {"x", 1}}),
      std::invalid_argument);
}
