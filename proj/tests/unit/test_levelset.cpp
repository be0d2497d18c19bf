#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "lsbw/errors.hpp"
#include "lsbw/levelset.hpp"

using namespace lsbw;

namespace {

const double kPi = 3.14159265358979323846;

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

GridField sample_field(double half_width, std::size_t res, double (*f)(double, double)) {
  GridField field;
  field.grid = GridSpec{{{-half_width, half_width}, {-half_width, half_width}}, {res, res}};
  field.values.resize(field.grid.total());
  for (std::size_t i = 0; i < res; ++i)
    for (std::size_t j = 0; j < res; ++j)
      field.values[i * res + j] = f(field.grid.node(0, i), field.grid.node(1, j));
  return field;
}

double bump(double x, double y) { return std::exp(-0.5 * (x * x + y * y)); }

double total_length(const LevelSetBoundary& b) {
  double len = 0.0;
  for (const auto& node : boundary_nodes(b)) len += node.weight;
  return len;
}

}  // namespace

TEST_SUITE("levelset") {
  TEST_CASE("d = 1 crossings of the standard normal") {
    const double c = phi(0.67449);
    const auto b = extract_d1(phi, c, -10.0, 10.0);
    REQUIRE(b.crossings.size() == 2);
    CHECK(b.crossings[0].x == doctest::Approx(-0.67449).epsilon(1e-8));
    CHECK(b.crossings[1].x == doctest::Approx(0.67449).epsilon(1e-8));
    CHECK(b.crossings[0].direction == Direction::up);
    CHECK(b.crossings[1].direction == Direction::down);
    for (const auto& x : b.crossings) CHECK(std::abs(phi(x.x) - c) <= 1e-10);

    // w = 1 / |phi'| summed over both crossings: 2 / (0.67449 phi(0.67449)).
    const auto s = surface_integral(b, [](std::span<const double> x) { return 1.0 / std::abs(x[0] * phi(x[0])); });
    CHECK(s.value == doctest::Approx(9.33109829955537).epsilon(1e-6));
    CHECK_FALSE(s.empty_boundary);
  }

  TEST_CASE("d = 1 empty level sets") {
    CHECK(extract_d1(phi, 0.5, -10.0, 10.0).empty());
    const auto s = surface_integral(extract_d1(phi, 0.5, -10.0, 10.0), [](std::span<const double>) { return 1.0; });
    CHECK(s.value == 0.0);
    CHECK(s.empty_boundary);
    CHECK_THROWS_AS(extract_d1(phi, 0.1, 1.0, -1.0), ArgumentError);
  }

  TEST_CASE("marching squares circle") {
    const double level = std::exp(-0.5);
    const auto b = extract_d2(sample_field(2.0, 512, bump), level);
    REQUIRE(b.polylines.size() == 1);
    CHECK(b.polylines[0].closed);
    const double cell = 4.0 / 511.0;
    double worst = 0.0;
    for (const auto& v : b.polylines[0].vertices) worst = std::max(worst, std::abs(std::hypot(v[0], v[1]) - 1.0));
    CHECK(worst <= cell * cell);
    const double len = total_length(b);
    CHECK(std::abs(len - 2.0 * kPi) / (2.0 * kPi) <= 0.005);
    CHECK(b.segment_count() == b.polylines[0].vertices.size() - 1);
  }

  TEST_CASE("circumference error shrinks with refinement") {
    const double level = std::exp(-0.5);
    double prev = 1.0;
    for (std::size_t res : {256u, 512u, 1024u}) {
      const double err = std::abs(total_length(extract_d2(sample_field(2.0, res, bump), level)) - 2.0 * kPi);
      CHECK(err < prev);
      prev = err;
    }
  }

  TEST_CASE("vertices lie on cell edges") {
    const auto field = sample_field(1.5, 64, [](double x, double y) { return std::exp(-0.5 * (x * x / 0.5 + y * y)); });
    const auto b = extract_d2(field, 0.4);
    const double step = field.grid.step(0);
    for (const auto& pl : b.polylines)
      for (const auto& v : pl.vertices) {
        const double fx = (v[0] + 1.5) / step, fy = (v[1] + 1.5) / step;
        const bool on_x = std::abs(fx - std::round(fx)) < 1e-9;
        const bool on_y = std::abs(fy - std::round(fy)) < 1e-9;
        CHECK((on_x || on_y));
      }
  }

  TEST_CASE("single cell cases") {
    GridField f;
    f.grid = GridSpec{{{0.0, 1.0}, {0.0, 1.0}}, {2, 2}};
    SUBCASE("one corner above") {
      // values at (0,0), (0,1), (1,0), (1,1)
      f.values = {1.0, 0.0, 0.0, 0.0};
      const auto b = extract_d2(f, 0.5);
      REQUIRE(b.polylines.size() == 1);
      REQUIRE(b.polylines[0].vertices.size() == 2);
      CHECK_FALSE(b.polylines[0].closed);
      CHECK(total_length(b) == doctest::Approx(std::sqrt(0.5)));
    }
    SUBCASE("saddle resolved by the centre value") {
      f.values = {1.0, 0.0, 0.0, 1.0};
      // centre 0.5 >= 0.4 keeps the high corners joined, so the low corners are cut off
      const auto joined = extract_d2(f, 0.4);
      CHECK(joined.polylines.size() == 2);
      CHECK(total_length(joined) == doctest::Approx(2.0 * std::hypot(0.4, 0.4)));
      const auto split = extract_d2(f, 0.6);
      CHECK(split.polylines.size() == 2);
      CHECK(total_length(split) == doctest::Approx(2.0 * std::hypot(0.4, 0.4)));
    }
    SUBCASE("constant field") {
      f.values = {1.0, 1.0, 1.0, 1.0};
      CHECK(extract_d2(f, 0.5).empty());
      CHECK(extract_d2(f, 1.5).empty());
    }
  }

  TEST_CASE("surface integral is additive and zero for zero weight") {
    const auto b = extract_d2(sample_field(2.0, 256, bump), std::exp(-0.5));
    auto w1 = [](std::span<const double> x) { return x[0] * x[0]; };
    auto w2 = [](std::span<const double> x) { return 1.0 + x[1]; };
    const double a = surface_integral(b, w1).value, c = surface_integral(b, w2).value;
    const double both = surface_integral(b, [&](std::span<const double> x) { return w1(x) + w2(x); }).value;
    CHECK(both == doctest::Approx(a + c).epsilon(1e-12));
    CHECK(surface_integral(b, [](std::span<const double>) { return 0.0; }).value == 0.0);
    // int_circle x^2 dH = pi
    CHECK(a == doctest::Approx(kPi).epsilon(1e-3));
  }

  TEST_CASE("polyline CSV") {
    const auto b = extract_d2(sample_field(2.0, 32, bump), std::exp(-0.5));
    const auto path = std::filesystem::temp_directory_path() / "lsbw_polylines_test.csv";
    write_polylines_csv(b, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "polyline_id,vertex_x,vertex_y");
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    std::size_t vertices = 0;
    for (const auto& pl : b.polylines) vertices += pl.vertices.size();
    CHECK(rows == vertices);
    std::filesystem::remove(path);
  }
}
