#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "lsbw/errors.hpp"
#include "lsbw/mixtures.hpp"

using namespace lsbw;

namespace {

const double kPi = 3.14159265358979323846;

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

// Central difference of `f` in coordinate j.
template <class F>
double central_diff(F&& f, std::vector<double> x, std::size_t j, double step) {
  x[j] += step;
  const double up = f(x);
  x[j] -= 2.0 * step;
  const double down = f(x);
  return (up - down) / (2.0 * step);
}

}  // namespace

TEST_SUITE("mixtures") {
  TEST_CASE("M13 density at the origin") {
    const auto m = model_by_id("M13");
    const double x[] = {0.0, 0.0};
    // 2/3 / (2 pi 0.5) + 1/3 * 50 / (2 pi 0.5)
    CHECK(m.density(x) == doctest::Approx(5.517371360519036).epsilon(1e-12));
  }

  TEST_CASE("normal derivatives match analytic forms") {
    const auto m = model_by_id("normal-d1");
    for (double x : {-2.0, -0.3, 1.0, 2.5}) {
      const double p[] = {x};
      const int i1[] = {0}, i2[] = {0, 0}, i3[] = {0, 0, 0}, i4[] = {0, 0, 0, 0};
      CHECK(m.partial(p, i1) == doctest::Approx(-x * phi(x)).epsilon(1e-12));
      CHECK(m.partial(p, i2) == doctest::Approx((x * x - 1.0) * phi(x)).epsilon(1e-12));
      CHECK(m.partial(p, i3) == doctest::Approx((3.0 * x - x * x * x) * phi(x)).epsilon(1e-12));
      CHECK(m.partial(p, i4) == doctest::Approx((x * x * x * x - 6.0 * x * x + 3.0) * phi(x)).epsilon(1e-12));
    }
    const double one[] = {1.0};
    const int i1[] = {0};
    CHECK(m.partial(one, i1) == doctest::Approx(-0.24197072451914337).epsilon(1e-12));
  }

  TEST_CASE("mixed partials agree with finite differences of lower orders") {
    MixtureComponent a{0.4, Eigen::Vector2d(0.3, -0.2), Eigen::Matrix2d{{0.5, 0.2}, {0.2, 0.8}}};
    MixtureComponent b{0.6, Eigen::Vector2d(-0.5, 0.4), Eigen::Matrix2d{{1.2, -0.3}, {-0.3, 0.6}}};
    const MixtureModel m({a, b});
    const std::vector<double> x = {0.1, 0.35};
    const double h = 1e-4;
    const std::vector<std::vector<int>> indices = {{}, {0}, {1}, {0, 1}, {1, 1}, {0, 0, 1}, {0, 1, 1}};
    for (const auto& idx : indices) {
      for (std::size_t j = 0; j < 2; ++j) {
        std::vector<int> up = idx;
        up.push_back(static_cast<int>(j));
        const double fd = central_diff([&](const std::vector<double>& y) { return m.partial(y, idx); }, x, j, h);
        CHECK(m.partial(x, up) == doctest::Approx(fd).epsilon(1e-6));
      }
    }
    const auto g = m.gradient(x);
    const int i0[] = {0}, i1[] = {1};
    CHECK(g[0] == doctest::Approx(m.partial(x, i0)));
    CHECK(g[1] == doctest::Approx(m.partial(x, i1)));
    const int pure[] = {1, 1, 1};
    CHECK(m.pure_partial(x, 1, 3) == doctest::Approx(m.partial(x, pure)));
  }

  TEST_CASE("sampler is deterministic and matches the moments") {
    const auto m = model_by_id("M13");
    const auto s1 = m.sample(50000, 9);
    const auto s2 = m.sample(50000, 9);
    CHECK(std::equal(s1.column(0).begin(), s1.column(0).end(), s2.column(0).begin()));
    const auto s3 = m.sample(50000, 10);
    CHECK(s1(0, 0) != s3(0, 0));
    // Var X1 = 1/4 (2/3 + 1/150), Var X2 = 2/3 + 1/150.
    CHECK(coordinate_sd(s1, 0) == doctest::Approx(std::sqrt(0.25 * (2.0 / 3.0 + 1.0 / 150.0))).epsilon(0.02));
    CHECK(coordinate_sd(s1, 1) == doctest::Approx(std::sqrt(2.0 / 3.0 + 1.0 / 150.0)).epsilon(0.02));
    CHECK_THROWS_AS(m.sample(0, 1), ArgumentError);
  }

  TEST_CASE("invalid mixtures are rejected") {
    MixtureComponent a{0.5, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1)};
    CHECK_THROWS_AS(MixtureModel({a}), ArgumentError);
    MixtureComponent bad{1.0, Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Zero(2, 2)};
    CHECK_THROWS_AS(MixtureModel({bad}), ArgumentError);
    CHECK_THROWS_AS(model_by_id("nope"), ArgumentError);
  }

  TEST_CASE("HDR levels of normal models") {
    // d = 1: c(0.5) = phi(Phi^-1(0.75)); d = 2: c(tau) = tau / (2 pi).
    CHECK(hdr_level(model_by_id("normal-d1"), 0.5).c == doctest::Approx(0.317776572684107).epsilon(2e-3));
    CHECK(hdr_level(model_by_id("normal-d2"), 0.2).c == doctest::Approx(0.03183098861837907).epsilon(5e-3));
    CHECK(hdr_level(model_by_id("normal-d2"), 0.5).c == doctest::Approx(0.07957747154594767).epsilon(3e-3));
    CHECK_THROWS_AS(hdr_level(model_by_id("normal-d1"), 1.5), ArgumentError);
  }

  TEST_CASE("JSON mixture configs") {
    const auto m = parse_mixture_json(R"({"components": [{"weight": 1.0, "mean": [0, 0], "cov": [[1, 0], [0, 1]]}]})");
    const double x[] = {0.0, 0.0};
    CHECK(m.density(x) == doctest::Approx(1.0 / (2.0 * kPi)));
    CHECK_THROWS_AS(parse_mixture_json("{}"), ArgumentError);
    CHECK_THROWS_AS(parse_mixture_json(R"({"components": [{"weight": 1.0, "mean": [0], "cov": [[1, 0]]}]})"),
                    ArgumentError);
    const auto path = std::filesystem::temp_directory_path() / "lsbw_mixture_test.json";
    std::ofstream(path) << R"({"components": [{"weight": 1.0, "mean": [1.5], "cov": [[4]]}]})";
    const auto from_file = resolve_model(path.string());
    const double p[] = {1.5};
    CHECK(from_file.density(p) == doctest::Approx(1.0 / std::sqrt(8.0 * kPi)));
    std::filesystem::remove(path);
  }

  TEST_CASE("point CSV round trip") {
    const auto pts = model_by_id("normal-d2").sample(10, 3);
    const auto path = std::filesystem::temp_directory_path() / "lsbw_points_test.csv";
    write_points_csv(pts, path);
    const auto back = read_points_csv(path);
    REQUIRE(back.size() == 10);
    REQUIRE(back.dim() == 2);
    for (std::size_t i = 0; i < 10; ++i) CHECK(back(i, 1) == pts(i, 1));
    std::filesystem::remove(path);
  }
}
