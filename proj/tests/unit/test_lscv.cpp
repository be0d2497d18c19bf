#include <doctest.h>

#include <cmath>

#include "lsbw/bandwidth.hpp"
#include "lsbw/errors.hpp"

using namespace lsbw;

namespace {

const double kPi = 3.14159265358979323846;

double gauss(double u, double h) { return std::exp(-0.5 * u * u / (h * h)) / (std::sqrt(2.0 * kPi) * h); }

// int f_hat^2 by a tensor trapezoid rule plus the leave-one-out sum, both
// straight from the definitions.
double lscv_by_quadrature(const PointSet& s, const std::vector<double>& h) {
  const std::size_t n = s.size(), d = s.dim();
  auto f_hat = [&](const std::vector<double>& x) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double p = 1.0;
      for (std::size_t j = 0; j < d; ++j) p *= gauss(x[j] - s(i, j), h[j]);
      sum += p;
    }
    return sum / static_cast<double>(n);
  };
  const int m = d == 1 ? 4000 : 300;
  std::vector<double> lo(d), step(d);
  for (std::size_t j = 0; j < d; ++j) {
    double a = s(0, j), b = s(0, j);
    for (std::size_t i = 1; i < n; ++i) {
      a = std::min(a, s(i, j));
      b = std::max(b, s(i, j));
    }
    lo[j] = a - 9.0 * h[j];
    step[j] = (b - a + 18.0 * h[j]) / m;
  }
  double integral = 0.0;
  std::vector<double> x(d);
  if (d == 1) {
    for (int i = 0; i <= m; ++i) {
      x[0] = lo[0] + i * step[0];
      const double v = f_hat(x);
      integral += (i == 0 || i == m ? 0.5 : 1.0) * v * v;
    }
    integral *= step[0];
  } else {
    for (int i = 0; i <= m; ++i)
      for (int k = 0; k <= m; ++k) {
        x[0] = lo[0] + i * step[0];
        x[1] = lo[1] + k * step[1];
        const double v = f_hat(x);
        integral += (i == 0 || i == m ? 0.5 : 1.0) * (k == 0 || k == m ? 0.5 : 1.0) * v * v;
      }
    integral *= step[0] * step[1];
  }
  double loo = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (i == k) continue;
      double p = 1.0;
      for (std::size_t j = 0; j < d; ++j) p *= gauss(s(i, j) - s(k, j), h[j]);
      loo += p / static_cast<double>(n - 1);
    }
  return integral - 2.0 * loo / static_cast<double>(n);
}

}  // namespace

TEST_SUITE("lscv") {
  TEST_CASE("two-point closed form") {
    const double rows[] = {-1.0, 1.0};
    const auto s = PointSet::from_rows(rows, 1);
    CHECK(lscv_objective(s, BandwidthVector({1.0}), KernelSpec(KernelFamily::gaussian)) ==
          doctest::Approx(0.0849539000381373).epsilon(1e-12));
  }

  TEST_CASE("objective matches quadrature of the definition") {
    const KernelSpec k(KernelFamily::gaussian);
    const auto s1 = model_by_id("normal-d1").sample(40, 3);
    for (double h : {0.1, 0.4, 1.2})
      CHECK(lscv_objective(s1, BandwidthVector({h}), k) == doctest::Approx(lscv_by_quadrature(s1, {h})).epsilon(1e-7));
    const auto s2 = model_by_id("M13").sample(25, 4);
    CHECK(lscv_objective(s2, BandwidthVector({0.3, 0.5}), k) ==
          doctest::Approx(lscv_by_quadrature(s2, {0.3, 0.5})).epsilon(1e-5));
  }

  TEST_CASE("scale equivariance") {
    const KernelSpec k(KernelFamily::gaussian);
    const auto s = model_by_id("M13").sample(300, 5);
    const double f = 2.5;
    CHECK(lscv_objective(s.affine(f), BandwidthVector({0.5, 0.75}), k) ==
          doctest::Approx(lscv_objective(s, BandwidthVector({0.2, 0.3}), k) / (f * f)).epsilon(1e-12));
    const auto a = select_lscv(s, k), b = select_lscv(s.affine(f), k);
    CHECK(b.h[0] == doctest::Approx(f * a.h[0]).epsilon(1e-3));
    CHECK(b.h[1] == doctest::Approx(f * a.h[1]).epsilon(1e-3));
  }

  TEST_CASE("selected bandwidth is no worse than an exhaustive grid") {
    const KernelSpec k(KernelFamily::gaussian);
    const auto s = model_by_id("normal-d1").sample(400, 6);
    const auto sel = select_lscv(s, k);
    double best = INFINITY;
    for (int i = 0; i <= 400; ++i) {
      const double h = 0.02 * std::pow(100.0, i / 400.0);
      best = std::min(best, lscv_objective(s, BandwidthVector({h}), k));
    }
    CHECK(sel.value <= best + 1e-9 * std::abs(best));
    CHECK(sel.value == doctest::Approx(lscv_objective(s, sel.h, k)));
    CHECK(sel.evaluations <= 3 * 400);
  }

  TEST_CASE("large normal sample lands near the normal-scale bandwidth") {
    const KernelSpec k(KernelFamily::gaussian);
    const auto s = model_by_id("normal-d1").sample(10000, 7);
    const double h_ns = 1.0592238410488122 * coordinate_sd(s, 0) * std::pow(10000.0, -0.2);
    const auto sel = select_lscv(s, k);
    CHECK(sel.h[0] >= 0.5 * h_ns);
    CHECK(sel.h[0] <= 2.0 * h_ns);
    CHECK_FALSE(sel.boundary_warning);
  }

  TEST_CASE("input checks") {
    const KernelSpec k(KernelFamily::gaussian);
    CHECK_THROWS_AS(select_lscv(model_by_id("normal-d1").sample(10, 1), k), ArgumentError);
    CHECK_THROWS_AS(lscv_objective(model_by_id("normal-d1").sample(10, 1), BandwidthVector({0.1, 0.1}), k),
                    ArgumentError);
  }
}
