#include <doctest.h>

#include <cmath>

#include "lsbw/bandwidth.hpp"
#include "lsbw/errors.hpp"
#include "lsbw/kernels.hpp"

using namespace lsbw;

namespace {

const double kPi = 3.14159265358979323846;

// Trapezoid rule on [-a, a]; the integrands here decay like exp(-u^2/2).
template <class F>
double trapezoid(F&& f, double a = 20.0, int n = 40000) {
  const double step = 2.0 * a / n;
  double s = 0.5 * (f(-a) + f(a));
  for (int i = 1; i < n; ++i) s += f(-a + i * step);
  return s * step;
}

double horner_exp(std::span<const double> poly, double u, double exp_scale) {
  double p = 0.0;
  for (std::size_t i = poly.size(); i-- > 0;) p = p * u + poly[i];
  return p * std::exp(-u * u * exp_scale);
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("gaussian constants") {
    const KernelSpec k(KernelFamily::gaussian);
    CHECK(k.order() == 2);
    CHECK(k.kappa() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k.l2_norm_sq() == doctest::Approx(0.28209479177387814).epsilon(1e-12));
    for (const auto& [p, v] : k.lk_norms())
      CHECK(v == doctest::Approx(std::pow(2.0 * kPi, -(p - 1) / 2.0) / std::sqrt(static_cast<double>(p))).epsilon(1e-10));
    CHECK(k.lk_norms().size() == 5);
  }

  TEST_CASE("fourth-order gaussian constants") {
    const KernelSpec k(KernelFamily::gaussian4);
    CHECK(k.order() == 4);
    CHECK(k.kappa() == doctest::Approx(-3.0).epsilon(1e-12));
    // (27/32) / (2 sqrt(pi)) from expanding (3 - u^2)^2 / 4 against phi^2.
    CHECK(k.l2_norm_sq() == doctest::Approx(0.4760349611184189).epsilon(1e-12));
    CHECK(kernel_moment(k, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(kernel_moment(k, 2)) < 1e-12);
    CHECK(kernel_moment(k, 4) == doctest::Approx(-3.0).epsilon(1e-12));
    const auto l3 = trapezoid([&](double u) { return std::pow(std::abs(k.eval(u)), 3.0); });
    CHECK(k.lk_norms().at(3) == doctest::Approx(l3).epsilon(1e-8));
  }

  TEST_CASE("derivatives agree with finite differences") {
    for (auto fam : {KernelFamily::gaussian, KernelFamily::gaussian4}) {
      const KernelSpec k(fam);
      for (double u : {-2.7, -0.4, 0.0, 1.1, 3.3}) {
        for (int q = 1; q <= 4; ++q) {
          const double step = 1e-5;
          const double fd = (k.eval(u + step, q - 1) - k.eval(u - step, q - 1)) / (2.0 * step);
          CHECK(k.eval(u, q) == doctest::Approx(fd).epsilon(1e-7).scale(1e-9));
        }
      }
    }
  }

  TEST_CASE("convolution polynomial matches numerical self-convolution") {
    for (auto fam : {KernelFamily::gaussian, KernelFamily::gaussian4}) {
      const KernelSpec k(fam);
      for (double t : {0.0, 0.5, 1.7, -2.2, 4.0}) {
        const double conv = trapezoid([&](double u) { return k.eval(u) * k.eval(t - u); });
        CHECK(horner_exp(k.convolution_poly(), t, 0.25) == doctest::Approx(conv).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("derivative roughness") {
    const KernelSpec k(KernelFamily::gaussian);
    for (int r = 0; r <= 4; ++r) {
      // R(phi^(r)) = (2r)! / (2^(2r+1) r! sqrt(pi))
      const double expected = std::tgamma(2.0 * r + 1.0) / (std::pow(2.0, 2 * r + 1) * std::tgamma(r + 1.0) * std::sqrt(kPi));
      CHECK(k.derivative_l2_norm_sq(r) == doctest::Approx(expected).epsilon(1e-10));
    }
  }

  TEST_CASE("normal-scale pilot constants") {
    const KernelSpec k(KernelFamily::gaussian);
    CHECK(pilot_constant(k, 0) == doctest::Approx(std::pow(4.0 / 3.0, 0.2)).epsilon(1e-10));
    CHECK(pilot_constant(k, 1) == doctest::Approx(std::pow(4.0 / 5.0, 1.0 / 7.0)).epsilon(1e-10));
    CHECK(pilot_constant(k, 2) == doctest::Approx(std::pow(4.0 / 7.0, 1.0 / 9.0)).epsilon(1e-10));
  }

  TEST_CASE("truncation") {
    const KernelSpec k(KernelFamily::gaussian, 8.0);
    CHECK(k.truncated());
    CHECK(k.eval(8.5) == 0.0);
    CHECK(k.eval(7.5) == doctest::Approx(KernelSpec(KernelFamily::gaussian).eval(7.5)));
    CHECK_FALSE(KernelSpec(KernelFamily::gaussian).truncated());
  }

  TEST_CASE("parsing") {
    CHECK(parse_kernel("gaussian").family() == KernelFamily::gaussian);
    CHECK(parse_kernel("gaussian4").family() == KernelFamily::gaussian4);
    CHECK_THROWS_AS(parse_kernel("epanechnikov"), ArgumentError);
    const auto c = kernel_constants(KernelSpec(KernelFamily::gaussian));
    CHECK(c.l2_norm_sq == doctest::Approx(0.28209479177387814));
  }
}
