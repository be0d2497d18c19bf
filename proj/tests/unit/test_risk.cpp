#include <doctest.h>

#include <cmath>

#include "lsbw/bandwidth.hpp"
#include "lsbw/errors.hpp"
#include "lsbw/risk.hpp"

using namespace lsbw;

namespace {

const double kPi = 3.14159265358979323846;

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

// E|Z - u| by the trapezoid rule on [-12, 12].
double gamma_oracle(double u) {
  const int m = 200000;
  const double a = -12.0, step = 24.0 / m;
  double s = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double z = a + i * step;
    s += (i == 0 || i == m ? 0.5 : 1.0) * std::abs(z - u) * phi(z);
  }
  return s * step;
}

}  // namespace

TEST_SUITE("risk") {
  TEST_CASE("gamma function") {
    CHECK(gamma_fn(0.0) == doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-14));
    CHECK(gamma_fn(1.0) == doctest::Approx(1.1666309411753726).epsilon(1e-12));
    CHECK(gamma_fn(3.0) == doctest::Approx(3.000764308634096).epsilon(1e-10));
    for (double u : {0.0, 0.3, 1.0, 2.2, 3.0}) CHECK(gamma_fn(u) == doctest::Approx(gamma_oracle(u)).epsilon(1e-8));
    // gamma(u) - u decreases to zero and gamma is convex
    double prev = INFINITY;
    for (double u = 0.0; u < 8.0; u += 0.25) {
      const double gap = gamma_fn(u) - u;
      CHECK(gap > 0.0);
      CHECK(gap < prev);
      prev = gap;
      CHECK(gamma_fn(u + 0.1) + gamma_fn(u + 0.3) >= 2.0 * gamma_fn(u + 0.2) - 1e-14);
    }
    CHECK_THROWS_AS(gamma_fn(-1.0), ArgumentError);
  }

  TEST_CASE("normal absolute moments") {
    for (double beta : {-1.0, 0.0, 0.4, 2.0})
      for (double s : {0.5, 1.0, 3.0}) {
        CHECK(normal_abs_moment(beta, s, 1.0) == doctest::Approx(s * gamma_fn(std::abs(beta) / s)).epsilon(1e-9));
        CHECK(normal_abs_moment(beta, s, 2.0) == doctest::Approx(s * s + beta * beta).epsilon(1e-9));
        CHECK(normal_abs_moment(beta, s, 0.0) == doctest::Approx(1.0).epsilon(1e-9));
      }
  }

  TEST_CASE("weights") {
    const auto m = model_by_id("normal-d1");
    const double c = phi(1.0);
    CHECK(WeightFunction(WeightKind::unit, m, c).p() == 0.0);
    CHECK(WeightFunction(WeightKind::density, m, c).p() == 0.0);
    CHECK(WeightFunction(WeightKind::excess, m, c).p() == 1.0);
    CHECK(WeightFunction(WeightKind::power, m, c, 2.5).p() == 2.5);
    const double x[] = {0.0};
    CHECK(WeightFunction(WeightKind::excess, m, c)(x) == doctest::Approx(phi(0.0) - c));
    const double b[] = {1.0};
    CHECK(WeightFunction(WeightKind::excess, m, c).boundary_factor(b) == doctest::Approx(phi(1.0)));
    CHECK(WeightFunction(WeightKind::density, m, c).boundary_factor(b) == doctest::Approx(c));
    double q = 0.0;
    CHECK(parse_weight_kind("power:1.5", &q) == WeightKind::power);
    CHECK(q == 1.5);
    CHECK_THROWS_AS(parse_weight_kind("power:x", &q), ArgumentError);
    CHECK_THROWS_AS(parse_weight_kind("triangle"), ArgumentError);
    CHECK(parse_risk_form("l1-upper") == RiskForm::l1_upper);
    CHECK_THROWS_AS(parse_risk_form("l2"), ArgumentError);
  }

  TEST_CASE("d = 1 symmetric difference of two intervals") {
    auto f = [](double x) { return 1.5 - std::abs(x - 1.0); };
    auto f_hat = [](double x) { return 1.5 - std::abs(x - 2.0); };
    auto one = [](double) { return 1.0; };
    auto id = [](double x) { return x; };
    CHECK(sym_diff_error_d1(f, f_hat, 0.5, one, -5.0, 8.0).value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(sym_diff_error_d1(f, f_hat, 0.5, id, -5.0, 8.0).value == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(sym_diff_error_d1(f, f, 0.5, one, -5.0, 8.0).value == 0.0);
    CHECK(sym_diff_error_d1(f_hat, f, 0.5, id, -5.0, 8.0).value == doctest::Approx(3.0).epsilon(1e-9));
  }

  TEST_CASE("shifted normal against a dense midpoint sum") {
    const auto m = model_by_id("normal-d1");
    const double c = phi(1.0), shift = 0.1;
    const ModelEstimator est(m, {shift});
    const WeightFunction g(WeightKind::excess, m, c);
    const double value = sym_diff_error(m, c, est, g).value;
    const int cells = 2000000;
    const double lo = -6.0, step = 12.0 / cells;
    double oracle = 0.0;
    for (int i = 0; i < cells; ++i) {
      const double x = lo + (i + 0.5) * step;
      if ((phi(x) >= c) != (phi(x - shift) >= c)) oracle += std::abs(phi(x) - c) * step;
    }
    CHECK(value == doctest::Approx(oracle).epsilon(1e-5));
    CHECK(sym_diff_error(m, c, ModelEstimator(m), g).value == 0.0);
  }

  TEST_CASE("d = 2 disk symmetric difference") {
    const auto m = model_by_id("normal-d2");
    const double c = std::exp(-0.5) / (2.0 * kPi);  // unit disk
    const double delta = 0.3;
    const ModelEstimator est(m, {delta, 0.0});
    const auto r = sym_diff_error(m, c, est, WeightFunction(WeightKind::unit, m, c));
    const double lens = 2.0 * std::acos(delta / 2.0) - 0.5 * delta * std::sqrt(4.0 - delta * delta);
    CHECK(r.value == doctest::Approx(2.0 * (kPi - lens)).epsilon(5e-3));
    CHECK_FALSE(r.resolution_warning);
  }

  TEST_CASE("grid symmetric difference flags tiny regions") {
    GridField f, f_hat;
    f.grid = f_hat.grid = cell_centered_grid({{0.0, 1.0}, {0.0, 1.0}}, 10);
    f.values.assign(100, 0.0);
    f_hat.values.assign(100, 0.0);
    f.values[0] = 1.0;
    const auto r = sym_diff_error_grid(f, f_hat, 0.5);
    CHECK(r.value == doctest::Approx(0.01));
    CHECK(r.resolution_warning);
  }

  TEST_CASE("m-tilde risk equals the Q objective") {
    const auto m = model_by_id("M13");
    const KernelSpec k(KernelFamily::gaussian);
    const double c = hdr_level(m, 0.5).c;
    const auto sf = exact_surface_functionals(m, c, 2);
    const auto problem = risk_problem(sf, c, k, 2000);
    for (double scale : {0.5, 1.0, 2.0}) {
      const BandwidthVector h({0.1 * scale, 0.15 * scale});
      const auto report = theoretical_risk(m, c, h, k, 2000, RiskForm::m_tilde);
      const Eigen::Vector2d u(h[0] * h[0], h[1] * h[1]);
      CHECK(report.value == doctest::Approx(q_value(problem, u)).epsilon(1e-8));
      CHECK(report.value == doctest::Approx(report.components.at("bias-term") + report.components.at("variance-term")));
    }
  }

  TEST_CASE("m-tilde is minimized at the selected bandwidth") {
    const auto m = model_by_id("normal-d1");
    const KernelSpec k(KernelFamily::gaussian);
    const double c = phi(2.0);
    const auto h_star = select_optimal_exact(m, c, k, 5000)[0];
    double best_h = 0.0, best = INFINITY;
    for (int i = 0; i <= 4000; ++i) {
      const double h = 0.05 + i * 0.0001;
      const double r = theoretical_risk(m, c, BandwidthVector({h}), k, 5000, RiskForm::m_tilde).value;
      if (r < best) {
        best = r;
        best_h = h;
      }
    }
    CHECK(std::abs(best_h - h_star) <= 0.0001);
  }

  TEST_CASE("L1 risk at the normal's +-2 boundary") {
    const auto m = model_by_id("normal-d1");
    const KernelSpec k(KernelFamily::gaussian);
    const double c = phi(2.0);
    for (double h : {0.05, 0.2, 0.4}) {
      const std::size_t n = 10000;
      const double s = std::sqrt(c * 0.28209479177387814 / (n * h));
      const double beta = 0.5 * h * h * 3.0 * phi(2.0);
      const double oracle = 2.0 * s * gamma_oracle(beta / s) / (2.0 * phi(2.0));
      const auto exact = theoretical_risk(m, c, BandwidthVector({h}), k, n, RiskForm::l1_exact);
      const auto upper = theoretical_risk(m, c, BandwidthVector({h}), k, n, RiskForm::l1_upper);
      CHECK(exact.value == doctest::Approx(oracle).epsilon(1e-7));
      CHECK(upper.value >= exact.value);
    }
  }

  TEST_CASE("upper L1 bound dominates on random bandwidths") {
    const auto m = model_by_id("M13");
    const KernelSpec k(KernelFamily::gaussian);
    const double c = hdr_level(m, 0.5).c;
    for (int i = 0; i < 10; ++i) {
      const BandwidthVector h({0.03 + 0.02 * i, 0.25 - 0.02 * i});
      const std::size_t n = 100u << (i % 5);
      const double lo = theoretical_risk(m, c, h, k, n, RiskForm::l1_exact).value;
      const double hi = theoretical_risk(m, c, h, k, n, RiskForm::l1_upper).value;
      CHECK(hi >= lo * (1.0 - 1e-12));
    }
    const WeightFunction ex(WeightKind::excess, m, c);
    CHECK_THROWS_AS(theoretical_risk(m, c, BandwidthVector({0.1, 0.1}), k, 100, RiskForm::l1_exact, &ex), ArgumentError);
  }

  TEST_CASE("exact estimate gives a degenerate boundary-risk ratio") {
    const auto m = model_by_id("normal-d1");
    const double c = phi(1.0);
    const WeightFunction g(WeightKind::excess, m, c);
    const auto r = theorem1_ratio(m, c, g, ModelEstimator(m), exact_boundary(m, c));
    CHECK(r.degenerate);
    CHECK(r.ratio == 1.0);
  }

  TEST_CASE("shifted estimate matches the leading boundary term") {
    // For a small shift the symmetric difference is a pair of thin slivers
    // and the ratio of the two sides tends to one.
    const auto m = model_by_id("normal-d1");
    const double c = phi(1.0);
    const WeightFunction g(WeightKind::excess, m, c);
    const auto r = theorem1_ratio(m, c, g, ModelEstimator(m, {0.001}), exact_boundary(m, c));
    CHECK_FALSE(r.degenerate);
    CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-2));
  }

  TEST_CASE("monte carlo verifiers are deterministic and validate input") {
    const auto m = model_by_id("normal-d1");
    const KernelSpec k(KernelFamily::gaussian);
    const double c = phi(1.0);
    const WeightFunction g(WeightKind::excess, m, c);
    const BandwidthVector h({0.3});
    const auto a = verify_theorem1_ratio(m, c, g, 2000, h, 77, k);
    const auto b = verify_theorem1_ratio(m, c, g, 2000, h, 77, k);
    CHECK(a.ratio == b.ratio);
    CHECK(a.lhs > 0.0);
    const WeightFunction unit(WeightKind::unit, m, c);
    CHECK_THROWS_AS(verify_corollary1(m, c, unit, 1000, h, 10, 1, k), ArgumentError);
    CHECK_THROWS_AS(verify_corollary1(m, c, g, 1000, h, 40, 1, k), ArgumentError);
    const auto m2 = model_by_id("normal-d2");
    CHECK_THROWS_AS(band_squared_error(m2, 0.05, 1e-9, ModelEstimator(m2, {0.1, 0.0})), ResolutionError);
  }

  TEST_CASE("bias and variance checks report the predicted laws") {
    const auto m = model_by_id("normal-d1");
    const KernelSpec k(KernelFamily::gaussian);
    const double c = phi(2.0);
    const BandwidthVector h({0.2});
    const auto r = verify_bias_variance(m, c, {{2.0}, {-2.0}}, 5000, h, 40, 3, k);
    CHECK(r.values.size() == 80);
    CHECK(r.predicted_bias == doctest::Approx(0.5 * 0.04 * 3.0 * phi(2.0)));
    CHECK(r.predicted_variance == doctest::Approx(c * 0.28209479177387814 / (5000 * 0.2)));
  }
}
