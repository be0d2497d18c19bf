#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "lsbw/kernels.hpp"
#include "lsbw/simd.hpp"

using namespace lsbw;

namespace {

std::vector<double> random_values(std::size_t n, double lo, double hi, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

double rel_gap(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace

TEST_SUITE("simd") {
  TEST_CASE("scalar kernel factors match a direct loop") {
    const KernelSpec k4(KernelFamily::gaussian4);
    const auto data = random_values(37, -3.0, 3.0, 1);
    std::vector<double> out(data.size());
    for (int q = 0; q <= 4; ++q) {
      simd::scalar_table().kernel_factors(data, 0.3, 1.0 / 0.7, k4.derivative_poly(q), out);
      for (std::size_t i = 0; i < data.size(); ++i)
        CHECK(out[i] == doctest::Approx(k4.eval((0.3 - data[i]) / 0.7, q)).epsilon(1e-13));
    }
  }

  TEST_CASE("avx2 kernels agree with the scalar reference") {
    if (!simd::avx2_supported()) {
      MESSAGE("AVX2 not available; equivalence test skipped");
      return;
    }
    const auto& s = simd::scalar_table();
    const auto& v = simd::avx2_table();
    const KernelSpec k(KernelFamily::gaussian4);

    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 9u, 15u, 16u, 17u, 1001u}) {
      CAPTURE(n);
      const auto data = random_values(n, -40.0, 40.0, 7 + static_cast<unsigned>(n));
      std::vector<double> a(n), b(n);
      for (int q = 0; q <= 4; ++q) {
        s.kernel_factors(data, 0.25, 0.9, k.derivative_poly(q), a);
        v.kernel_factors(data, 0.25, 0.9, k.derivative_poly(q), b);
        // Horner error scales with sum |c_k| |u|^k, and exp(-u^2/2) amplifies
        // an ulp of its argument by u^2/2
        const auto poly = k.derivative_poly(q);
        for (std::size_t i = 0; i < n; ++i) {
          const double u = (0.25 - data[i]) * 0.9;
          double mag = 0.0;
          for (std::size_t c = poly.size(); c-- > 0;) mag = mag * std::abs(u) + std::abs(poly[c]);
          CHECK(std::abs(a[i] - b[i]) <= 1e-15 * (8.0 + u * u) * mag * std::exp(-0.5 * u * u) + 1e-300);
        }
      }
      const auto x = random_values(n, -1.0, 1.0, 11);
      const auto y = random_values(n, 0.0, 1.0, 12);
      CHECK(rel_gap(s.sum(x), v.sum(x)) <= 1e-12 * std::max<std::size_t>(n, 1) + (n == 0 ? 1.0 : 0.0));
      CHECK(std::abs(s.dot(x, y) - v.dot(x, y)) <= 1e-13 * static_cast<double>(n + 1));
      std::vector<double> acc1 = x, acc2 = x;
      s.multiply(acc1, y);
      v.multiply(acc2, y);
      for (std::size_t i = 0; i < n; ++i) CHECK(acc1[i] == acc2[i]);
      auto e1 = random_values(n, -745.0, 700.0, 13), e2 = e1;
      s.exp_inplace(e1);
      v.exp_inplace(e2);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(e1[i] - e2[i]) <= 4e-15 * e1[i] + 1e-300);
    }
  }

  TEST_CASE("avx2 pair rows agree with the scalar reference") {
    if (!simd::avx2_supported()) return;
    const KernelSpec g(KernelFamily::gaussian), g4(KernelFamily::gaussian4);
    for (std::size_t d : {1u, 2u, 3u}) {
      const std::size_t n = 53;
      std::vector<std::vector<double>> cols;
      std::vector<const double*> ptrs;
      std::vector<double> inv_h;
      for (std::size_t j = 0; j < d; ++j) {
        cols.push_back(random_values(n, -2.0, 2.0, 100 + static_cast<unsigned>(j)));
        inv_h.push_back(1.0 / (0.3 + 0.1 * static_cast<double>(j)));
      }
      for (auto& c : cols) ptrs.push_back(c.data());
      for (const KernelSpec* k : {&g, &g4}) {
        for (std::size_t i = 0; i + 1 < n; i += 5) {
          const auto a = simd::scalar_table().pair_row(ptrs, n, i, inv_h, k->convolution_poly(), k->derivative_poly(0));
          const auto b = simd::avx2_table().pair_row(ptrs, n, i, inv_h, k->convolution_poly(), k->derivative_poly(0));
          CHECK(a.conv == doctest::Approx(b.conv).epsilon(1e-13));
          CHECK(a.kern == doctest::Approx(b.kern).epsilon(1e-13));
        }
      }
    }
  }

  TEST_CASE("pair row sums match a brute-force double loop") {
    const KernelSpec g(KernelFamily::gaussian);
    const std::size_t n = 19;
    const auto c0 = random_values(n, -1.0, 1.0, 3), c1 = random_values(n, -1.0, 1.0, 4);
    const std::vector<const double*> ptrs = {c0.data(), c1.data()};
    const std::vector<double> inv_h = {2.0, 1.5};
    const double pi = 3.14159265358979323846;
    for (const auto* t : {&simd::scalar_table(), &simd::active()}) {
      const auto r = t->pair_row(ptrs, n, 4, inv_h, g.convolution_poly(), g.derivative_poly(0));
      double conv = 0.0, kern = 0.0;
      for (std::size_t j = 5; j < n; ++j) {
        const double t0 = (c0[4] - c0[j]) * inv_h[0], t1 = (c1[4] - c1[j]) * inv_h[1];
        const double s = t0 * t0 + t1 * t1;
        conv += std::exp(-s / 4.0) / (4.0 * pi);
        kern += std::exp(-s / 2.0) / (2.0 * pi);
      }
      CHECK(r.conv == doctest::Approx(conv).epsilon(1e-13));
      CHECK(r.kern == doctest::Approx(kern).epsilon(1e-13));
    }
  }

  TEST_CASE("active backend is reported") {
    const char* name = simd::backend_name(simd::active().backend);
    CHECK((std::string(name) == "scalar" || std::string(name) == "avx2"));
  }
}
