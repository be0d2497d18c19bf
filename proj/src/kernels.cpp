#include "lsbw/kernels.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include <boost/math/quadrature/sinh_sinh.hpp>

#include "lsbw/errors.hpp"

namespace lsbw {
namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

double horner(const std::vector<double>& p, double u) {
  double s = 0.0;
  for (std::size_t k = p.size(); k-- > 0;) s = s * u + p[k];
  return s;
}

// (P phi)' = (P' - u P) phi
std::vector<double> differentiate(const std::vector<double>& p) {
  std::vector<double> out(p.size() + 1, 0.0);
  for (std::size_t k = 1; k < p.size(); ++k) out[k - 1] += static_cast<double>(k) * p[k];
  for (std::size_t k = 0; k < p.size(); ++k) out[k + 1] -= p[k];
  while (out.size() > 1 && out.back() == 0.0) out.pop_back();
  return out;
}

double integrate_line(const std::function<double(double)>& fn, const char* what) {
  boost::math::quadrature::sinh_sinh<double> integrator;
  double err = 0.0;
  double l1 = 0.0;
  // Every integrand is polynomial times Gaussian; beyond |u| = 40 it is zero
  // in double precision but the polynomial alone can overflow.
  auto guarded = [&fn](double u) { return std::abs(u) > 40.0 ? 0.0 : fn(u); };
  const double value = integrator.integrate(guarded, 1e-13, &err, &l1);
  if (!std::isfinite(value) || err > 1e-9 * std::max(1.0, l1))
    throw InternalError(std::string("kernel quadrature did not converge: ") + what);
  return value;
}

}  // namespace

KernelSpec::KernelSpec(KernelFamily family, double truncation_radius)
    : family_(family), radius_(truncation_radius) {
  if (!(truncation_radius > 0.0)) throw ArgumentError("truncation radius must be positive");
  switch (family) {
    case KernelFamily::gaussian:
      order_ = 2;
      polys_[0] = {kInvSqrt2Pi};
      conv_poly_ = {0.5 / std::sqrt(std::numbers::pi)};
      break;
    case KernelFamily::gaussian4:
      order_ = 4;
      polys_[0] = {1.5 * kInvSqrt2Pi, 0.0, -0.5 * kInvSqrt2Pi};
      // (K4 * K4)(t) = exp(-t^2/4) / (8 sqrt(pi)) * (27/4 - 7 t^2/4 + t^4/16)
      {
        const double s = 1.0 / (8.0 * std::sqrt(std::numbers::pi));
        conv_poly_ = {6.75 * s, 0.0, -1.75 * s, 0.0, 0.0625 * s};
      }
      break;
  }
  for (int q = 1; q <= kMaxDerivative; ++q) polys_[q] = differentiate(polys_[q - 1]);

  const auto& base = polys_[0];
  auto k0 = [&base](double u) { return horner(base, u) * std::exp(-0.5 * u * u); };
  kappa_ = integrate_line([&](double u) { return std::pow(u, order_) * k0(u); }, "kappa");
  l2_norm_sq_ = integrate_line([&](double u) { return k0(u) * k0(u); }, "L2 norm");
  for (int k = 3; k <= 7; ++k)
    lk_norms_[k] = integrate_line([&](double u) { return std::pow(std::abs(k0(u)), k); }, "Lk norm");
  for (int r = 0; r <= kMaxDerivative; ++r) {
    const auto& p = polys_[r];
    deriv_l2_[r] = integrate_line(
        [&p](double u) {
          const double v = horner(p, u) * std::exp(-0.5 * u * u);
          return v * v;
        },
        "derivative L2 norm");
  }
}

std::string KernelSpec::name() const {
  return family_ == KernelFamily::gaussian ? "gaussian" : "gaussian4";
}

double KernelSpec::eval(double u, int derivative_order) const {
  if (derivative_order < 0 || derivative_order > kMaxDerivative)
    throw ArgumentError("kernel derivative order must be in 0..4");
  if (std::abs(u) > radius_) return 0.0;
  return horner(polys_[derivative_order], u) * std::exp(-0.5 * u * u);
}

std::span<const double> KernelSpec::derivative_poly(int q) const {
  if (q < 0 || q > kMaxDerivative) throw ArgumentError("kernel derivative order must be in 0..4");
  return polys_[q];
}

double KernelSpec::derivative_l2_norm_sq(int r) const {
  if (r < 0 || r > kMaxDerivative) throw ArgumentError("kernel derivative order must be in 0..4");
  return deriv_l2_[r];
}

KernelSpec parse_kernel(const std::string& name) {
  if (name == "gaussian") return KernelSpec(KernelFamily::gaussian);
  if (name == "gaussian4") return KernelSpec(KernelFamily::gaussian4);
  throw ArgumentError("unknown kernel '" + name + "' (expected gaussian or gaussian4)");
}

KernelConstants kernel_constants(const KernelSpec& spec) {
  return {spec.kappa(), spec.l2_norm_sq(), spec.lk_norms()};
}

double kernel_moment(const KernelSpec& spec, int l) {
  const auto poly = spec.derivative_poly(0);
  const std::vector<double> p(poly.begin(), poly.end());
  return integrate_line(
      [&](double u) { return std::pow(u, l) * horner(p, u) * std::exp(-0.5 * u * u); }, "moment");
}

}  // namespace lsbw
