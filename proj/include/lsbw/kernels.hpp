#pragma once

#include <array>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace lsbw {

enum class KernelFamily {
  gaussian,   //!< phi(u), order 2
  gaussian4,  //!< (3 - u^2) phi(u) / 2, order 4
};

//! Univariate symmetric kernel K~ of even order nu, written as P(u) phi(u)
//! for a polynomial P. The product kernel on R^d is prod_j K~(u_j).
//!
//! kappa (the nu-th moment) may be negative: the fourth-order Gaussian-based
//! kernel has kappa_4 = -3. Downstream formulas only use kappa in the bias
//! (with sign) and kappa^2 in the risk.
class KernelSpec {
 public:
  static constexpr int kMaxDerivative = 4;

  //! `truncation_radius` = +inf evaluates exactly; 8 drops terms with
  //! |u| > 8 (tail mass below 1e-14).
  explicit KernelSpec(KernelFamily family,
                      double truncation_radius = std::numeric_limits<double>::infinity());

  KernelFamily family() const { return family_; }
  std::string name() const;
  int order() const { return order_; }
  double kappa() const { return kappa_; }
  //! integral of K~^2
  double l2_norm_sq() const { return l2_norm_sq_; }
  //! k -> integral |K~|^k for k = 3..7
  const std::map<int, double>& lk_norms() const { return lk_norms_; }
  double support_radius() const { return radius_; }
  bool truncated() const { return radius_ < std::numeric_limits<double>::infinity(); }

  //! K~, K~', ..., up to the 4th derivative.
  double eval(double u, int derivative_order = 0) const;

  //! Ascending coefficients of P_q with K~^(q)(u) = P_q(u) exp(-u^2/2).
  std::span<const double> derivative_poly(int q) const;
  //! Coefficients of C with (K~ * K~)(t) = C(t) exp(-t^2/4).
  std::span<const double> convolution_poly() const { return conv_poly_; }
  //! integral of (K~^(r))^2, r = 0..4
  double derivative_l2_norm_sq(int r) const;

  KernelSpec with_truncation(double radius) const { return KernelSpec(family_, radius); }

 private:
  KernelFamily family_;
  int order_ = 2;
  double radius_;
  double kappa_ = 0.0;
  double l2_norm_sq_ = 0.0;
  std::map<int, double> lk_norms_;
  std::array<std::vector<double>, kMaxDerivative + 1> polys_;
  std::vector<double> conv_poly_;
  std::array<double, kMaxDerivative + 1> deriv_l2_{};
};

KernelSpec parse_kernel(const std::string& name);

struct KernelConstants {
  double kappa;
  double l2_norm_sq;
  std::map<int, double> lk_norms;
};

KernelConstants kernel_constants(const KernelSpec& spec);

//! integral u^l K~(u) du by adaptive quadrature on the real line.
double kernel_moment(const KernelSpec& spec, int l);

}  // namespace lsbw
