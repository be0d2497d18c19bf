#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lsbw/kde.hpp"
#include "lsbw/kernels.hpp"
#include "lsbw/levelset.hpp"
#include "lsbw/mixtures.hpp"
#include "lsbw/point_set.hpp"

namespace lsbw {

// Objective ----------------------------------------------------------------

//! Q(u; M, a, nu) = u'Mu / (nu!)^2 + a (u_1 ... u_d)^(-1/nu) on u > 0.
struct QProblem {
  Eigen::MatrixXd M;
  double a = 1.0;
  int nu = 2;

  std::size_t dim() const { return static_cast<std::size_t>(M.rows()); }
  //! Shape checks (square, symmetric, a > 0, nu even); throws ArgumentError.
  void validate() const;
};

//! Throws DegenerateCurvatureError unless M is PSD and u'Mu / |u|^2 >=
//! 1e-10 trace(M) > 0 on a 64-direction net of the nonnegative orthant and,
//! for d <= 12, at the exact orthant minimum of the Rayleigh quotient.
void check_orthant_definite(const Eigen::MatrixXd& M);

double q_value(const QProblem& p, const Eigen::VectorXd& u);
Eigen::VectorXd q_gradient(const QProblem& p, const Eigen::VectorXd& u);
Eigen::MatrixXd q_hessian(const QProblem& p, const Eigen::VectorXd& u);

//! Unique minimizer u*. Closed forms for d = 1 and d = 2, the numerical
//! path for d >= 3.
Eigen::VectorXd q_minimize(const QProblem& p);
//! Damped Newton in log-coordinates, any d. Exposed so the closed forms can
//! be checked against it.
Eigen::VectorXd q_minimize_numeric(const QProblem& p);
Eigen::VectorXd q_minimize_closed_form(const QProblem& p);

//! u(M, a, nu) = a^(nu/(d+2nu)) w^(-nu/(d+2nu)) u(M/w, 1, nu).
struct ScaledProblem {
  QProblem problem;     //!< (M/w, 1, nu)
  double factor = 1.0;  //!< maps a solution of `problem` to one of the original
  Eigen::VectorXd map_solution(const Eigen::VectorXd& u) const { return factor * u; }
};
ScaledProblem scaling_transport(const QProblem& p, double w);

// Surface functionals --------------------------------------------------------

enum class FunctionalSource { exact, plugin };

//! A(f) with a_kl = int_M f_(k*nu) f_(l*nu) / |grad f| dH and
//! b(f) = int_M 1 / |grad f| dH.
struct SurfaceFunctionals {
  Eigen::MatrixXd A;
  double b = 0.0;
  FunctionalSource source = FunctionalSource::exact;
  LevelSetBoundary boundary;
};

struct BoundaryOptions {
  std::size_t scan_resolution = 8192;  //!< d = 1
  std::size_t grid_resolution = 0;     //!< d = 2; 0 picks 1024 (exact) or 512 (plugin)
  double grid_margin = 4.0;            //!< plugin grid: sample box + margin * max(h0)
};

//! The true boundary {f = c}: d = 1 by scan-and-bisect over the model box,
//! d = 2 by marching squares on the exact density.
LevelSetBoundary exact_boundary(const MixtureModel& model, double c, const BoundaryOptions& opts = {});

SurfaceFunctionals exact_surface_functionals(const MixtureModel& model, double c, int nu,
                                             const BoundaryOptions& opts = {});

struct Pilots {
  BandwidthVector h0;  //!< level set
  BandwidthVector h1;  //!< gradient
  BandwidthVector h2;  //!< derivatives of order nu
};

//! Normal-scale rule h_j^(r) = C_r sd_j n^(-1/(d+2nu+2r)), r = 0, 1, 2.
Pilots pilot_bandwidths(const PointSet& sample, const KernelSpec& spec);
//! C_r for the given kernel: the univariate normal-reference AMISE constant
//! for estimating the r-th derivative.
double pilot_constant(const KernelSpec& spec, int r);

//! Plug-in functionals over M_hat = {f_hat_h0 = c}; throws EmptyLevelSetError
//! when M_hat is empty.
SurfaceFunctionals estimate_surface_functionals(const PointSet& sample, double c,
                                                const KernelSpec& spec, const Pilots& pilots,
                                                const BoundaryOptions& opts = {});

//! c_hat(tau): the tau-quantile of f_hat_h0(X_i).
double estimate_level(const PointSet& sample, double tau, const KernelSpec& spec);

// Selectors ------------------------------------------------------------------

//! Q problem whose minimizer is h^nu for m~(h): (kappa^2 A, c b |K|^2 / n, nu).
QProblem risk_problem(const SurfaceFunctionals& sf, double c, const KernelSpec& spec, std::size_t n);
BandwidthVector optimal_from_functionals(const SurfaceFunctionals& sf, double c,
                                         const KernelSpec& spec, std::size_t n);

struct OptimalSelection {
  BandwidthVector h;
  SurfaceFunctionals functionals;
  Pilots pilots;
  QProblem problem;
};

OptimalSelection select_optimal(const PointSet& sample, double c, const KernelSpec& spec,
                                const BoundaryOptions& opts = {});
//! Same composition with the true functionals of `model` (no sample needed).
BandwidthVector select_optimal_exact(const MixtureModel& model, double c, const KernelSpec& spec,
                                     std::size_t n, const BoundaryOptions& opts = {});

//! LSCV(h) = int f_hat^2 - (2/n) sum_i f_hat_{-i}(X_i) in closed form.
double lscv_objective(const PointSet& sample, const BandwidthVector& h, const KernelSpec& spec);

struct LscvOptions {
  double box_low = 0.02;   //!< search box relative to the normal-scale start
  double box_high = 20.0;
  int restarts = 3;
  int max_evaluations = 400;
};

struct LscvSelection {
  BandwidthVector h;
  double value = 0.0;
  bool boundary_warning = false;
  int evaluations = 0;
};

LscvSelection select_lscv(const PointSet& sample, const KernelSpec& spec, const LscvOptions& opts = {});

}  // namespace lsbw
