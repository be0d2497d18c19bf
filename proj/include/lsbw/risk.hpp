#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lsbw/bandwidth.hpp"
#include "lsbw/kde.hpp"
#include "lsbw/levelset.hpp"
#include "lsbw/mixtures.hpp"

namespace lsbw {

// Weights --------------------------------------------------------------------

enum class WeightKind {
  unit,     //!< g = 1, p = 0
  density,  //!< g = f, p = 0
  excess,   //!< g = |f - c|, p = 1
  power,    //!< g = |f - c|^q, p = q
};

//! A weight g bound to a model and level, with its boundary order p and
//! the limit g^(p) of g(x + s n(x)) / |s|^p on {f = c}.
class WeightFunction {
 public:
  WeightFunction(WeightKind kind, const MixtureModel& model, double c, double q = 1.0);

  WeightKind kind() const { return kind_; }
  double p() const;
  double operator()(std::span<const double> x) const;
  //! g^(p) at a boundary point x.
  double boundary_factor(std::span<const double> x) const;

 private:
  WeightKind kind_;
  const MixtureModel* model_;
  double c_;
  double q_;
};

//! "unit", "density", "excess" or "power:<q>".
WeightKind parse_weight_kind(const std::string& name, double* q = nullptr);

// Estimates ------------------------------------------------------------------

//! Anything that can stand in for f_hat in the error functionals.
class Estimator {
 public:
  virtual ~Estimator() = default;
  virtual std::size_t dim() const = 0;
  virtual double value(std::span<const double> x) const = 0;
  virtual GridField grid(const GridSpec& grid) const;
  //! A box outside of which the estimate is negligible.
  virtual std::vector<std::pair<double, double>> extent() const = 0;
};

class KdeEstimator final : public Estimator {
 public:
  explicit KdeEstimator(const Kde& kde) : kde_(kde) {}
  std::size_t dim() const override { return kde_.dim(); }
  double value(std::span<const double> x) const override { return kde_.value(x); }
  GridField grid(const GridSpec& grid) const override { return kde_.grid(grid); }
  std::vector<std::pair<double, double>> extent() const override;

 private:
  const Kde& kde_;
};

//! The model density translated by `shift` (the exact density for a zero shift).
class ModelEstimator final : public Estimator {
 public:
  explicit ModelEstimator(const MixtureModel& model, std::vector<double> shift = {});
  std::size_t dim() const override { return model_.dim(); }
  double value(std::span<const double> x) const override;
  std::vector<std::pair<double, double>> extent() const override;

 private:
  const MixtureModel& model_;
  std::vector<double> shift_;
};

// Symmetric difference --------------------------------------------------------

struct SymDiffOptions {
  std::size_t scan_resolution = 8192;  //!< d = 1 root scan
  std::size_t grid_resolution = 1024;  //!< d = 2 cells per axis
};

struct SymDiffResult {
  double value = 0.0;
  bool resolution_warning = false;
};

//! d = 1: int over {f >= c} xor {f_hat >= c} of g, with both sets resolved to
//! their exact crossings on [lo, hi] and g integrated by adaptive
//! Gauss-Kronrod on every piece of the symmetric difference.
SymDiffResult sym_diff_error_d1(const std::function<double(double)>& f,
                                const std::function<double(double)>& f_hat, double c,
                                const std::function<double(double)>& g, double lo, double hi,
                                std::size_t scan_resolution = 8192);

//! Midpoint rule with lattice nodes as cell centers: sum of g * cell area
//! over nodes where f and f_hat sit on different sides of c. An empty `g`
//! means g = 1.
SymDiffResult sym_diff_error_grid(const GridField& f, const GridField& f_hat, double c,
                                  const GridField* g = nullptr);

//! Cell-centered lattice with `resolution` cells per axis on `box`.
GridSpec cell_centered_grid(const std::vector<std::pair<double, double>>& box, std::size_t resolution);

SymDiffResult sym_diff_error(const MixtureModel& model, double c, const Estimator& estimate,
                             const WeightFunction& g, const SymDiffOptions& opts = {});

// Risk -----------------------------------------------------------------------

//! gamma(u) = E|Z - u| = 2 phi(u) + u (2 Phi(u) - 1), u >= 0.
double gamma_fn(double u);

//! E|s Z - beta|^power for Z ~ N(0, 1) by quadrature.
double normal_abs_moment(double beta, double s, double power);

enum class RiskForm { m_tilde, l1_exact, l1_upper };
enum class RiskMethod { grid_integral, closed_form, monte_carlo };

RiskForm parse_risk_form(const std::string& name);

struct RiskReport {
  double value = 0.0;
  std::map<std::string, double> components;  //!< "bias-term", "variance-term"
  RiskMethod method = RiskMethod::closed_form;
  std::size_t reps = 0;
  std::size_t grid_resolution = 0;
};

//! One quadrature node of int_M ... dH on the true boundary.
struct RiskNode {
  double weight = 0.0;     //!< dH mass
  double grad_norm = 0.0;  //!< |grad f|
  double beta = 0.0;       //!< beta_h(x)
  double g = 1.0;          //!< weight function value
};

//! s_n = sqrt(c |K|^2 / (n prod h)).
double variance_scale(double c, const KernelSpec& spec, const BandwidthVector& h, std::size_t n);
//! beta_h(x) = kappa / nu! sum_k h_k^nu f_(k*nu)(x).
double bias_term(const MixtureModel& model, const KernelSpec& spec, const BandwidthVector& h,
                 std::span<const double> x);

RiskReport assemble_risk(const std::vector<RiskNode>& nodes, double s_n, RiskForm form);

std::vector<RiskNode> risk_nodes(const MixtureModel& model, const LevelSetBoundary& boundary,
                                 const KernelSpec& spec, const BandwidthVector& h,
                                 const WeightFunction* g = nullptr);

RiskReport theoretical_risk(const MixtureModel& model, double c, const BandwidthVector& h,
                            const KernelSpec& spec, std::size_t n, RiskForm form,
                            const WeightFunction* g = nullptr, const BoundaryOptions& opts = {});

// Monte Carlo checks ---------------------------------------------------------

struct VerifyOptions {
  //! KDE evaluations drop kernel terms beyond this many bandwidths
  //! (tail mass below 1e-14); infinity evaluates exactly.
  double truncation = 8.0;
  SymDiffOptions sym_diff;
  BoundaryOptions boundary;
};

struct Theorem1Check {
  double ratio = 1.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool degenerate = false;
  bool scaling_warning = false;
};

//! lambda_g(L xor L_hat) divided by
//! 1/(1+p) int_M g^(p) / |grad f|^(p+1) |f_hat - f|^(p+1) dH for one
//! estimate. Both sides zero gives ratio 1 with the degenerate flag.
Theorem1Check theorem1_ratio(const MixtureModel& model, double c, const WeightFunction& g,
                             const Estimator& estimate, const LevelSetBoundary& true_boundary,
                             const SymDiffOptions& opts = {});

Theorem1Check verify_theorem1_ratio(const MixtureModel& model, double c, const WeightFunction& g,
                                    std::size_t n, const BandwidthVector& h, std::uint64_t seed,
                                    const KernelSpec& spec, const VerifyOptions& opts = {});

struct Corollary1Check {
  double mc_mean = 0.0;
  double formula_value = 0.0;
  double ratio = 0.0;
  std::vector<double> values;
};

Corollary1Check verify_corollary1(const MixtureModel& model, double c, const WeightFunction& g,
                                  std::size_t n, const BandwidthVector& h, std::size_t reps,
                                  std::uint64_t seed, const KernelSpec& spec,
                                  const VerifyOptions& opts = {});

struct Proposition1Point {
  double delta = 0.0;
  double numerator = 0.0;    //!< mean lambda_g(L xor L_hat), g = |f - c|
  double denominator = 0.0;  //!< mean int_{I(delta)} (f_hat - f)^2
  double ratio = 0.0;        //!< 2 delta numerator / denominator
};

//! int over I(delta) = f^-1([c - delta/2, c + delta/2]) of (f_hat - f)^2.
//! Throws ResolutionError when I(delta) is empty.
double band_squared_error(const MixtureModel& model, double c, double delta, const Estimator& estimate,
                          const SymDiffOptions& opts = {});

std::vector<Proposition1Point> verify_proposition1(const MixtureModel& model, double c,
                                                   std::size_t n, const BandwidthVector& h,
                                                   const std::vector<double>& deltas,
                                                   std::size_t reps, std::uint64_t seed,
                                                   const KernelSpec& spec,
                                                   const VerifyOptions& opts = {});

struct BiasVarianceCheck {
  double empirical_bias = 0.0;
  double predicted_bias = 0.0;      //!< beta_h(x), averaged over the points
  double empirical_variance = 0.0;
  double predicted_variance = 0.0;  //!< s_n^2
  std::vector<double> values;       //!< f_hat(x) - f(x), rep-major
};

//! Pools f_hat(x) - f(x) over `points` (all on {f = c}) and `reps` samples.
BiasVarianceCheck verify_bias_variance(const MixtureModel& model, double c,
                                       const std::vector<std::vector<double>>& points,
                                       std::size_t n, const BandwidthVector& h, std::size_t reps,
                                       std::uint64_t seed, const KernelSpec& spec,
                                       const VerifyOptions& opts = {});

}  // namespace lsbw
