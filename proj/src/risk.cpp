#include "lsbw/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lsbw/errors.hpp"

namespace lsbw {
namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

std::vector<std::pair<double, double>> box_union(std::vector<std::pair<double, double>> a,
                                                 const std::vector<std::pair<double, double>>& b) {
  for (std::size_t j = 0; j < a.size() && j < b.size(); ++j) {
    a[j].first = std::min(a[j].first, b[j].first);
    a[j].second = std::max(a[j].second, b[j].second);
  }
  return a;
}

}  // namespace

// Weights --------------------------------------------------------------------

WeightFunction::WeightFunction(WeightKind kind, const MixtureModel& model, double c, double q)
    : kind_(kind), model_(&model), c_(c), q_(kind == WeightKind::power ? q : 1.0) {
  if (kind == WeightKind::power && !(q >= 0.0)) throw ArgumentError("weight power must be >= 0");
}

double WeightFunction::p() const {
  switch (kind_) {
    case WeightKind::unit:
    case WeightKind::density:
      return 0.0;
    case WeightKind::excess:
      return 1.0;
    case WeightKind::power:
      return q_;
  }
  return 0.0;
}

double WeightFunction::operator()(std::span<const double> x) const {
  switch (kind_) {
    case WeightKind::unit:
      return 1.0;
    case WeightKind::density:
      return model_->density(x);
    case WeightKind::excess:
      return std::abs(model_->density(x) - c_);
    case WeightKind::power:
      return std::pow(std::abs(model_->density(x) - c_), q_);
  }
  return 0.0;
}

double WeightFunction::boundary_factor(std::span<const double> x) const {
  switch (kind_) {
    case WeightKind::unit:
      return 1.0;
    case WeightKind::density:
      return model_->density(x);
    case WeightKind::excess:
      return model_->gradient(x).norm();
    case WeightKind::power:
      return std::pow(model_->gradient(x).norm(), q_);
  }
  return 0.0;
}

WeightKind parse_weight_kind(const std::string& name, double* q) {
  if (name == "unit") return WeightKind::unit;
  if (name == "density") return WeightKind::density;
  if (name == "excess") return WeightKind::excess;
  if (name.rfind("power:", 0) == 0) {
    try {
      if (q) *q = std::stod(name.substr(6));
    } catch (const std::exception&) {
      throw ArgumentError("bad weight power in '" + name + "'");
    }
    return WeightKind::power;
  }
  throw ArgumentError("unknown weight '" + name + "' (unit, density, excess, power:<q>)");
}

// Estimators -----------------------------------------------------------------

GridField Estimator::grid(const GridSpec& grid) const {
  grid.validate();
  GridField field{grid, std::vector<double>(grid.total())};
  for (std::size_t i = 0; i < field.values.size(); ++i) field.values[i] = value(field.node_point(i));
  return field;
}

std::vector<std::pair<double, double>> KdeEstimator::extent() const {
  std::vector<std::pair<double, double>> box;
  for (std::size_t j = 0; j < kde_.dim(); ++j) {
    const auto col = kde_.sample().column(j);
    const auto [mn, mx] = std::minmax_element(col.begin(), col.end());
    const double pad = 10.0 * kde_.bandwidth()[j];
    box.emplace_back(*mn - pad, *mx + pad);
  }
  return box;
}

ModelEstimator::ModelEstimator(const MixtureModel& model, std::vector<double> shift)
    : model_(model), shift_(std::move(shift)) {
  if (shift_.empty()) shift_.assign(model.dim(), 0.0);
  if (shift_.size() != model.dim()) throw ArgumentError("shift has the wrong dimension");
}

double ModelEstimator::value(std::span<const double> x) const {
  std::vector<double> y(x.begin(), x.end());
  for (std::size_t j = 0; j < y.size(); ++j) y[j] -= shift_[j];
  return model_.density(y);
}

std::vector<std::pair<double, double>> ModelEstimator::extent() const {
  auto box = model_.box(10.0);
  for (std::size_t j = 0; j < box.size(); ++j) {
    box[j].first += shift_[j];
    box[j].second += shift_[j];
  }
  return box;
}

// Symmetric difference --------------------------------------------------------

SymDiffResult sym_diff_error_d1(const std::function<double(double)>& f,
                                const std::function<double(double)>& f_hat, double c,
                                const std::function<double(double)>& g, double lo, double hi,
                                std::size_t scan_resolution) {
  std::vector<double> cuts = {lo, hi};
  for (const auto& cr : extract_d1(f, c, lo, hi, scan_resolution).crossings) cuts.push_back(cr.x);
  for (const auto& cr : extract_d1(f_hat, c, lo, hi, scan_resolution).crossings) cuts.push_back(cr.x);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  SymDiffResult r;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    const double m = 0.5 * (a + b);
    if ((f(m) >= c) == (f_hat(m) >= c)) continue;
    r.value += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, a, b, 15, 1e-12);
  }
  return r;
}

GridSpec cell_centered_grid(const std::vector<std::pair<double, double>>& box, std::size_t resolution) {
  if (resolution < 2) throw ArgumentError("grid resolution must be at least 2");
  GridSpec grid;
  for (const auto& [lo, hi] : box) {
    const double cell = (hi - lo) / static_cast<double>(resolution);
    grid.bounds.emplace_back(lo + 0.5 * cell, hi - 0.5 * cell);
    grid.resolution.push_back(resolution);
  }
  return grid;
}

SymDiffResult sym_diff_error_grid(const GridField& f, const GridField& f_hat, double c,
                                  const GridField* g) {
  if (f.values.size() != f_hat.values.size() || (g && g->values.size() != f.values.size()))
    throw ArgumentError("fields are on different lattices");
  double cell = 1.0;
  for (std::size_t j = 0; j < f.grid.dim(); ++j) cell *= f.grid.step(j);
  SymDiffResult r;
  std::size_t inside = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const bool in_f = f.values[i] >= c;
    inside += in_f ? 1 : 0;
    if (in_f != (f_hat.values[i] >= c)) sum += g ? g->values[i] : 1.0;
  }
  r.value = sum * cell;
  r.resolution_warning = inside < 16;
  return r;
}

SymDiffResult sym_diff_error(const MixtureModel& model, double c, const Estimator& estimate,
                             const WeightFunction& g, const SymDiffOptions& opts) {
  if (estimate.dim() != model.dim()) throw ArgumentError("estimate and model dimensions differ");
  if (model.dim() == 1) {
    const auto box = box_union(model.box(10.0), estimate.extent()).front();
    auto f = [&](double x) { return model.density(std::span<const double>(&x, 1)); };
    auto fh = [&](double x) { return estimate.value(std::span<const double>(&x, 1)); };
    auto gw = [&](double x) { return g(std::span<const double>(&x, 1)); };
    return sym_diff_error_d1(f, fh, c, gw, box.first, box.second, opts.scan_resolution);
  }
  if (model.dim() != 2) throw ArgumentError("symmetric difference errors are computed for d = 1 and d = 2");
  const GridSpec grid = cell_centered_grid(model.box(5.0), opts.grid_resolution);
  GridField f{grid, std::vector<double>(grid.total())};
  GridField gw{grid, std::vector<double>(grid.total())};
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const auto x = f.node_point(i);
    f.values[i] = model.density(x);
    gw.values[i] = g(x);
  }
  return sym_diff_error_grid(f, estimate.grid(grid), c, &gw);
}

// Risk -----------------------------------------------------------------------

double gamma_fn(double u) {
  if (!(u >= 0.0)) throw ArgumentError("gamma_fn needs u >= 0");
  const double phi = std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
  return 2.0 * phi + u * std::erf(u / std::numbers::sqrt2);
}

double normal_abs_moment(double beta, double s, double power) {
  if (!(s > 0.0) || !(power >= 0.0)) throw ArgumentError("normal_abs_moment needs s > 0, power >= 0");
  const double z0 = beta / s;
  auto integrand = [&](double z) {
    return std::pow(std::abs(s * z - beta), power) * std::exp(-0.5 * z * z) /
           std::sqrt(2.0 * std::numbers::pi);
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  const double inf = std::numeric_limits<double>::infinity();
  return integrator.integrate(integrand, z0, inf) + integrator.integrate(integrand, -inf, z0);
}

RiskForm parse_risk_form(const std::string& name) {
  if (name == "m-tilde") return RiskForm::m_tilde;
  if (name == "l1-exact") return RiskForm::l1_exact;
  if (name == "l1-upper") return RiskForm::l1_upper;
  throw ArgumentError("unknown risk form '" + name + "'");
}

double variance_scale(double c, const KernelSpec& spec, const BandwidthVector& h, std::size_t n) {
  const double d = static_cast<double>(h.dim());
  return std::sqrt(c * std::pow(spec.l2_norm_sq(), d) / (static_cast<double>(n) * h.product()));
}

double bias_term(const MixtureModel& model, const KernelSpec& spec, const BandwidthVector& h,
                 std::span<const double> x) {
  const int nu = spec.order();
  double s = 0.0;
  for (std::size_t k = 0; k < h.dim(); ++k) s += std::pow(h[k], nu) * model.pure_partial(x, k, nu);
  return spec.kappa() / factorial(nu) * s;
}

RiskReport assemble_risk(const std::vector<RiskNode>& nodes, double s_n, RiskForm form) {
  const double root = std::sqrt(2.0 / std::numbers::pi);
  double bias = 0.0, variance = 0.0, total = 0.0;
  for (const auto& node : nodes) {
    if (!(node.grad_norm > 0.0)) continue;
    const double w = node.weight / node.grad_norm;
    switch (form) {
      case RiskForm::m_tilde:
        variance += w * s_n * s_n;
        bias += w * node.beta * node.beta;
        break;
      case RiskForm::l1_exact:
        variance += w * node.g * s_n * root;
        total += w * node.g * s_n * gamma_fn(std::abs(node.beta) / s_n);
        break;
      case RiskForm::l1_upper:
        variance += w * node.g * s_n * root;
        bias += w * node.g * std::abs(node.beta);
        break;
    }
  }
  RiskReport r;
  r.method = RiskMethod::closed_form;
  if (form == RiskForm::l1_exact) {
    r.value = total;
    bias = total - variance;
  } else {
    r.value = bias + variance;
  }
  r.components["bias-term"] = bias;
  r.components["variance-term"] = variance;
  return r;
}

std::vector<RiskNode> risk_nodes(const MixtureModel& model, const LevelSetBoundary& boundary,
                                 const KernelSpec& spec, const BandwidthVector& h,
                                 const WeightFunction* g) {
  if (h.dim() != model.dim()) throw ArgumentError("bandwidth and model dimensions differ");
  std::vector<RiskNode> nodes;
  for (const auto& bn : boundary_nodes(boundary)) {
    const std::span<const double> x(bn.x.data(), model.dim());
    nodes.push_back({bn.weight, model.gradient(x).norm(), bias_term(model, spec, h, x), g ? (*g)(x) : 1.0});
  }
  return nodes;
}

RiskReport theoretical_risk(const MixtureModel& model, double c, const BandwidthVector& h,
                            const KernelSpec& spec, std::size_t n, RiskForm form,
                            const WeightFunction* g, const BoundaryOptions& opts) {
  if (n == 0) throw ArgumentError("sample size must be positive");
  if (g && g->p() != 0.0 && form != RiskForm::m_tilde)
    throw ArgumentError("the L1 risk forms take a weight with p = 0");
  const auto boundary = exact_boundary(model, c, opts);
  if (boundary.empty()) throw EmptyLevelSetError("the level set boundary {f = c} is empty");
  auto report = assemble_risk(risk_nodes(model, boundary, spec, h, g), variance_scale(c, spec, h, n), form);
  if (model.dim() == 2) report.grid_resolution = opts.grid_resolution ? opts.grid_resolution : 1024;
  return report;
}

}  // namespace lsbw
