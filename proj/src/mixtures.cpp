#include "lsbw/mixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "lsbw/errors.hpp"

namespace lsbw {

MixtureModel::MixtureModel(std::vector<MixtureComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw ArgumentError("mixture needs at least one component");
  dim_ = static_cast<std::size_t>(components_.front().mean.size());
  if (dim_ == 0) throw ArgumentError("mixture dimension must be positive");

  double wsum = 0.0;
  for (const auto& comp : components_) {
    if (!(comp.weight > 0.0)) throw ArgumentError("mixture weights must be positive");
    if (static_cast<std::size_t>(comp.mean.size()) != dim_ ||
        static_cast<std::size_t>(comp.cov.rows()) != dim_ ||
        static_cast<std::size_t>(comp.cov.cols()) != dim_)
      throw ArgumentError("mixture component dimensions disagree");
    if (!comp.cov.isApprox(comp.cov.transpose(), 1e-12))
      throw ArgumentError("covariance must be symmetric");
    wsum += comp.weight;
  }
  if (std::abs(wsum - 1.0) > 1e-12) throw ArgumentError("mixture weights must sum to 1");

  const double d = static_cast<double>(dim_);
  for (const auto& comp : components_) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(comp.cov);
    if (eig.eigenvalues().minCoeff() <= 0.0)
      throw ArgumentError("covariance must be positive definite");
    Eigen::LLT<Eigen::MatrixXd> llt(comp.cov);
    Prepared p;
    p.chol = llt.matrixL();
    const double log_det = 2.0 * p.chol.diagonal().array().log().sum();
    p.log_weight_norm = std::log(comp.weight) - 0.5 * d * std::log(2.0 * std::numbers::pi) -
                        0.5 * log_det;
    p.mean.assign(comp.mean.data(), comp.mean.data() + dim_);
    const Eigen::MatrixXd prec = llt.solve(Eigen::MatrixXd::Identity(dim_, dim_));
    p.precision.resize(dim_ * dim_);
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t c = 0; c < dim_; ++c) p.precision[r * dim_ + c] = 0.5 * (prec(r, c) + prec(c, r));
    prepared_.push_back(std::move(p));
  }
}

namespace {

void check_dim(std::span<const double> x, std::size_t dim) {
  if (x.size() != dim) throw ArgumentError("point dimension does not match the model");
}

}  // namespace

double MixtureModel::density(std::span<const double> x) const {
  check_dim(x, dim_);
  double f = 0.0;
  double diff[8];
  std::vector<double> heap;
  double* z = diff;
  if (dim_ > 8) {
    heap.resize(dim_);
    z = heap.data();
  }
  for (const auto& p : prepared_) {
    for (std::size_t i = 0; i < dim_; ++i) z[i] = x[i] - p.mean[i];
    double q = 0.0;
    for (std::size_t r = 0; r < dim_; ++r) {
      double row = 0.0;
      for (std::size_t c = 0; c < dim_; ++c) row += p.precision[r * dim_ + c] * z[c];
      q += z[r] * row;
    }
    f += std::exp(p.log_weight_norm - 0.5 * q);
  }
  return f;
}

double MixtureModel::partial(std::span<const double> x, std::span<const int> index) const {
  check_dim(x, dim_);
  const std::size_t q = index.size();
  if (q > 4) throw ArgumentError("partial derivatives are supported up to order 4");
  for (int i : index)
    if (i < 0 || static_cast<std::size_t>(i) >= dim_)
      throw ArgumentError("derivative index out of range");
  if (q == 0) return density(x);

  std::vector<double> z(dim_);
  std::vector<double> v(dim_);
  double total = 0.0;
  for (const auto& p : prepared_) {
    for (std::size_t i = 0; i < dim_; ++i) z[i] = x[i] - p.mean[i];
    double quad = 0.0;
    for (std::size_t r = 0; r < dim_; ++r) {
      double row = 0.0;
      for (std::size_t c = 0; c < dim_; ++c) row += p.precision[r * dim_ + c] * z[c];
      v[r] = row;
      quad += z[r] * row;
    }
    const double phi = std::exp(p.log_weight_norm - 0.5 * quad);
    auto P = [&](int a, int b) { return p.precision[static_cast<std::size_t>(a) * dim_ + b]; };
    auto V = [&](int a) { return v[static_cast<std::size_t>(a)]; };
    // Multivariate Hermite polynomials in v = P (x - mu).
    double h = 0.0;
    switch (q) {
      case 1: {
        h = -V(index[0]);
        break;
      }
      case 2: {
        const int a = index[0], b = index[1];
        h = V(a) * V(b) - P(a, b);
        break;
      }
      case 3: {
        const int a = index[0], b = index[1], c = index[2];
        h = -V(a) * V(b) * V(c) + P(a, b) * V(c) + P(a, c) * V(b) + P(b, c) * V(a);
        break;
      }
      case 4: {
        const int a = index[0], b = index[1], c = index[2], d = index[3];
        h = V(a) * V(b) * V(c) * V(d) - P(a, b) * V(c) * V(d) - P(a, c) * V(b) * V(d) -
            P(a, d) * V(b) * V(c) - P(b, c) * V(a) * V(d) - P(b, d) * V(a) * V(c) -
            P(c, d) * V(a) * V(b) + P(a, b) * P(c, d) + P(a, c) * P(b, d) + P(a, d) * P(b, c);
        break;
      }
      default:
        break;
    }
    total += h * phi;
  }
  return total;
}

Eigen::VectorXd MixtureModel::gradient(std::span<const double> x) const {
  Eigen::VectorXd g(dim_);
  for (std::size_t k = 0; k < dim_; ++k) {
    const int idx[1] = {static_cast<int>(k)};
    g[static_cast<Eigen::Index>(k)] = partial(x, idx);
  }
  return g;
}

double MixtureModel::pure_partial(std::span<const double> x, std::size_t k, int r) const {
  if (r < 0 || r > 4) throw ArgumentError("pure partial order must be in 0..4");
  const int idx[4] = {static_cast<int>(k), static_cast<int>(k), static_cast<int>(k),
                      static_cast<int>(k)};
  return partial(x, std::span<const int>(idx, static_cast<std::size_t>(r)));
}

PointSet MixtureModel::sample(std::size_t n, std::uint64_t seed) const {
  if (n == 0) throw ArgumentError("sample size must be at least 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& comp : components_) cumulative.push_back(acc += comp.weight);
  cumulative.back() = 1.0;

  PointSet out(n, dim_);
  std::vector<double> z(dim_);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t k = 0;
    if (components_.size() > 1) {
      const double u = unif(rng);
      k = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                   cumulative.begin());
      k = std::min(k, components_.size() - 1);
    }
    for (auto& zi : z) zi = normal(rng);
    const auto& p = prepared_[k];
    for (std::size_t r = 0; r < dim_; ++r) {
      double s = p.mean[r];
      for (std::size_t c = 0; c <= r; ++c) s += p.chol(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * z[c];
      out(i, r) = s;
    }
  }
  return out;
}

Eigen::VectorXd MixtureModel::mean() const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_));
  for (const auto& comp : components_) m += comp.weight * comp.mean;
  return m;
}

std::vector<std::pair<double, double>> MixtureModel::box(double k) const {
  std::vector<std::pair<double, double>> b(dim_, {INFINITY, -INFINITY});
  for (const auto& comp : components_) {
    for (std::size_t j = 0; j < dim_; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double sd = std::sqrt(comp.cov(jj, jj));
      b[j].first = std::min(b[j].first, comp.mean[jj] - k * sd);
      b[j].second = std::max(b[j].second, comp.mean[jj] + k * sd);
    }
  }
  return b;
}

// HDR level -------------------------------------------------------------

namespace {

std::vector<double> sorted_density_draws(const MixtureModel& model, std::size_t draws,
                                         std::uint64_t seed) {
  const PointSet pts = model.sample(draws, seed);
  std::vector<double> values(draws);
  std::vector<double> x(model.dim());
  for (std::size_t i = 0; i < draws; ++i) {
    for (std::size_t j = 0; j < model.dim(); ++j) x[j] = pts(i, j);
    values[i] = model.density(x);
  }
  std::sort(values.begin(), values.end());
  return values;
}

double coverage_of(const std::vector<double>& sorted, double y) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), y);
  return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
}

}  // namespace

double hdr_coverage(const MixtureModel& model, double y, std::size_t draws, std::uint64_t seed) {
  if (draws == 0) throw ArgumentError("coverage needs at least one draw");
  return coverage_of(sorted_density_draws(model, draws, seed), y);
}

Level hdr_level(const MixtureModel& model, double tau, const HdrOptions& opts) {
  if (!(tau > 0.0 && tau < 1.0)) throw ArgumentError("tau must lie in (0, 1)");
  if (opts.draws < 1000) throw ArgumentError("hdr_level needs at least 1000 draws");
  const auto sorted = sorted_density_draws(model, opts.draws, opts.seed);
  const double target = 1.0 - tau;

  // coverage(lo) > target >= coverage(hi)
  double lo = 0.0;
  double hi = sorted.back() * (1.0 + 1e-12) + 1e-300;
  if (!(coverage_of(sorted, lo) > target) || coverage_of(sorted, hi) > target)
    throw InternalError("hdr_level: bisection interval does not bracket the level");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (coverage_of(sorted, mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  return Level{hi, tau};
}

}  // namespace lsbw
