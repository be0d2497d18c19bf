#include <cmath>
#include <numbers>

#include "lsbw/bandwidth.hpp"
#include "lsbw/errors.hpp"

namespace lsbw {
namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Direction net on the nonnegative orthant: the axes, the diagonal and a
// Halton-type set pushed through |.|, 64 directions in total.
std::vector<Eigen::VectorXd> orthant_net(std::size_t d) {
  std::vector<Eigen::VectorXd> net;
  const auto dd = static_cast<Eigen::Index>(d);
  if (d == 1) {
    net.push_back(Eigen::VectorXd::Ones(1));
    return net;
  }
  if (d == 2) {
    for (int k = 0; k < 64; ++k) {
      const double t = 0.5 * std::numbers::pi * k / 63.0;
      net.push_back(Eigen::Vector2d(std::cos(t), std::sin(t)));
    }
    return net;
  }
  for (Eigen::Index j = 0; j < dd; ++j) net.push_back(Eigen::VectorXd::Unit(dd, j));
  net.push_back(Eigen::VectorXd::Ones(dd).normalized());
  static constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  for (int k = 1; net.size() < 64; ++k) {
    Eigen::VectorXd v(dd);
    for (Eigen::Index j = 0; j < dd; ++j) {
      const int base = kPrimes[j % 16];
      double f = 1.0, r = 0.0;
      for (int i = k; i > 0; i /= base) {
        f /= base;
        r += f * (i % base);
      }
      v[j] = r + 1e-3;
    }
    net.push_back(v.normalized());
  }
  return net;
}

// min of u'Mu / |u|^2 over the nonnegative orthant. At the minimizer the
// support S carries an eigenvector of M_SS with entries of one sign, so the
// minimum is the smallest such eigenvalue over all supports.
double orthant_rayleigh_min(const Eigen::MatrixXd& M) {
  const auto d = static_cast<int>(M.rows());
  double best = INFINITY;
  for (unsigned mask = 1; mask < (1u << d); ++mask) {
    std::vector<int> idx;
    for (int j = 0; j < d; ++j)
      if (mask & (1u << j)) idx.push_back(j);
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd sub(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
      for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = M(idx[a], idx[b]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sub);
    for (Eigen::Index e = 0; e < k; ++e) {
      const auto v = eig.eigenvectors().col(e);
      if (v.minCoeff() >= 0.0 || v.maxCoeff() <= 0.0) best = std::min(best, eig.eigenvalues()[e]);
    }
  }
  return best;
}

}  // namespace

void QProblem::validate() const {
  if (M.rows() == 0 || M.rows() != M.cols()) throw ArgumentError("M must be a nonempty square matrix");
  if (!M.allFinite()) throw ArgumentError("M must be finite");
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, M.cwiseAbs().maxCoeff()))
    throw ArgumentError("M must be symmetric");
  if (!(a > 0.0) || !std::isfinite(a)) throw ArgumentError("a must be positive");
  if (nu < 2 || nu % 2 != 0) throw ArgumentError("nu must be an even integer >= 2");
}

void check_orthant_definite(const Eigen::MatrixXd& M) {
  const double tr = M.trace();
  const double eps = 1e-10 * tr;
  if (!(tr > 0.0)) throw DegenerateCurvatureError("curvature matrix has nonpositive trace");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12 * tr)
    throw DegenerateCurvatureError("curvature matrix is not positive semi-definite");
  for (const auto& v : orthant_net(static_cast<std::size_t>(M.rows())))
    if (!(v.dot(M * v) >= eps))
      throw DegenerateCurvatureError("curvature matrix vanishes on the nonnegative orthant");
  if (M.rows() <= 12 && !(orthant_rayleigh_min(M) >= eps))
    throw DegenerateCurvatureError("curvature matrix vanishes on the nonnegative orthant");
}

double q_value(const QProblem& p, const Eigen::VectorXd& u) {
  if (u.size() != p.M.rows()) throw ArgumentError("u has the wrong dimension");
  double log_prod = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0)) throw ArgumentError("u must be positive");
    log_prod += std::log(u[i]);
  }
  const double f = factorial(p.nu);
  return u.dot(p.M * u) / (f * f) + p.a * std::exp(-log_prod / p.nu);
}

namespace {

double penalty(const QProblem& p, const Eigen::VectorXd& u) {
  return p.a * std::exp(-u.array().log().sum() / p.nu);
}

}  // namespace

Eigen::VectorXd q_gradient(const QProblem& p, const Eigen::VectorXd& u) {
  const double f = factorial(p.nu);
  const double pen = penalty(p, u);
  return 2.0 / (f * f) * (p.M * u) - (pen / p.nu) * u.cwiseInverse();
}

Eigen::MatrixXd q_hessian(const QProblem& p, const Eigen::VectorXd& u) {
  const double f = factorial(p.nu);
  const double pen = penalty(p, u);
  const Eigen::VectorXd inv = u.cwiseInverse();
  Eigen::MatrixXd H = 2.0 / (f * f) * p.M + (pen / (p.nu * p.nu)) * inv * inv.transpose();
  H.diagonal() += (pen / p.nu) * inv.cwiseProduct(inv);
  return H;
}

ScaledProblem scaling_transport(const QProblem& p, double w) {
  if (!(w > 0.0)) throw ArgumentError("scaling weight must be positive");
  const double d = static_cast<double>(p.dim());
  ScaledProblem s;
  s.problem = QProblem{p.M / w, 1.0, p.nu};
  s.factor = std::pow(p.a / w, p.nu / (d + 2.0 * p.nu));
  return s;
}

Eigen::VectorXd q_minimize_numeric(const QProblem& p) {
  p.validate();
  check_orthant_definite(p.M);
  const auto d = static_cast<Eigen::Index>(p.dim());
  // Solve the normalized problem (trace(M/w) = d, a = 1), then map back.
  const ScaledProblem sp = scaling_transport(p, p.M.trace() / static_cast<double>(d));
  const QProblem& q = sp.problem;
  const double nu = q.nu;
  const double fac = factorial(q.nu);

  // Start on the ray u = t 1 at the minimizer of Q(t 1).
  const double s = Eigen::VectorXd::Ones(d).dot(q.M * Eigen::VectorXd::Ones(d));
  const double t0 = std::pow(static_cast<double>(d) * fac * fac / (2.0 * nu * s), nu / (2.0 * nu + d));
  Eigen::VectorXd y = Eigen::VectorXd::Constant(d, std::log(t0));

  auto value_at = [&](const Eigen::VectorXd& yy) { return q_value(q, yy.array().exp().matrix()); };
  double val = value_at(y);
  for (int it = 0; it < 200; ++it) {
    const Eigen::VectorXd u = y.array().exp().matrix();
    const Eigen::VectorXd gu = q_gradient(q, u);
    const Eigen::VectorXd gy = u.cwiseProduct(gu);
    if (gy.lpNorm<Eigen::Infinity>() <= 1e-15 * std::max(val, 1e-300)) break;
    Eigen::MatrixXd Hy = u.asDiagonal() * q_hessian(q, u) * u.asDiagonal();
    Hy.diagonal() += gy;
    // Levenberg damping when the log-coordinate Hessian is not positive definite.
    double lambda = 0.0;
    Eigen::VectorXd step;
    for (int k = 0; k < 60; ++k) {
      Eigen::MatrixXd Hd = Hy;
      Hd.diagonal().array() += lambda;
      Eigen::LLT<Eigen::MatrixXd> llt(Hd);
      if (llt.info() == Eigen::Success) {
        step = llt.solve(-gy);
        break;
      }
      lambda = lambda == 0.0 ? 1e-8 * std::max(1.0, Hy.diagonal().cwiseAbs().maxCoeff()) : 10.0 * lambda;
    }
    if (step.size() == 0) step = -gy;
    // Armijo backtracking.
    const double slope = gy.dot(step);
    double alpha = 1.0;
    double next = value_at(y + step);
    while (!(next <= val + 1e-4 * alpha * slope) && alpha > 1e-12) {
      alpha *= 0.5;
      next = value_at(y + alpha * step);
    }
    if (!(next <= val)) break;
    const double move = (alpha * step).lpNorm<Eigen::Infinity>();
    y += alpha * step;
    val = next;
    if (move < 1e-15) break;
  }

  // Polish in u-coordinates, where Q is strictly convex.
  Eigen::VectorXd u = y.array().exp().matrix();
  for (int it = 0; it < 3; ++it) {
    const Eigen::VectorXd step = q_hessian(q, u).llt().solve(-q_gradient(q, u));
    const Eigen::VectorXd cand = u + step;
    if ((cand.array() <= 0.0).any()) break;
    if (q_gradient(q, cand).norm() >= q_gradient(q, u).norm()) break;
    u = cand;
  }
  return sp.map_solution(u);
}

Eigen::VectorXd q_minimize_closed_form(const QProblem& p) {
  p.validate();
  check_orthant_definite(p.M);
  const double nu = p.nu;
  const double fac = factorial(p.nu);
  if (p.dim() == 1) {
    Eigen::VectorXd u(1);
    u[0] = std::pow(p.a * fac * fac / (2.0 * nu * p.M(0, 0)), nu / (2.0 * nu + 1.0));
    return u;
  }
  if (p.dim() == 2) {
    const double m11 = p.M(0, 0), m22 = p.M(1, 1), m12 = p.M(0, 1);
    const double e = (nu + 1.0) / (2.0 * nu);
    const double denom = 2.0 * nu * std::pow(m11, e) * (std::sqrt(m11 * m22) + m12);
    const double h1 = std::pow(p.a * fac * fac * std::pow(m22, e) / denom, 1.0 / (2.0 * nu + 2.0));
    const double h2 = std::pow(m11 / m22, 1.0 / (2.0 * nu)) * h1;
    return Eigen::Vector2d(std::pow(h1, nu), std::pow(h2, nu));
  }
  throw ArgumentError("closed-form minimizer exists only for d <= 2");
}

Eigen::VectorXd q_minimize(const QProblem& p) {
  return p.dim() <= 2 ? q_minimize_closed_form(p) : q_minimize_numeric(p);
}

}  // namespace lsbw
