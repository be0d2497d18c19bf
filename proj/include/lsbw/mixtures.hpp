#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lsbw/point_set.hpp"

namespace lsbw {

struct MixtureComponent {
  double weight = 0.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

//! Finite Gaussian mixture sum_k w_k N(mu_k, Sigma_k) with exact density,
//! analytic partial derivatives up to order 4 and a seeded sampler.
//! Immutable after construction; safe to share between threads.
class MixtureModel {
 public:
  //! Validates weights (positive, sum to 1 within 1e-12), dimensions and
  //! positive definiteness; throws ArgumentError otherwise.
  explicit MixtureModel(std::vector<MixtureComponent> components);

  std::size_t dim() const { return dim_; }
  const std::vector<MixtureComponent>& components() const { return components_; }

  double density(std::span<const double> x) const;

  //! Mixed partial derivative d^q f / dx_{i1} ... dx_{iq}, q <= 4, with
  //! zero-based coordinate indices. An empty index returns the density.
  double partial(std::span<const double> x, std::span<const int> index) const;

  Eigen::VectorXd gradient(std::span<const double> x) const;
  //! f_{(k*r)}: the r-th pure partial in coordinate k (r <= 4).
  double pure_partial(std::span<const double> x, std::size_t k, int r) const;

  //! n draws: categorical component choice, then mean + L z with L the
  //! Cholesky factor. Deterministic given the seed.
  PointSet sample(std::size_t n, std::uint64_t seed) const;

  Eigen::VectorXd mean() const;
  //! Union over components of mean +- k*sd per coordinate.
  std::vector<std::pair<double, double>> box(double k) const;

 private:
  struct Prepared {
    double log_weight_norm;        // log(w) - d/2 log(2 pi) - 1/2 log|Sigma|
    std::vector<double> mean;      // d
    std::vector<double> precision; // d*d row-major
    Eigen::MatrixXd chol;          // lower factor of Sigma
  };

  std::vector<MixtureComponent> components_;
  std::vector<Prepared> prepared_;
  std::size_t dim_ = 0;
};

//! A density level c, optionally tagged with the HDR coverage target tau
//! it was derived from.
struct Level {
  double c = 0.0;
  std::optional<double> tau;
};

struct HdrOptions {
  std::size_t draws = std::size_t{1} << 22;
  std::uint64_t seed = 0x5eed1e5e1ULL;
};

//! Monte Carlo coverage P(f(X) >= y), X ~ f.
double hdr_coverage(const MixtureModel& model, double y, std::size_t draws, std::uint64_t seed);

//! Level c(tau) of the 100(1-tau)% highest density region: bisection on y of
//! the Monte Carlo coverage curve until coverage(y) crosses 1-tau.
Level hdr_level(const MixtureModel& model, double tau, const HdrOptions& opts = {});

// Registry ---------------------------------------------------------------

//! "M13", "A".."L", "normal-d1", "normal-d2". Throws ArgumentError for
//! unknown ids.
MixtureModel model_by_id(const std::string& id);
std::vector<std::string> registry_ids();

//! JSON: {"components": [{"weight": w, "mean": [...], "cov": [[...], ...]}, ...]}
MixtureModel load_mixture_config(const std::filesystem::path& path);
MixtureModel parse_mixture_json(const std::string& text);

//! A registry id or a path to a JSON config file.
MixtureModel resolve_model(const std::string& id_or_path);

}  // namespace lsbw
