#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lsbw/kde.hpp"
#include "lsbw/levelset.hpp"
#include "lsbw/mixtures.hpp"

namespace lsbw {

// Wilcoxon signed-rank test --------------------------------------------------

struct WilcoxonResult {
  double statistic = 0.0;  //!< W+, the rank sum of positive differences
  double p_value = 1.0;    //!< two-sided
  std::size_t n_used = 0;  //!< nonzero differences
  bool exact = false;
};

//! Differences a - b; zeros dropped, tied magnitudes get average ranks.
//! Exact null distribution for up to 20 nonzero differences, normal
//! approximation with tie and continuity correction beyond. Throws
//! ArgumentError when every difference is zero.
WilcoxonResult wilcoxon_signed_rank(std::span<const std::pair<double, double>> pairs);
WilcoxonResult wilcoxon_signed_rank(std::span<const double> differences);
WilcoxonResult wilcoxon_exact(std::span<const double> differences);
WilcoxonResult wilcoxon_normal(std::span<const double> differences);

// Experiments ----------------------------------------------------------------

struct ExperimentConfig {
  std::string model = "M13";  //!< registry id or JSON mixture path
  std::vector<double> taus = {0.5};
  std::size_t n = 2000;
  std::size_t reps = 500;
  std::uint64_t seed = 42;
  std::string kernel = "gaussian";
  std::size_t selection_grid = 512;  //!< lattice for M_hat (d = 2)
  std::size_t error_grid = 1024;     //!< cells per axis for e(h) (d = 2)
  std::filesystem::path out;
  std::size_t jobs = 1;
  HdrOptions hdr;

  //! reps >= 1, taus in (0, 1), n >= 100; throws ArgumentError.
  void validate() const;
};

//! JSON object with any of the keys model, tau (number or list), n, reps,
//! seed, kernel, selection_grid, error_grid, jobs, out.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct ReplicationRecord {
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  std::optional<BandwidthVector> h_opt;
  std::optional<BandwidthVector> h_lscv;
  std::optional<double> e_opt;
  std::optional<double> e_lscv;
  std::optional<double> ratio;  //!< e_lscv / e_opt
  std::string status = "ok";    //!< ok, incomputable-empty, incomputable-degenerate, failed
  std::string message;
  bool lscv_boundary = false;

  bool incomputable() const { return status.rfind("incomputable", 0) == 0; }
};

struct ExperimentSummary {
  std::string model;
  double tau = 0.0;
  double level = 0.0;
  std::size_t n = 0;
  std::size_t reps = 0;
  std::size_t computable = 0;
  std::size_t incomputable = 0;
  std::size_t failed = 0;
  double incomputable_rate = 0.0;
  double median_ratio = 0.0;  //!< NaN when no ratio is available
  std::optional<WilcoxonResult> wilcoxon;  //!< over log ratios
  std::optional<std::size_t> median_rep;   //!< ratio closest to the median
};

struct TauResult {
  ExperimentSummary summary;
  std::vector<ReplicationRecord> records;
  //! Boundaries of L, L_hat(h_opt), L_hat(h_lscv) for the median replication.
  std::vector<std::pair<std::string, LevelSetBoundary>> median_boundaries;
};

//! Runs every replication for every tau. Replications are independent, run
//! on `jobs` threads and merged by index, so records do not depend on the
//! thread count. Failures are recorded per replication.
std::vector<TauResult> run_experiment(const ExperimentConfig& config);

ExperimentSummary summarize(const std::vector<ReplicationRecord>& records, const ExperimentSummary& base);

void write_replications_csv(const std::vector<ReplicationRecord>& records, std::size_t dim,
                            const std::filesystem::path& path);
void write_summary(const ExperimentSummary& summary, const std::filesystem::path& path);
//! Writes replications_tau<t>.csv, summary_tau<t>.txt and, when available,
//! levelset_<name>_tau<t>.csv into `dir`.
void emit_results(const TauResult& result, const std::filesystem::path& dir);

//! The ratio column of a replications CSV (empty cells as nullopt).
std::vector<std::optional<double>> read_ratio_column(const std::filesystem::path& path);
double median(std::vector<double> values);

}  // namespace lsbw
