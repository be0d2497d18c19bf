// lsbw: bandwidth selection, Monte Carlo checks and simulations from the
// command line. Run `lsbw --help` or `lsbw <command> --help`.

#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lsbw/bandwidth.hpp"
#include "lsbw/errors.hpp"
#include "lsbw/harness.hpp"
#include "lsbw/risk.hpp"
#include "lsbw/rng.hpp"
#include "lsbw/simd.hpp"

namespace {

using namespace lsbw;

void print_row(const std::vector<double>& values) {
  for (std::size_t j = 0; j < values.size(); ++j) std::cout << (j ? "," : "") << values[j];
  std::cout << '\n';
}

void print_header(const std::string& prefix, std::size_t d) {
  for (std::size_t j = 1; j <= d; ++j) std::cout << (j > 1 ? "," : "") << prefix << j;
  std::cout << '\n';
}

struct SelectArgs {
  std::string data;
  std::optional<double> level;
  std::optional<double> tau;
  std::string model;
  std::string kernel = "gaussian";
  std::string method = "opt";
  std::size_t grid_res = 0;
  double grid_margin = 4.0;
};

int run_select(const SelectArgs& a) {
  const PointSet sample = read_points_csv(a.data);
  const KernelSpec spec = parse_kernel(a.kernel);
  const std::size_t d = sample.dim();

  if (a.method == "lscv") {
    const auto res = select_lscv(sample, spec);
    print_header("h_", d);
    print_row(res.h.values());
    std::cout << "method=lscv\n"
              << "lscv_value=" << res.value << '\n'
              << "evaluations=" << res.evaluations << '\n'
              << "boundary_warning=" << (res.boundary_warning ? "true" : "false") << '\n';
    return 0;
  }
  if (a.method != "opt") throw ArgumentError("--method must be opt or lscv");
  if (!a.level && !a.tau) throw ArgumentError("--level or --tau is required for --method opt");

  double c = 0.0;
  std::string level_source;
  if (a.level) {
    c = *a.level;
    level_source = "given";
  } else if (!a.model.empty()) {
    c = hdr_level(resolve_model(a.model), *a.tau).c;
    level_source = "model";
  } else {
    c = estimate_level(sample, *a.tau, spec);
    level_source = "sample";
  }
  BoundaryOptions opts;
  opts.grid_resolution = a.grid_res;
  opts.grid_margin = a.grid_margin;
  const auto sel = select_optimal(sample, c, spec, opts);
  print_header("h_", d);
  print_row(sel.h.values());
  std::cout << "method=opt\n"
            << "level=" << c << '\n'
            << "level_source=" << level_source << '\n'
            << "b_hat=" << sel.functionals.b << '\n';
  for (Eigen::Index k = 0; k < sel.functionals.A.rows(); ++k)
    for (Eigen::Index l = k; l < sel.functionals.A.cols(); ++l)
      std::cout << "A_" << k + 1 << l + 1 << '=' << sel.functionals.A(k, l) << '\n';
  const std::pair<const char*, const BandwidthVector*> pilots[] = {
      {"pilot_h0", &sel.pilots.h0}, {"pilot_h1", &sel.pilots.h1}, {"pilot_h2", &sel.pilots.h2}};
  for (const auto& [name, h] : pilots)
    for (std::size_t j = 0; j < d; ++j) std::cout << name << '_' << j + 1 << '=' << (*h)[j] << '\n';
  return 0;
}

struct VerifyArgs {
  std::string check;
  std::string model = "normal-d1";
  std::optional<double> tau;
  std::optional<double> level;
  std::size_t n = 100000;
  std::size_t reps = 50;
  std::uint64_t seed = 1;
  std::vector<double> h;
  std::string weight;
  std::vector<double> deltas = {0.04, 0.02, 0.01};
  std::string kernel = "gaussian";
};

int run_verify(const VerifyArgs& a) {
  const MixtureModel model = resolve_model(a.model);
  const KernelSpec spec = parse_kernel(a.kernel);
  const std::size_t d = model.dim();
  double c = 0.0;
  if (a.level)
    c = *a.level;
  else if (a.tau)
    c = hdr_level(model, *a.tau).c;
  else
    throw ArgumentError("--level or --tau is required");
  const BandwidthVector h =
      a.h.empty() ? BandwidthVector::isotropic(d, std::pow(static_cast<double>(a.n), -1.0 / (static_cast<double>(d) + 2.0 * spec.order())))
      : a.h.size() == 1 ? BandwidthVector::isotropic(d, a.h[0])
                        : BandwidthVector(a.h);

  if (a.check == "theorem1") {
    double q = 1.0;
    const WeightFunction g(parse_weight_kind(a.weight.empty() ? "excess" : a.weight, &q), model, c, q);
    std::cout << "rep,seed,lhs,rhs,ratio\n";
    std::vector<double> ratios;
    for (std::size_t rep = 0; rep < a.reps; ++rep) {
      const auto seed = derive_seed(a.seed, rep);
      const auto r = verify_theorem1_ratio(model, c, g, a.n, h, seed, spec);
      ratios.push_back(r.ratio);
      std::cout << rep << ',' << seed << ',' << r.lhs << ',' << r.rhs << ',' << r.ratio << '\n';
    }
    std::cout << "summary,,,,median_ratio=" << median(ratios) << '\n';
    return 0;
  }
  if (a.check == "corollary1") {
    double q = 1.0;
    const WeightFunction g(parse_weight_kind(a.weight.empty() ? "unit" : a.weight, &q), model, c, q);
    const auto r = verify_corollary1(model, c, g, a.n, h, a.reps, a.seed, spec);
    std::cout << "rep,seed,error\n";
    for (std::size_t rep = 0; rep < r.values.size(); ++rep)
      std::cout << rep << ',' << derive_seed(a.seed, rep) << ',' << r.values[rep] << '\n';
    std::cout << "summary,mc_mean=" << r.mc_mean << ",formula=" << r.formula_value << ",ratio=" << r.ratio << '\n';
    return 0;
  }
  if (a.check == "proposition1") {
    const auto pts = verify_proposition1(model, c, a.n, h, a.deltas, a.reps, a.seed, spec);
    std::cout << "delta,numerator,denominator,ratio\n";
    for (const auto& p : pts) std::cout << p.delta << ',' << p.numerator << ',' << p.denominator << ',' << p.ratio << '\n';
    std::cout << "summary,reps=" << a.reps << ",n=" << a.n << ",level=" << c << '\n';
    return 0;
  }
  throw ArgumentError("--check must be theorem1, corollary1 or proposition1");
}

int run_simulate(ExperimentConfig cfg, const std::string& config_path, bool quiet) {
  if (!config_path.empty()) cfg = load_experiment_config(config_path);
  const auto results = run_experiment(cfg);
  for (const auto& tr : results) {
    if (!cfg.out.empty()) emit_results(tr, cfg.out);
    if (quiet) continue;
    const auto& s = tr.summary;
    std::cout << "tau=" << s.tau << " level=" << s.level << " reps=" << s.reps
              << " incomputable=" << s.incomputable << " (" << 100.0 * s.incomputable_rate << "%)"
              << " failed=" << s.failed << " median_ratio=" << s.median_ratio;
    if (s.wilcoxon) std::cout << " wilcoxon_p=" << s.wilcoxon->p_value;
    std::cout << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Level-set-targeted kernel bandwidth selection"};
  app.require_subcommand(1);
  std::cout.precision(12);

  SelectArgs sel;
  auto* select = app.add_subcommand("select-bandwidth", "Select a bandwidth for a point cloud");
  select->add_option("--data", sel.data, "CSV of points, one per row")->required()->check(CLI::ExistingFile);
  auto* level_opt = select->add_option("--level", sel.level, "Density level c");
  select->add_option("--tau", sel.tau, "HDR coverage parameter tau in (0,1)")->excludes(level_opt);
  select->add_option("--model", sel.model, "Model id or JSON mixture for c(tau)");
  select->add_option("--kernel", sel.kernel, "gaussian or gaussian4");
  select->add_option("--method", sel.method, "opt or lscv");
  select->add_option("--grid-res", sel.grid_res, "Lattice nodes per axis for d = 2 boundaries");
  select->add_option("--grid-margin", sel.grid_margin, "Lattice margin in pilot bandwidths");

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "Monte Carlo checks of the risk approximations");
  verify->add_option("--check", ver.check, "theorem1, corollary1 or proposition1")->required();
  verify->add_option("--model", ver.model, "Model id or JSON mixture");
  auto* vlevel = verify->add_option("--level", ver.level, "Density level c");
  verify->add_option("--tau", ver.tau, "HDR coverage parameter")->excludes(vlevel);
  verify->add_option("--n", ver.n, "Sample size");
  verify->add_option("--reps", ver.reps, "Replications");
  verify->add_option("--seed", ver.seed, "Base seed");
  verify->add_option("--bandwidth", ver.h, "Bandwidth (one value or one per coordinate)");
  verify->add_option("--weight", ver.weight, "unit, density, excess or power:<q>");
  verify->add_option("--delta", ver.deltas, "Band widths for proposition1")->delimiter(',');
  verify->add_option("--kernel", ver.kernel, "gaussian or gaussian4");

  ExperimentConfig cfg;
  std::string config_path;
  std::string out_dir;
  bool quiet = false;
  auto* sim = app.add_subcommand("simulate", "Compare the plug-in selector with LSCV by simulation");
  sim->add_option("--model", cfg.model, "Model id or JSON mixture");
  sim->add_option("--tau", cfg.taus, "One or more tau values")->delimiter(',');
  sim->add_option("--n", cfg.n, "Sample size");
  sim->add_option("--reps", cfg.reps, "Replications");
  sim->add_option("--seed", cfg.seed, "Base seed");
  sim->add_option("--kernel", cfg.kernel, "gaussian or gaussian4");
  sim->add_option("--jobs", cfg.jobs, "Worker threads");
  sim->add_option("--selection-grid", cfg.selection_grid, "Lattice nodes per axis for M_hat");
  sim->add_option("--error-grid", cfg.error_grid, "Cells per axis for e(h)");
  sim->add_option("--out", out_dir, "Output directory");
  sim->add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
  sim->add_flag("--quiet", quiet, "No summary on stdout");

  std::string model_id = "M13";
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  std::string out_path;
  auto* sample = app.add_subcommand("sample", "Draw a sample from a model");
  sample->add_option("--model", model_id, "Model id or JSON mixture");
  sample->add_option("--n", n, "Sample size");
  sample->add_option("--seed", seed, "Seed");
  sample->add_option("--out", out_path, "Output CSV")->required();

  double tau = 0.5;
  auto* hdr = app.add_subcommand("hdr-level", "Level c(tau) of a model's highest density region");
  hdr->add_option("--model", model_id, "Model id or JSON mixture");
  hdr->add_option("--tau", tau, "Coverage parameter");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*select) return run_select(sel);
    if (*verify) return run_verify(ver);
    if (*sim) {
      if (!out_dir.empty()) cfg.out = out_dir;
      return run_simulate(cfg, config_path, quiet);
    }
    if (*sample) {
      write_points_csv(resolve_model(model_id).sample(n, seed), out_path);
      return 0;
    }
    if (*hdr) {
      std::cout << "level=" << hdr_level(resolve_model(model_id), tau).c << '\n';
      return 0;
    }
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const EmptyLevelSetError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const DegenerateCurvatureError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
