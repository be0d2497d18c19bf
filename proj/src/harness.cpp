#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "lsbw/bandwidth.hpp"
#include "lsbw/errors.hpp"
#include "lsbw/harness.hpp"
#include "lsbw/risk.hpp"
#include "lsbw/rng.hpp"

namespace lsbw {

void ExperimentConfig::validate() const {
  if (reps < 1) throw ArgumentError("reps must be at least 1");
  if (n < 100) throw ArgumentError("n must be at least 100");
  if (taus.empty()) throw ArgumentError("need at least one tau");
  for (double t : taus)
    if (!(t > 0.0 && t < 1.0)) throw ArgumentError("tau values must lie in (0, 1)");
  if (selection_grid < 2 || error_grid < 2) throw ArgumentError("grid resolutions must be at least 2");
  if (jobs < 1) throw ArgumentError("jobs must be at least 1");
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  using nlohmann::json;
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open experiment config " + path.string());
  ExperimentConfig cfg;
  try {
    const json doc = json::parse(in);
    if (doc.contains("model")) cfg.model = doc["model"].get<std::string>();
    if (doc.contains("tau")) {
      if (doc["tau"].is_array())
        cfg.taus = doc["tau"].get<std::vector<double>>();
      else
        cfg.taus = {doc["tau"].get<double>()};
    }
    if (doc.contains("n")) cfg.n = doc["n"].get<std::size_t>();
    if (doc.contains("reps")) cfg.reps = doc["reps"].get<std::size_t>();
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("kernel")) cfg.kernel = doc["kernel"].get<std::string>();
    if (doc.contains("selection_grid")) cfg.selection_grid = doc["selection_grid"].get<std::size_t>();
    if (doc.contains("error_grid")) cfg.error_grid = doc["error_grid"].get<std::size_t>();
    if (doc.contains("jobs")) cfg.jobs = doc["jobs"].get<std::size_t>();
    if (doc.contains("out")) cfg.out = doc["out"].get<std::string>();
  } catch (const json::exception& e) {
    throw ArgumentError(path.string() + ": " + e.what());
  }
  return cfg;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

namespace {

struct Context {
  const MixtureModel& model;
  double c;
  KernelSpec spec;
  KernelSpec eval_spec;  // d = 1 error evaluation
  const ExperimentConfig& cfg;
  GridSpec error_grid;
  GridField f_true;
  GridField g_field;
};

double selection_error(const Context& ctx, const PointSet& sample, const BandwidthVector& h) {
  if (ctx.model.dim() == 1) {
    const Kde kde(sample, h, ctx.eval_spec);
    const WeightFunction g(WeightKind::excess, ctx.model, ctx.c);
    return sym_diff_error(ctx.model, ctx.c, KdeEstimator(kde), g).value;
  }
  const Kde kde(sample, h, ctx.spec);
  return sym_diff_error_grid(ctx.f_true, kde.grid(ctx.error_grid), ctx.c, &ctx.g_field).value;
}

ReplicationRecord run_replication(const Context& ctx, std::size_t rep) {
  ReplicationRecord r;
  r.rep = rep;
  r.seed = derive_seed(ctx.cfg.seed, rep);
  try {
    const PointSet sample = ctx.model.sample(ctx.cfg.n, r.seed);
    BoundaryOptions bopts;
    bopts.grid_resolution = ctx.cfg.selection_grid;
    try {
      r.h_opt = select_optimal(sample, ctx.c, ctx.spec, bopts).h;
    } catch (const EmptyLevelSetError& e) {
      r.status = "incomputable-empty";
      r.message = e.what();
    } catch (const DegenerateCurvatureError& e) {
      r.status = "incomputable-degenerate";
      r.message = e.what();
    }
    const auto lscv = select_lscv(sample, ctx.spec);
    r.h_lscv = lscv.h;
    r.lscv_boundary = lscv.boundary_warning;
    r.e_lscv = selection_error(ctx, sample, *r.h_lscv);
    if (r.h_opt) {
      r.e_opt = selection_error(ctx, sample, *r.h_opt);
      if (*r.e_opt > 0.0) r.ratio = *r.e_lscv / *r.e_opt;
    }
  } catch (const std::exception& e) {
    r.status = "failed";
    r.message = e.what();
  }
  return r;
}

}  // namespace

ExperimentSummary summarize(const std::vector<ReplicationRecord>& records, const ExperimentSummary& base) {
  ExperimentSummary s = base;
  s.reps = records.size();
  s.computable = s.incomputable = s.failed = 0;
  std::vector<double> ratios, logs;
  for (const auto& r : records) {
    if (r.incomputable())
      ++s.incomputable;
    else if (r.status == "failed")
      ++s.failed;
    else
      ++s.computable;
    if (r.ratio) {
      ratios.push_back(*r.ratio);
      logs.push_back(std::log(*r.ratio));
    }
  }
  s.incomputable_rate = s.reps ? static_cast<double>(s.incomputable) / static_cast<double>(s.reps) : 0.0;
  s.median_ratio = median(ratios);
  s.wilcoxon.reset();
  s.median_rep.reset();
  if (!ratios.empty()) {
    try {
      s.wilcoxon = wilcoxon_signed_rank(std::span<const double>(logs));
    } catch (const ArgumentError&) {
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : records) {
      if (!r.ratio) continue;
      const double gap = std::abs(*r.ratio - s.median_ratio);
      if (gap < best) {
        best = gap;
        s.median_rep = r.rep;
      }
    }
  }
  return s;
}

std::vector<TauResult> run_experiment(const ExperimentConfig& config) {
  config.validate();
  const MixtureModel model = resolve_model(config.model);
  if (model.dim() != 1 && model.dim() != 2)
    throw ArgumentError("simulations support d = 1 and d = 2 models");
  const KernelSpec spec = parse_kernel(config.kernel);

  std::vector<TauResult> results;
  for (double tau : config.taus) {
    const Level level = hdr_level(model, tau, config.hdr);
    Context ctx{model, level.c, spec, spec.with_truncation(8.0), config, {}, {}, {}};
    if (model.dim() == 2) {
      ctx.error_grid = cell_centered_grid(model.box(5.0), config.error_grid);
      ctx.f_true = GridField{ctx.error_grid, std::vector<double>(ctx.error_grid.total())};
      ctx.g_field = ctx.f_true;
      for (std::size_t i = 0; i < ctx.f_true.values.size(); ++i) {
        const double f = model.density(ctx.f_true.node_point(i));
        ctx.f_true.values[i] = f;
        ctx.g_field.values[i] = std::abs(f - level.c);
      }
    }

    std::vector<ReplicationRecord> records(config.reps);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < config.reps; i = next++) records[i] = run_replication(ctx, i);
    };
    const std::size_t jobs = std::min(config.jobs, config.reps);
    if (jobs <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }

    TauResult tr;
    ExperimentSummary base;
    base.model = config.model;
    base.tau = tau;
    base.level = level.c;
    base.n = config.n;
    tr.summary = summarize(records, base);
    tr.records = std::move(records);

    if (tr.summary.median_rep) {
      const auto& rec = tr.records[*tr.summary.median_rep];
      const PointSet sample = model.sample(config.n, rec.seed);
      if (model.dim() == 2) {
        tr.median_boundaries.emplace_back("true", extract_d2(ctx.f_true, level.c));
        tr.median_boundaries.emplace_back("opt", extract_d2(Kde(sample, *rec.h_opt, spec).grid(ctx.error_grid), level.c));
        tr.median_boundaries.emplace_back("lscv", extract_d2(Kde(sample, *rec.h_lscv, spec).grid(ctx.error_grid), level.c));
      } else {
        const auto box = model.box(10.0).front();
        auto crossings = [&](const BandwidthVector& h) {
          const Kde kde(sample, h, ctx.eval_spec);
          return extract_d1([&](double x) { return kde.value(std::span<const double>(&x, 1)); }, level.c,
                            box.first, box.second);
        };
        tr.median_boundaries.emplace_back("true", exact_boundary(model, level.c));
        tr.median_boundaries.emplace_back("opt", crossings(*rec.h_opt));
        tr.median_boundaries.emplace_back("lscv", crossings(*rec.h_lscv));
      }
    }
    results.push_back(std::move(tr));
  }
  return results;
}

}  // namespace lsbw
