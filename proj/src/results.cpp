#include <cmath>
#include <fstream>
#include <sstream>

#include "lsbw/harness.hpp"
#include "lsbw/simd.hpp"

namespace lsbw {
namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string tau_tag(double tau) {
  std::ostringstream s;
  s << tau;
  return s.str();
}

}  // namespace

void write_replications_csv(const std::vector<ReplicationRecord>& records, std::size_t dim,
                            const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "rep,seed";
  for (std::size_t j = 1; j <= dim; ++j) out << ",h_opt_" << j;
  for (std::size_t j = 1; j <= dim; ++j) out << ",h_lscv_" << j;
  out << ",e_opt,e_lscv,ratio,status\n";
  auto cell = [&out](const std::optional<double>& v) {
    out << ',';
    if (v) out << *v;
  };
  auto hcells = [&](const std::optional<BandwidthVector>& h) {
    for (std::size_t j = 0; j < dim; ++j) cell(h ? std::optional<double>((*h)[j]) : std::nullopt);
  };
  for (const auto& r : records) {
    out << r.rep << ',' << r.seed;
    hcells(r.h_opt);
    hcells(r.h_lscv);
    cell(r.e_opt);
    cell(r.e_lscv);
    cell(r.ratio);
    out << ',' << r.status << '\n';
  }
  finish(out, path);
}

void write_summary(const ExperimentSummary& s, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "model=" << s.model << '\n'
      << "tau=" << s.tau << '\n'
      << "level=" << s.level << '\n'
      << "n=" << s.n << '\n'
      << "reps=" << s.reps << '\n'
      << "computable=" << s.computable << '\n'
      << "incomputable=" << s.incomputable << '\n'
      << "failed=" << s.failed << '\n'
      << "incomputable_rate=" << s.incomputable_rate << '\n'
      << "median_ratio=" << s.median_ratio << '\n';
  if (s.wilcoxon) {
    out << "wilcoxon_statistic=" << s.wilcoxon->statistic << '\n'
        << "wilcoxon_p=" << s.wilcoxon->p_value << '\n'
        << "wilcoxon_n=" << s.wilcoxon->n_used << '\n'
        << "wilcoxon_method=" << (s.wilcoxon->exact ? "exact" : "normal") << '\n';
  }
  if (s.median_rep) out << "median_rep=" << *s.median_rep << '\n';
  out << "simd=" << simd::backend_name(simd::active().backend) << '\n';
  finish(out, path);
}

void emit_results(const TauResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  const std::string tag = tau_tag(result.summary.tau);
  std::size_t dim = 0;
  for (const auto& r : result.records) {
    if (r.h_opt) dim = r.h_opt->dim();
    if (r.h_lscv) dim = r.h_lscv->dim();
    if (dim) break;
  }
  write_replications_csv(result.records, dim, dir / ("replications_tau" + tag + ".csv"));
  write_summary(result.summary, dir / ("summary_tau" + tag + ".txt"));
  for (const auto& [name, boundary] : result.median_boundaries) {
    const auto path = dir / ("levelset_" + name + "_tau" + tag + ".csv");
    if (boundary.dim == 2) {
      write_polylines_csv(boundary, path);
      continue;
    }
    auto out = open_output(path);
    out << "crossing_id,x,direction\n";
    for (std::size_t i = 0; i < boundary.crossings.size(); ++i)
      out << i << ',' << boundary.crossings[i].x << ','
          << (boundary.crossings[i].direction == Direction::up ? "up" : "down") << '\n';
    finish(out, path);
  }
}

std::vector<std::optional<double>> read_ratio_column(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": missing header");
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  const auto header = split(line);
  std::size_t col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == "ratio") col = i;
  if (col == header.size()) throw std::runtime_error(path.string() + ": no ratio column");
  std::vector<std::optional<double>> ratios;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (col >= cells.size() || cells[col].empty())
      ratios.emplace_back();
    else
      ratios.emplace_back(std::stod(cells[col]));
  }
  return ratios;
}

}  // namespace lsbw
