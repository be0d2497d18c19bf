#include <algorithm>
#include <cmath>
#include <numeric>

#include "lsbw/errors.hpp"
#include "lsbw/harness.hpp"

namespace lsbw {
namespace {

struct Ranked {
  std::vector<double> ranks;  // average ranks of |d|
  std::vector<bool> positive;
  double tie_term = 0.0;      // sum of t^3 - t over tie groups
};

Ranked rank_nonzero(std::span<const double> differences) {
  std::vector<double> d;
  for (double v : differences) {
    if (!std::isfinite(v)) throw ArgumentError("differences must be finite");
    if (v != 0.0) d.push_back(v);
  }
  if (d.empty()) throw ArgumentError("all differences are zero; the signed-rank test is degenerate");
  std::vector<std::size_t> idx(d.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return std::abs(d[a]) < std::abs(d[b]); });
  Ranked r;
  r.ranks.resize(d.size());
  r.positive.resize(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) r.positive[i] = d[i] > 0.0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && std::abs(d[idx[j + 1]]) == std::abs(d[idx[i]])) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r.ranks[idx[k]] = avg;
    const double t = static_cast<double>(j - i + 1);
    r.tie_term += t * t * t - t;
    i = j + 1;
  }
  return r;
}

double positive_rank_sum(const Ranked& r) {
  double w = 0.0;
  for (std::size_t i = 0; i < r.ranks.size(); ++i)
    if (r.positive[i]) w += r.ranks[i];
  return w;
}

}  // namespace

WilcoxonResult wilcoxon_exact(std::span<const double> differences) {
  const Ranked r = rank_nonzero(differences);
  // Doubled average ranks are integers; count sign assignments per sum.
  std::vector<int> doubled;
  int total = 0;
  for (double rank : r.ranks) {
    doubled.push_back(static_cast<int>(std::lround(2.0 * rank)));
    total += doubled.back();
  }
  std::vector<double> count(static_cast<std::size_t>(total) + 1, 0.0);
  count[0] = 1.0;
  int reach = 0;
  for (int v : doubled) {
    for (int s = reach; s >= 0; --s) count[static_cast<std::size_t>(s + v)] += count[static_cast<std::size_t>(s)];
    reach += v;
  }
  WilcoxonResult res;
  res.statistic = positive_rank_sum(r);
  res.n_used = r.ranks.size();
  res.exact = true;
  const int w2 = static_cast<int>(std::lround(2.0 * res.statistic));
  const double all = std::ldexp(1.0, static_cast<int>(doubled.size()));
  double lower = 0.0, upper = 0.0;
  for (int s = 0; s <= total; ++s) {
    if (s <= w2) lower += count[static_cast<std::size_t>(s)];
    if (s >= w2) upper += count[static_cast<std::size_t>(s)];
  }
  res.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / all);
  return res;
}

WilcoxonResult wilcoxon_normal(std::span<const double> differences) {
  const Ranked r = rank_nonzero(differences);
  const double n = static_cast<double>(r.ranks.size());
  WilcoxonResult res;
  res.statistic = positive_rank_sum(r);
  res.n_used = r.ranks.size();
  const double mean = n * (n + 1.0) / 4.0;
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - r.tie_term / 48.0;
  if (!(var > 0.0)) {
    res.p_value = 1.0;
    return res;
  }
  const double dev = std::max(0.0, std::abs(res.statistic - mean) - 0.5);
  res.p_value = std::min(1.0, std::erfc(dev / std::sqrt(var) / std::sqrt(2.0)));
  return res;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> differences) {
  std::size_t nonzero = 0;
  for (double v : differences) nonzero += v != 0.0 ? 1 : 0;
  return nonzero <= 20 ? wilcoxon_exact(differences) : wilcoxon_normal(differences);
}

WilcoxonResult wilcoxon_signed_rank(std::span<const std::pair<double, double>> pairs) {
  std::vector<double> d;
  d.reserve(pairs.size());
  for (const auto& [a, b] : pairs) d.push_back(a - b);
  return wilcoxon_signed_rank(std::span<const double>(d));
}

}  // namespace lsbw
