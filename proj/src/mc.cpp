#include "ctstat/mc.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "ctstat/error.hpp"
#include "ctstat/random.hpp"

namespace ctstat {

namespace {

// Runs body(begin, end) over contiguous blocks of [0, n).  Each index is
// handled exactly once, so per-index results are independent of `threads`.
template <typename Body>
void parallel_blocks(std::size_t n, int threads, Body body) {
  const std::size_t workers = std::clamp<std::size_t>(threads < 1 ? 1 : threads, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(n, w * chunk);
    const std::size_t end = std::min(n, begin + chunk);
    pool.emplace_back([=, &body] { body(begin, end); });
  }
}

template <UniformSource R>
std::size_t draw_count(const InterEventLaw& law, double t, R& rng) {
  std::size_t n = 0;
  double epoch = 0.0;
  for (;;) {
    epoch += sample_waiting_time(law, rng);
    if (epoch > t) return n;
    ++n;
  }
}

}  // namespace

std::vector<double> simulate_statistic(const SimulationPlan& plan, int threads) {
  if (plan.n_paths < 1) throw DomainError("simulate_statistic: n_paths must be at least 1");
  if (!(plan.t >= 0.0) || !std::isfinite(plan.t)) throw DomainError("simulate_statistic: t must be non-negative");

  std::vector<double> out(plan.n_paths, 0.0);
  parallel_blocks(plan.n_paths, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      RandomSource rng(stream_seed(plan.master_seed, i));
      const std::size_t n = draw_count(plan.ie_law, plan.t, rng);
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double x = plan.jump_law.sample(rng);
        s = plan.kind == StatisticKind::Sum ? s + x : std::max(s, x);
      }
      out[i] = s;
    }
  });
  std::sort(out.begin(), out.end());
  return out;
}

OccupancyTable simulate_chain(const TransitionMatrix& q, std::size_t start, const InterEventLaw& ie_law,
                              std::span<const double> t_grid, std::size_t n_paths, std::uint64_t master_seed,
                              int threads) {
  if (start >= q.size()) throw DomainError("simulate_chain: start state out of range");
  if (n_paths < 1) throw DomainError("simulate_chain: n_paths must be at least 1");
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (!(t_grid[k] >= 0.0) || !std::isfinite(t_grid[k]))
      throw DomainError("simulate_chain: grid times must be non-negative");
    if (k > 0 && t_grid[k] < t_grid[k - 1]) throw DomainError("simulate_chain: grid must be non-decreasing");
  }

  const std::size_t n_states = q.size();
  const std::size_t n_times = t_grid.size();
  // Cumulative rows for inverse-transform sampling of the next state.
  std::vector<double> cumulative(n_states * n_states);
  for (std::size_t i = 0; i < n_states; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n_states; ++j) cumulative[i * n_states + j] = (acc += q(i, j));
  }

  std::vector<std::uint32_t> state_at(n_paths * n_times);
  parallel_blocks(n_paths, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      RandomSource rng(stream_seed(master_seed, p));
      std::size_t state = start;
      double next_epoch = sample_waiting_time(ie_law, rng);
      for (std::size_t k = 0; k < n_times; ++k) {
        while (next_epoch <= t_grid[k]) {
          const double u = rng.uniform();
          const double* row = &cumulative[state * n_states];
          std::size_t j = 0;
          while (j + 1 < n_states && u >= row[j]) ++j;
          // Skip over zero-probability trailing states picked by rounding.
          while (j > 0 && q(state, j) == 0.0) --j;
          state = j;
          next_epoch += sample_waiting_time(ie_law, rng);
        }
        state_at[p * n_times + k] = static_cast<std::uint32_t>(state);
      }
    }
  });

  OccupancyTable table;
  table.states = q.states();
  table.times.assign(t_grid.begin(), t_grid.end());
  table.n_paths = n_paths;
  table.fraction.assign(n_states, std::vector<double>(n_times, 0.0));
  std::vector<std::size_t> counts(n_states * n_times, 0);
  for (std::size_t p = 0; p < n_paths; ++p)
    for (std::size_t k = 0; k < n_times; ++k) ++counts[state_at[p * n_times + k] * n_times + k];
  for (std::size_t s = 0; s < n_states; ++s)
    for (std::size_t k = 0; k < n_times; ++k)
      table.fraction[s][k] = static_cast<double>(counts[s * n_times + k]) / static_cast<double>(n_paths);
  return table;
}

Ecdf::Ecdf(std::vector<double> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) throw DomainError("ECDF needs at least one sample");
  for (double x : samples_)
    if (std::isnan(x)) throw DomainError("ECDF: NaN sample");
  std::sort(samples_.begin(), samples_.end());
}

double Ecdf::operator()(double u) const {
  const auto it = std::upper_bound(samples_.begin(), samples_.end(), u);
  return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
}

std::vector<double> Ecdf::support() const {
  std::vector<double> out = samples_;
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Ecdf build_ecdf(std::vector<double> samples) { return Ecdf(std::move(samples)); }

double default_ks_threshold(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

KsReport ks_from_values(const Ecdf& ecdf, std::span<const double> cdf_values, std::span<const double> left_limits,
                        double threshold) {
  const auto& xs = ecdf.samples();
  const std::size_t n = xs.size();
  const double nd = static_cast<double>(n);
  double d = 0.0;
  std::size_t i = 0, k = 0;
  while (i < n) {
    if (k >= cdf_values.size() || k >= left_limits.size())
      throw DomainError("ks: one CDF value and left limit per distinct sample required");
    std::size_t last = i;
    while (last + 1 < n && xs[last + 1] == xs[i]) ++last;
    d = std::max(d, std::abs(static_cast<double>(last + 1) / nd - cdf_values[k]));
    d = std::max(d, std::abs(static_cast<double>(i) / nd - left_limits[k]));
    i = last + 1;
    ++k;
  }
  KsReport report;
  report.d = std::min(d, 1.0);
  report.n = n;
  report.threshold = threshold > 0.0 ? threshold : default_ks_threshold(n);
  report.pass = report.d < report.threshold;
  return report;
}

KsReport ks_distance(const Ecdf& ecdf, const std::function<double(double)>& cdf, double threshold,
                     const std::function<double(double)>& left_limit) {
  const std::vector<double> points = ecdf.support();
  std::vector<double> values(points.size()), lefts(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    values[k] = cdf(points[k]);
    if (left_limit)
      lefts[k] = left_limit(points[k]);
    else
      lefts[k] = points[k] > 0.0 ? values[k] : 0.0;
  }
  return ks_from_values(ecdf, values, lefts, threshold);
}

}  // namespace ctstat
