#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ctstat/stats.hpp"
#include "ctstat/waiting_time.hpp"

namespace ctstat {

struct SimulationPlan {
  StatisticKind kind = StatisticKind::Sum;
  JumpLaw jump_law = JumpLaw::exponential();
  InterEventLaw ie_law = InterEventLaw::exponential();
  double t = 1.0;
  std::size_t n_paths = 100000;
  std::uint64_t master_seed = 42;
};

/// One value of S(t) per path, sorted ascending.  Path i draws from its own
/// stream stream_seed(master_seed, i): waiting times until the epoch passes
/// t, then N(t) jumps.  The result does not depend on `threads`.
std::vector<double> simulate_statistic(const SimulationPlan& plan, int threads = 1);

/// Fraction of paths in each state at each grid time.
struct OccupancyTable {
  std::vector<std::string> states;
  std::vector<double> times;
  std::vector<std::vector<double>> fraction;  // [state][time]
  std::size_t n_paths = 0;
};

OccupancyTable simulate_chain(const TransitionMatrix& q, std::size_t start, const InterEventLaw& ie_law,
                              std::span<const double> t_grid, std::size_t n_paths, std::uint64_t master_seed,
                              int threads = 1);

/// Right-continuous empirical CDF.
class Ecdf {
 public:
  explicit Ecdf(std::vector<double> samples);

  double operator()(double u) const;
  std::size_t size() const noexcept { return samples_.size(); }
  const std::vector<double>& samples() const noexcept { return samples_; }
  /// Distinct sample values, ascending.
  std::vector<double> support() const;

 private:
  std::vector<double> samples_;
};

Ecdf build_ecdf(std::vector<double> samples);

struct KsReport {
  double d = 0.0;
  std::size_t n = 0;
  double threshold = 0.0;
  bool pass = false;
};

/// 1.63 / sqrt(n), about the 99% quantile of the KS statistic.
double default_ks_threshold(std::size_t n);

/// sup_u |F_n(u) - F(u)|, attained at a sample point x from the right
/// (F_n(x) vs F(x)) or from the left (F_n(x-) vs F(x-)).  `cdf_values` and
/// `left_limits` hold F and F(-) at every point of ecdf.support().
KsReport ks_from_values(const Ecdf& ecdf, std::span<const double> cdf_values, std::span<const double> left_limits,
                        double threshold = 0.0);

/// The same for a CDF given as a function.  Without `left_limit` the CDF is
/// taken continuous on (0, inf) with F(0-) = 0, which covers an atom at 0.
/// threshold <= 0 selects default_ks_threshold.
KsReport ks_distance(const Ecdf& ecdf, const std::function<double(double)>& cdf, double threshold = 0.0,
                     const std::function<double(double)>& left_limit = {});

}  // namespace ctstat
