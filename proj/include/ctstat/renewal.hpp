#pragma once

#include <cstddef>
#include <vector>

#include "ctstat/error.hpp"
#include "ctstat/laplace.hpp"
#include "ctstat/waiting_time.hpp"

namespace ctstat {

/// Renewal epochs T_1 < T_2 < ... <= horizon.  T_0 = 0 is implicit.
struct EpochSequence {
  std::vector<double> epochs;
  double horizon = 0.0;
};

/// Partial sums of the waiting times returned by `next_wait`, stopped at the
/// first epoch past `horizon` (which is not kept).
template <typename WaitFn>
EpochSequence accumulate_epochs(double horizon, WaitFn&& next_wait) {
  if (!(horizon > 0.0)) throw DomainError("generate_epochs: horizon must be positive");
  EpochSequence out;
  out.horizon = horizon;
  double t = 0.0;
  for (;;) {
    t += next_wait();
    if (t > horizon) break;
    out.epochs.push_back(t);
  }
  return out;
}

template <UniformSource R>
EpochSequence generate_epochs(const InterEventLaw& law, double horizon, R& rng) {
  return accumulate_epochs(horizon, [&] { return sample_waiting_time(law, rng); });
}

/// N(t) = max{n : T_n <= t}.
std::size_t count_at(const EpochSequence& epochs, double t);

/// P(N(t) = n) for n = 0..truncation.
struct CountingPmfTable {
  double t = 0.0;
  std::vector<double> probabilities;
  int truncation = 0;
  /// Mass beyond the table, P(N(t) > truncation) = P(T_{truncation+1} <= t).
  double tail_bound = 0.0;

  double operator[](std::size_t n) const { return n < probabilities.size() ? probabilities[n] : 0.0; }
  double total() const;
};

/// Exponential laws use the Poisson pmf in closed form.  Other laws invert
/// L(1 - F_J)(s) [L(f_J)(s)]^n numerically for each n; the tail bound is the
/// inverted epoch CDF [L(f_J)(s)]^(N+1)/s.  Inversion failures raise
/// NumericError naming (n, t).
CountingPmfTable counting_pmf(const InterEventLaw& law, double t, int n_max, const InversionConfig& config = {});

/// Same, with the truncation chosen as the smallest N whose tail bound is
/// below `tail_tolerance`, capped at 10^4 terms.
CountingPmfTable counting_pmf_auto(const InterEventLaw& law, double t, double tail_tolerance = 1e-6,
                                   const InversionConfig& config = {});

/// Poisson(mean) pmf at n, evaluated in log space.
double poisson_pmf(double mean, int n);

}  // namespace ctstat
