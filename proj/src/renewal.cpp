#include "ctstat/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ctstat {

namespace {

constexpr int kMaxTruncation = 10000;

// Inversion noise can push probabilities of order 1e-13 slightly negative.
constexpr double kNegativeSlack = 1e-10;

double checked_probability(double p, int n, double t, const char* what) {
  if (p < -kNegativeSlack || p > 1.0 + kNegativeSlack || !std::isfinite(p)) {
    std::ostringstream os;
    os << "counting_pmf: " << what << " out of range (" << p << ") at n=" << n << ", t=" << t;
    throw NumericError(os.str());
  }
  return std::clamp(p, 0.0, 1.0);
}

double invert_at(const LaplaceSymbol& symbol, double t, int n, const InversionConfig& config) {
  try {
    return invert(symbol, t, config);
  } catch (const NumericError& e) {
    std::ostringstream os;
    os << "counting_pmf: inversion failed at n=" << n << ", t=" << t << ": " << e.what();
    throw NumericError(os.str());
  }
}

double poisson_upper_tail(double mean, int n_max, double cumulative) {
  const int start = n_max + 1;
  if (static_cast<double>(start) <= mean) return std::max(0.0, 1.0 - cumulative);
  double tail = 0.0;
  for (int k = start; k < start + 100000; ++k) {
    const double p = poisson_pmf(mean, k);
    tail += p;
    if (p <= 1e-18 * tail || p == 0.0) break;
  }
  return tail;
}

CountingPmfTable trivial_table() {
  CountingPmfTable table;
  table.probabilities = {1.0};
  return table;
}

}  // namespace

std::size_t count_at(const EpochSequence& epochs, double t) {
  if (!(t >= 0.0 && t <= epochs.horizon)) throw DomainError("count_at: t must lie within [0, horizon]");
  return static_cast<std::size_t>(std::upper_bound(epochs.epochs.begin(), epochs.epochs.end(), t) -
                                  epochs.epochs.begin());
}

double CountingPmfTable::total() const {
  double sum = 0.0;
  for (double p : probabilities) sum += p;
  return sum;
}

double poisson_pmf(double mean, int n) {
  if (n < 0) return 0.0;
  if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(n * std::log(mean) - mean - log_gamma(n + 1.0));
}

CountingPmfTable counting_pmf(const InterEventLaw& law, double t, int n_max, const InversionConfig& config) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("counting_pmf: t must be non-negative");
  if (n_max < 0) throw DomainError("counting_pmf: n_max must be non-negative");
  if (n_max > kMaxTruncation) throw DomainError("counting_pmf: n_max exceeds 10^4");
  if (t == 0.0) {
    CountingPmfTable table = trivial_table();
    table.probabilities.resize(n_max + 1, 0.0);
    table.truncation = n_max;
    return table;
  }

  CountingPmfTable table;
  table.t = t;
  table.truncation = n_max;
  table.probabilities.reserve(n_max + 1);

  if (const auto* e = std::get_if<InterEventLaw::Exponential>(&law.variant())) {
    const double mean = e->rate * t;
    double cumulative = 0.0;
    for (int n = 0; n <= n_max; ++n) {
      table.probabilities.push_back(poisson_pmf(mean, n));
      cumulative += table.probabilities.back();
    }
    table.tail_bound = poisson_upper_tail(mean, n_max, cumulative);
    return table;
  }

  for (int n = 0; n <= n_max; ++n) {
    const double p = invert_at(counting_pmf_symbol(law, n), t, n, config);
    table.probabilities.push_back(checked_probability(p, n, t, "probability"));
  }
  const double tail = invert_at(epoch_cdf_symbol(law, n_max + 1), t, n_max + 1, config);
  table.tail_bound = checked_probability(tail, n_max + 1, t, "tail bound");
  return table;
}

CountingPmfTable counting_pmf_auto(const InterEventLaw& law, double t, double tail_tolerance,
                                   const InversionConfig& config) {
  if (!(tail_tolerance > 0.0)) throw DomainError("counting_pmf: tail tolerance must be positive");
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("counting_pmf: t must be non-negative");
  if (t == 0.0) return trivial_table();

  if (const auto* e = std::get_if<InterEventLaw::Exponential>(&law.variant())) {
    const double mean = e->rate * t;
    CountingPmfTable table;
    table.t = t;
    double cumulative = 0.0;
    for (int n = 0; n <= kMaxTruncation; ++n) {
      table.probabilities.push_back(poisson_pmf(mean, n));
      cumulative += table.probabilities.back();
      table.truncation = n;
      if (n + 1 > mean || n == kMaxTruncation) {
        table.tail_bound = poisson_upper_tail(mean, n, cumulative);
        if (table.tail_bound < tail_tolerance) break;
      }
    }
    return table;
  }

  CountingPmfTable table;
  table.t = t;
  double cumulative = 0.0;
  for (int n = 0; n <= kMaxTruncation; ++n) {
    const double p = invert_at(counting_pmf_symbol(law, n), t, n, config);
    table.probabilities.push_back(checked_probability(p, n, t, "probability"));
    cumulative += table.probabilities.back();
    table.truncation = n;
    if (1.0 - cumulative < tail_tolerance || n == kMaxTruncation) {
      const double tail = invert_at(epoch_cdf_symbol(law, n + 1), t, n + 1, config);
      table.tail_bound = checked_probability(tail, n + 1, t, "tail bound");
      if (table.tail_bound < tail_tolerance) break;
    }
  }
  return table;
}

}  // namespace ctstat
