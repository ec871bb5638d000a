// Acceptance suite: one PASS/FAIL line per criterion, exit status = number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ctstat/laplace.hpp"
#include "ctstat/mc.hpp"
#include "ctstat/relax.hpp"
#include "ctstat/renewal.hpp"
#include "ctstat/special.hpp"
#include "ctstat/stats.hpp"

using namespace ctstat;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double time_limit, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o{false, ""};
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  std::ostringstream os;
  os << o.detail << "; " << seconds << " s";
  if (time_limit > 0.0) {
    os << " (limit " << time_limit << " s)";
    if (seconds >= time_limit) o.pass = false;
  }
  std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, title, os.str().c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

int worker_count() { return static_cast<int>(std::clamp(std::thread::hardware_concurrency(), 1u, 8u)); }

std::string fmt(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.3g", x);
  return buffer;
}

double poisson(double mean, int n) {
  double p = std::exp(-mean);
  for (int k = 1; k <= n; ++k) p *= mean / k;
  return p;
}

double max_ml_error(const RelaxationSolution& s, MlOrder order) {
  double worst = 0.0;
  for (std::size_t i = 0; i < s.grid.size(); ++i)
    worst = std::max(worst, std::abs(s.values[i] - ml_survival(order, s.grid[i])));
  return worst;
}

}  // namespace

int main() {
  criterion(1, "Mittag-Leffler correctness", 1.0, [] {
    double worst = 0.0;
    for (int i = 0; i < 300; ++i) {
      const double z = -30.0 * i / 299.0;
      worst = std::max(worst, std::abs(ml_one_param(MlOrder(1.0), z).value - std::exp(z)));
    }
    long double oracle = 0.0L;  // extended-precision Taylor series of E_0.5(-1)
    for (int n = 0; n < 200; ++n) oracle += std::pow(-1.0L, n) / std::tgamma(0.5L * n + 1.0L);
    const double half = ml_one_param(MlOrder(0.5), -1.0).value;
    const double err = std::abs(half - static_cast<double>(oracle));
    const double err_quoted = std::abs(half - 0.4275836);
    return Outcome{worst < 1e-12 && err < 1e-6 && err_quoted < 1e-6,
                   "max|E_1(z)-exp z| = " + fmt(worst) + " (< 1e-12), |E_0.5(-1) - series| = " + fmt(err) +
                       ", vs 0.4275836: " + fmt(err_quoted) + " (< 1e-6)"};
  });

  criterion(2, "Gumbel limit", 1.0, [] {
    double worst = 0.0;
    const JumpLaw e = JumpLaw::exponential(1.0);
    for (int i = 1; i <= 20; ++i)
      for (int j = 0; j < 20; ++j) {
        const double t = 0.25 * i, w = 5.0 * j / 19.0;
        worst = std::max(worst, std::abs(max_cdf(MlOrder(1.0), e, t, w) - std::exp(-std::exp(-w) * t)));
      }
    return Outcome{worst < 1e-10, "max deviation on 20x20 grid = " + fmt(worst) + " (< 1e-10)"};
  });

  criterion(3, "Fractional Gumbel vs simulation", 30.0, [] {
    SimulationPlan plan;
    plan.kind = StatisticKind::Max;
    plan.jump_law = JumpLaw::exponential(1.0);
    plan.ie_law = InterEventLaw::mittag_leffler(0.7);
    plan.t = 1.5;
    plan.n_paths = 100000;
    plan.master_seed = 20240601;
    const Ecdf ecdf(simulate_statistic(plan, worker_count()));
    const KsReport r =
        ks_distance(ecdf, [&](double w) { return max_cdf(MlOrder(0.7), plan.jump_law, plan.t, w); });
    return Outcome{r.pass, "KS D = " + fmt(r.d) + " (< " + fmt(r.threshold) + ")"};
  });

  criterion(4, "Compound-Poisson sum vs simulation", 30.0, [] {
    SimulationPlan plan;
    plan.kind = StatisticKind::Sum;
    plan.jump_law = JumpLaw::exponential(1.0);
    plan.ie_law = InterEventLaw::exponential(1.0);
    plan.t = 2.0;
    plan.n_paths = 100000;
    plan.master_seed = 20240602;
    const Ecdf ecdf(simulate_statistic(plan, worker_count()));
    const std::vector<double> points = ecdf.support();
    const std::vector<double> cdf = sum_cdf_series(plan.jump_law, 1.0, plan.t, points, 1e-8);
    std::vector<double> left(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) left[k] = points[k] > 0.0 ? cdf[k] : 0.0;
    const KsReport r = ks_from_values(ecdf, cdf, left);
    return Outcome{r.pass, "KS D = " + fmt(r.d) + " (< " + fmt(r.threshold) + ")"};
  });

  criterion(5, "Relaxation solver vs closed form", 60.0, [] {
    RelaxationProblem p;
    p.kernel = KernelSpec::power_law(0.6);
    p.c = 1.0;
    p.t_max = 5.0;
    p.step = 1e-3;
    SolverOptions options;
    options.threads = 2;
    const RelaxationSolution coarse = solve_relaxation(p, options);
    p.step = 5e-4;
    options.estimate_error = false;
    const RelaxationSolution fine = solve_relaxation(p, options);
    const double e1 = max_ml_error(coarse, MlOrder(0.6));
    const double e2 = max_ml_error(fine, MlOrder(0.6));
    const double order = std::log2(e1 / e2);
    return Outcome{e1 < 1e-3 && order >= 1.1, "max error at h=1e-3 = " + fmt(e1) + " (< 1e-3), at h/2 = " + fmt(e2) +
                                                  ", empirical order = " + fmt(order) + " (>= 1.1)"};
  });

  criterion(6, "Delta-kernel reduction", 0.0, [] {
    RelaxationProblem p;
    p.kernel = KernelSpec::delta();
    p.c = 1.0;
    p.t_max = 5.0;
    p.step = 1e-3;
    const RelaxationSolution s = solve_relaxation(p);
    double worst = 0.0;
    for (std::size_t i = 0; i < s.grid.size(); ++i) worst = std::max(worst, std::abs(s.values[i] - std::exp(-s.grid[i])));
    return Outcome{worst < 1e-8, "max |Q - e^-t| on [0,5] = " + fmt(worst) + " (< 1e-8)"};
  });

  criterion(7, "Two-state semi-Markov relaxation", 30.0, [] {
    const std::vector<double> ts{0.5, 1.0, 2.0};
    const std::size_t n = 100000;
    const OccupancyTable occ = simulate_chain(TransitionMatrix::absorbing_two_state(), 0,
                                              InterEventLaw::mittag_leffler(0.7), ts, n, 20240603, worker_count());
    bool pass = true;
    std::string detail;
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const double p = ml_survival(MlOrder(0.7), ts[k]);
      const double band = 3.0 * std::sqrt(p * (1.0 - p) / n);
      const double dev = std::abs(occ.fraction[0][k] - p);
      pass = pass && dev < band;
      detail += (k ? ", " : "") + std::string("t=") + fmt(ts[k]) + ": |dev| " + fmt(dev) + " < " + fmt(band);
    }
    return Outcome{pass, detail};
  });

  criterion(8, "Counting pmf inversion", 10.0, [] {
    const CountingPmfTable one = counting_pmf(InterEventLaw::mittag_leffler(1.0), 2.0, 10);
    double worst = 0.0;
    for (int n = 0; n <= 10; ++n) worst = std::max(worst, std::abs(one[n] - poisson(2.0, n)));
    const CountingPmfTable frac = counting_pmf_auto(InterEventLaw::mittag_leffler(0.7), 1.0, 1e-6);
    const double total = frac.total();
    return Outcome{worst < 1e-6 && total >= 1.0 - 1e-6,
                   "max |pmf - Poisson(2)| = " + fmt(worst) + " (< 1e-6), alpha=0.7 partial sum = 1 - " +
                       fmt(1.0 - total) + " over " + std::to_string(frac.truncation + 1) + " terms (>= 1 - 1e-6)"};
  });

  criterion(9, "Montroll-Weiss consistency", 0.0, [] {
    double worst = 0.0;
    for (const auto& law : {InterEventLaw::exponential(1.0), InterEventLaw::mittag_leffler(0.7)})
      for (double t : {0.5, 2.0}) {
        const CountingPmfTable pmf = counting_pmf_auto(law, t, 1e-10);
        for (double v : {0.0, 0.3, 0.7, 1.0}) {
          double series = 0.0, power = 1.0;
          for (int n = 0; n <= pmf.truncation; ++n, power *= v) series += power * pmf[n];
          worst = std::max(worst, std::abs(invert(mw_symbol(v, law), t) - series));
        }
      }
    return Outcome{worst < 1e-4, "max |inverse - sum v^n pmf(n)| = " + fmt(worst) + " (< 1e-4)"};
  });

  criterion(10, "Kernel identity", 0.0, [] {
    double identity = 0.0, power = 0.0;
    for (const auto& law : {InterEventLaw::exponential(1.0), InterEventLaw::mittag_leffler(0.7)})
      for (double s : {0.1, 1.0, 10.0}) {
        const double f = density_symbol(law)(s);
        identity = std::max(identity, std::abs(kernel_symbol(law)(s) * s * f - (1.0 - f)));
      }
    for (double s : {0.1, 1.0, 10.0})
      power = std::max(power, std::abs(kernel_symbol(InterEventLaw::mittag_leffler(0.7))(s) - std::pow(s, -0.3)));
    return Outcome{identity < 1e-12 && power < 1e-12,
                   "identity residual = " + fmt(identity) + ", |kernel - s^(a-1)| = " + fmt(power) + " (< 1e-12)"};
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures;
}
