#include <cmath>
#include <numeric>
#include <vector>

#include "ctstat/error.hpp"
#include "ctstat/mc.hpp"
#include "ctstat/random.hpp"
#include "doctest.h"

using namespace ctstat;

namespace {

SimulationPlan plan(StatisticKind kind, InterEventLaw waits, double t, std::size_t paths, std::uint64_t seed) {
  SimulationPlan p;
  p.kind = kind;
  p.jump_law = JumpLaw::exponential(1.0);
  p.ie_law = waits;
  p.t = t;
  p.n_paths = paths;
  p.master_seed = seed;
  return p;
}

}  // namespace

TEST_CASE("empty statistic at t = 0") {
  for (auto kind : {StatisticKind::Sum, StatisticKind::Max}) {
    const auto s = simulate_statistic(plan(kind, InterEventLaw::mittag_leffler(0.5), 0.0, 1000, 1));
    for (double x : s) CHECK(x == 0.0);
  }
}

TEST_CASE("compound-Poisson moments") {
  const auto s = simulate_statistic(plan(StatisticKind::Sum, InterEventLaw::exponential(), 2.0, 100000, 42), 4);
  const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
  // E S = 2, Var S = 4, so 3 sd of the mean is 0.019
  CHECK(std::abs(mean - 2.0) < 0.02);
}

TEST_CASE("seed determinism across thread counts") {
  const auto p = plan(StatisticKind::Max, InterEventLaw::mittag_leffler(0.7), 1.5, 20000, 77);
  const auto a = simulate_statistic(p, 1);
  CHECK(a == simulate_statistic(p, 3));
  CHECK(a == simulate_statistic(p, 8));
  CHECK(std::is_sorted(a.begin(), a.end()));
  auto other = p;
  other.master_seed = 78;
  CHECK(a != simulate_statistic(other, 1));
  CHECK_THROWS_AS(simulate_statistic(plan(StatisticKind::Sum, InterEventLaw::exponential(), 1.0, 0, 1)),
                  DomainError);
}

TEST_CASE("atom at zero equals P(N(t) = 0)") {
  const std::size_t n = 100000;
  for (auto kind : {StatisticKind::Sum, StatisticKind::Max}) {
    const auto waits = InterEventLaw::mittag_leffler(0.7);
    const auto s = simulate_statistic(plan(kind, waits, 1.5, n, 5), 2);
    const double zeros = static_cast<double>(std::count(s.begin(), s.end(), 0.0)) / n;
    const double p = waits.survival(1.5);
    CHECK(std::abs(zeros - p) < 3.0 * std::sqrt(p * (1.0 - p) / n));
  }
}

TEST_CASE("ECDF") {
  const Ecdf e({3.0, 1.0, 2.0, 2.0});
  CHECK(e(0.5) == 0.0);
  CHECK(e(1.0) == 0.25);
  CHECK(e(2.0) == 0.75);
  CHECK(e(10.0) == 1.0);
  CHECK(e.support() == std::vector<double>{1.0, 2.0, 3.0});
  CHECK_THROWS_AS(build_ecdf({}), DomainError);
}

TEST_CASE("KS distance constructions") {
  const auto uniform = [](double u) { return std::clamp(u, 0.0, 1.0); };
  // one sample at the median
  CHECK(ks_distance(build_ecdf({0.5}), uniform).d == doctest::Approx(0.5));
  // samples at the quantiles k/(n+1)
  const int n = 999;
  std::vector<double> q(n);
  for (int k = 0; k < n; ++k) q[k] = (k + 1.0) / (n + 1.0);
  CHECK(ks_distance(build_ecdf(q), uniform).d <= 1.0 / (n + 1) + 1.0 / (n + 1) + 1e-12);
  // tied samples: four copies of 0.5 jump the ECDF by one at once
  const KsReport tied = ks_distance(build_ecdf({0.5, 0.5, 0.5, 0.5}), uniform);
  CHECK(tied.d == doctest::Approx(0.5));
  // an atom at 0 is matched through the left limit F(0-) = 0
  const auto atom = [](double u) { return 0.5 + 0.5 * std::clamp(u, 0.0, 1.0); };
  std::vector<double> mixed(1000, 0.0);
  for (int k = 0; k < 500; ++k) mixed[500 + k] = (k + 0.5) / 500.0;
  CHECK(ks_distance(build_ecdf(mixed), atom).d < 2e-3);
  const KsReport r = ks_distance(build_ecdf(mixed), atom, 0.01);
  CHECK(r.threshold == 0.01);
  CHECK(r.pass);
  CHECK(r.n == 1000);
}

TEST_CASE("KS threshold calibration on uniform samples") {
  int failures = 0;
  const std::size_t n = 100000;
  std::vector<double> samples(n);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomSource rng(stream_seed(1234, seed));
    for (double& x : samples) x = rng.uniform();
    const KsReport r = ks_distance(build_ecdf(samples), [](double u) { return u; });
    CHECK(r.threshold == doctest::Approx(0.00515).epsilon(1e-3));
    if (!r.pass) ++failures;
  }
  CHECK(failures <= 3);
}

TEST_CASE("chain occupancy") {
  const auto q = TransitionMatrix::absorbing_two_state();
  const std::vector<double> ts{0.0, 1.0};
  const std::size_t n = 100000;
  const OccupancyTable occ = simulate_chain(q, 0, InterEventLaw::exponential(), ts, n, 3, 4);
  CHECK(occ.fraction[0][0] == 1.0);
  const double p = std::exp(-1.0);
  CHECK(std::abs(occ.fraction[0][1] - p) < 3.0 * std::sqrt(p * (1.0 - p) / n));
  CHECK(occ.fraction[0][1] + occ.fraction[1][1] == doctest::Approx(1.0));
  CHECK(simulate_chain(q, 0, InterEventLaw::exponential(), ts, 1000, 3, 1).fraction ==
        simulate_chain(q, 0, InterEventLaw::exponential(), ts, 1000, 3, 5).fraction);
  const std::vector<double> unordered{1.0, 0.5};
  CHECK_THROWS_AS(simulate_chain(q, 0, InterEventLaw::exponential(), unordered, 10, 1), DomainError);
  CHECK_THROWS_AS(simulate_chain(q, 2, InterEventLaw::exponential(), ts, 10, 1), DomainError);
}

TEST_CASE("fractional chain occupancy") {
  const auto q = TransitionMatrix::absorbing_two_state();
  const std::vector<double> ts{0.5, 1.0, 2.0};
  const std::size_t n = 100000;
  const OccupancyTable occ = simulate_chain(q, 0, InterEventLaw::mittag_leffler(0.7), ts, n, 21, 4);
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double p = ml_survival(MlOrder(0.7), ts[k]);
    CHECK(std::abs(occ.fraction[0][k] - p) < 3.0 * std::sqrt(p * (1.0 - p) / n));
  }
}
