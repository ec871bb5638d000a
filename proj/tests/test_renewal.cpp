#include <cmath>
#include <vector>

#include "ctstat/error.hpp"
#include "ctstat/random.hpp"
#include "ctstat/renewal.hpp"
#include "doctest.h"

using namespace ctstat;

namespace {

double poisson_oracle(double mean, int n) {
  // direct product form, independent of the log-space evaluation
  double p = std::exp(-mean);
  for (int k = 1; k <= n; ++k) p *= mean / k;
  return p;
}

}  // namespace

TEST_CASE("epochs from fixed waits") {
  const std::vector<double> waits{0.5, 0.25, 1.0, 2.0};
  std::size_t i = 0;
  const EpochSequence seq = accumulate_epochs(1.75, [&] { return waits[i++]; });
  REQUIRE(seq.epochs.size() == 3);
  CHECK(seq.epochs[0] == 0.5);
  CHECK(seq.epochs[1] == 0.75);
  CHECK(seq.epochs[2] == 1.75);  // an epoch exactly at the horizon is kept
  CHECK(count_at(seq, 0.0) == 0);
  CHECK(count_at(seq, 0.5) == 1);  // N(t) counts T_n <= t
  CHECK(count_at(seq, 0.74) == 1);
  CHECK(count_at(seq, 1.75) == 3);
  CHECK_THROWS_AS(count_at(seq, 2.0), DomainError);
  CHECK_THROWS_AS(accumulate_epochs(0.0, [] { return 1.0; }), DomainError);
}

TEST_CASE("generated epochs are increasing and bounded") {
  RandomSource rng(5);
  const EpochSequence seq = generate_epochs(InterEventLaw::mittag_leffler(0.6), 50.0, rng);
  for (std::size_t k = 0; k < seq.epochs.size(); ++k) {
    CHECK(seq.epochs[k] <= 50.0);
    if (k > 0) CHECK(seq.epochs[k] > seq.epochs[k - 1]);
  }
}

TEST_CASE("Poisson pmf") {
  for (double mean : {0.1, 2.0, 15.0})
    for (int n : {0, 1, 5, 20}) CHECK(poisson_pmf(mean, n) == doctest::Approx(poisson_oracle(mean, n)).epsilon(1e-12));
  CHECK(poisson_pmf(0.0, 0) == 1.0);
  CHECK(poisson_pmf(0.0, 3) == 0.0);
  CHECK(poisson_pmf(1.0, -1) == 0.0);
}

TEST_CASE("exponential waits give the Poisson law") {
  const CountingPmfTable t = counting_pmf(InterEventLaw::exponential(1.5), 2.0, 12);
  for (int n = 0; n <= 12; ++n) CHECK(t[n] == doctest::Approx(poisson_oracle(3.0, n)).epsilon(1e-12));
  CHECK(t.total() + t.tail_bound == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("Mittag-Leffler(1) inversion reproduces Poisson(2)") {
  const CountingPmfTable t = counting_pmf(InterEventLaw::mittag_leffler(1.0), 2.0, 10);
  for (int n = 0; n <= 10; ++n) {
    CAPTURE(n);
    CHECK(std::abs(t[n] - poisson_oracle(2.0, n)) < 1e-6);
  }
}

TEST_CASE("fractional Poisson pmf") {
  const auto law = InterEventLaw::mittag_leffler(0.7);
  const CountingPmfTable t = counting_pmf_auto(law, 1.0, 1e-6);
  CHECK(t.total() >= 1.0 - 1e-6);
  CHECK(t.tail_bound < 1e-6);
  CHECK(t[0] == doctest::Approx(law.survival(1.0)).epsilon(1e-10));
  for (double p : t.probabilities) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }

  // Mean count against simulation (P(N(t) > truncation) < 1e-6 is negligible).
  double mean = 0.0;
  for (int n = 0; n <= t.truncation; ++n) mean += n * t[n];
  const int paths = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < paths; ++i) {
    RandomSource rng(stream_seed(11, i));
    const double n = static_cast<double>(generate_epochs(law, 1.0, rng).epochs.size());
    sum += n;
    sum2 += n * n;
  }
  const double m = sum / paths;
  const double sd = std::sqrt((sum2 / paths - m * m) / paths);
  CHECK(std::abs(m - mean) < 4.0 * sd);
}

TEST_CASE("Gaver-Stehfest route agrees loosely") {
  const auto law = InterEventLaw::mittag_leffler(0.8);
  const CountingPmfTable a = counting_pmf(law, 1.5, 5);
  const CountingPmfTable b = counting_pmf(law, 1.5, 5, InversionConfig::gaver_stehfest());
  for (int n = 0; n <= 5; ++n) CHECK(std::abs(a[n] - b[n]) < 1e-4);
}

TEST_CASE("pmf edge cases") {
  const auto law = InterEventLaw::mittag_leffler(0.5);
  const CountingPmfTable zero = counting_pmf(law, 0.0, 3);
  CHECK(zero[0] == 1.0);
  CHECK(zero[3] == 0.0);
  CHECK(zero.tail_bound == 0.0);
  CHECK_THROWS_AS(counting_pmf(law, -1.0, 3), DomainError);
  CHECK_THROWS_AS(counting_pmf(law, 1.0, -1), DomainError);
  CHECK_THROWS_AS(counting_pmf(law, 1.0, 10001), DomainError);
  CHECK_THROWS_AS(counting_pmf_auto(law, 1.0, 0.0), DomainError);
}
