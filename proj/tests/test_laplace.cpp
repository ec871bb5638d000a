#include <cmath>
#include <complex>

#include "ctstat/error.hpp"
#include "ctstat/laplace.hpp"
#include "ctstat/renewal.hpp"
#include "doctest.h"

using namespace ctstat;
using cplx = std::complex<double>;

TEST_CASE("symbols of the exponential law") {
  const auto law = InterEventLaw::exponential(2.0);
  CHECK(density_symbol(law)(3.0) == doctest::Approx(0.4));
  CHECK(survival_symbol(law)(3.0) == doctest::Approx(0.2));
  CHECK(kernel_symbol(law)(3.0) == doctest::Approx(0.5));
}

TEST_CASE("kernel identity") {
  for (const auto& law : {InterEventLaw::exponential(1.0), InterEventLaw::mittag_leffler(0.7)})
    for (double s : {0.1, 1.0, 10.0}) {
      const double k = kernel_symbol(law)(s), f = density_symbol(law)(s);
      CHECK(std::abs(k * s * f - (1.0 - f)) < 1e-12);
      CHECK(std::abs(survival_symbol(law)(s) - (1.0 - f) / s) < 1e-12);
    }
  for (double s : {0.1, 1.0, 10.0})
    CHECK(std::abs(kernel_symbol(InterEventLaw::mittag_leffler(0.7))(s) - std::pow(s, -0.3)) < 1e-12);
  // the complex contour uses the principal branch
  const cplx s(-1.0, 2.0);
  const cplx k = kernel_symbol(InterEventLaw::mittag_leffler(0.4))(s);
  CHECK(std::abs(k - std::pow(s, -0.6)) < 1e-14);
}

TEST_CASE("known transform pairs") {
  const LaplaceSymbol unit([](cplx s) { return 1.0 / s; }, "unit");
  const LaplaceSymbol decay([](cplx s) { return 1.0 / (s + 1.0); }, "decay");
  const LaplaceSymbol ramp([](cplx s) { return 1.0 / (s * s); }, "ramp");
  for (double t : {0.1, 1.0, 5.0, 20.0}) {
    CAPTURE(t);
    CHECK(std::abs(invert(unit, t) - 1.0) < 1e-10);
    CHECK(std::abs(invert(decay, t) - std::exp(-t)) < 1e-10);
    CHECK(std::abs(invert(ramp, t) - t) < 1e-9 * std::max(1.0, t));
    // orders 14 and 12 drift apart in double precision once e^{-t} is small
    if (t <= 1.0) CHECK(std::abs(invert(decay, t, InversionConfig::gaver_stehfest()) - std::exp(-t)) < 2e-5);
  }
  // Gaver-Stehfest at order 14 on e^{-t}: the ~1e-6 truncation error that
  // makes Talbot the default.
  const double gs = gaver_stehfest(decay, 1.0, 14);
  CHECK(std::abs(gs - std::exp(-1.0)) > 1e-8);
  CHECK(std::abs(gs - std::exp(-1.0)) < 1e-5);
}

TEST_CASE("Mittag-Leffler survival by inversion") {
  for (double a : {0.3, 0.7, 0.9}) {
    const auto law = InterEventLaw::mittag_leffler(a);
    for (double t : {0.2, 1.0, 4.0}) CHECK(std::abs(invert(survival_symbol(law), t) - law.survival(t)) < 1e-9);
  }
}

TEST_CASE("inversion configuration") {
  CHECK_THROWS_AS(InversionConfig::gaver_stehfest(13).validate(), DomainError);
  CHECK_THROWS_AS(InversionConfig::gaver_stehfest(6).validate(), DomainError);
  CHECK_THROWS_AS(InversionConfig::gaver_stehfest(22).validate(), DomainError);
  CHECK_NOTHROW(InversionConfig::gaver_stehfest(20).validate());
  CHECK_THROWS_AS(InversionConfig::talbot(4).validate(), DomainError);
  const LaplaceSymbol unit([](cplx s) { return 1.0 / s; }, "unit");
  CHECK_THROWS_AS(invert(unit, 0.0), DomainError);
  const InversionResult r = invert_checked(unit, 2.0);
  CHECK(r.disagreement < 1e-12);
}

TEST_CASE("disagreeing orders raise a numeric error") {
  // A jump at t = 1 is not resolved by either method; the two orders differ.
  const LaplaceSymbol step([](cplx s) { return std::exp(-s) / s; }, "delayed step");
  CHECK_THROWS_AS(invert(step, 1.0), NumericError);
}

TEST_CASE("Montroll-Weiss symbol") {
  const auto law = InterEventLaw::mittag_leffler(0.6);
  CHECK(mw_symbol(0.0, law, 2.0) == doctest::Approx(survival_symbol(law)(2.0)));
  CHECK(mw_symbol(1.0, law, 2.0) == doctest::Approx(0.5));  // 1/s
  CHECK_THROWS_AS(mw_symbol(1.2, law, 1.0), DomainError);
  CHECK_THROWS_AS(mw_symbol(0.5, law, 0.0), DomainError);

  for (const auto& l : {InterEventLaw::exponential(1.0), InterEventLaw::mittag_leffler(0.7)})
    for (double t : {0.5, 2.0}) {
      const CountingPmfTable pmf = counting_pmf_auto(l, t, 1e-10);
      for (double v : {0.0, 0.3, 0.7, 1.0}) {
        double series = 0.0, power = 1.0;
        for (int n = 0; n <= pmf.truncation; ++n, power *= v) series += power * pmf[n];
        CHECK(std::abs(invert(mw_symbol(v, l), t) - series) < 1e-4);
      }
    }
}

TEST_CASE("pmf and epoch symbols") {
  CHECK_THROWS_AS(counting_pmf_symbol(InterEventLaw::exponential(), -1), DomainError);
  const auto law = InterEventLaw::exponential(1.0);
  // P(T_2 <= t) for rate 1 is 1 - e^{-t}(1 + t)
  CHECK(std::abs(invert(epoch_cdf_symbol(law, 2), 1.5) - (1.0 - std::exp(-1.5) * 2.5)) < 1e-10);
}
