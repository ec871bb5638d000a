#include "ctstat/laplace.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "ctstat/error.hpp"

namespace ctstat {

namespace {

using cplx = std::complex<double>;

// s^a on the principal branch; exact for a == 1.
cplx power(cplx s, double a) { return a == 1.0 ? s : std::pow(s, a); }

std::vector<double> stehfest_weights(int order) {
  const int half = order / 2;
  std::vector<long double> factorial(2 * order + 1, 1.0L);
  for (int i = 1; i <= 2 * order; ++i) factorial[i] = factorial[i - 1] * i;

  std::vector<double> weights(order);
  for (int k = 1; k <= order; ++k) {
    long double sum = 0.0L;
    for (int j = (k + 1) / 2; j <= std::min(k, half); ++j) {
      sum += std::pow(static_cast<long double>(j), half) * factorial[2 * j] /
             (factorial[half - j] * factorial[j] * factorial[j - 1] * factorial[k - j] * factorial[2 * j - k]);
    }
    const long double sign = ((k + half) % 2 == 0) ? 1.0L : -1.0L;
    const long double w = sign * sum;
    if (!std::isfinite(static_cast<double>(w))) throw NumericError("Gaver-Stehfest: weight overflow");
    weights[k - 1] = static_cast<double>(w);
  }
  return weights;
}

std::string law_label(const InterEventLaw& law) { return law.describe(); }

}  // namespace

void InversionConfig::validate() const {
  if (method == InversionMethod::GaverStehfest) {
    if (order % 2 != 0 || order < 8 || order > 20)
      throw DomainError("Gaver-Stehfest order must be even and within [8, 20]");
  } else if (order < 8 || order > 64) {
    throw DomainError("Talbot order must lie within [8, 64]");
  }
  if (!(tolerance > 0.0)) throw DomainError("inversion tolerance must be positive");
}

LaplaceSymbol density_symbol(const InterEventLaw& law) {
  if (const auto* e = std::get_if<InterEventLaw::Exponential>(&law.variant())) {
    const double rate = e->rate;
    return {[rate](cplx s) { return rate / (rate + s); }, "density[" + law_label(law) + "]"};
  }
  const double a = std::get<InterEventLaw::MittagLeffler>(law.variant()).order.value();
  return {[a](cplx s) { return 1.0 / (1.0 + power(s, a)); }, "density[" + law_label(law) + "]"};
}

LaplaceSymbol survival_symbol(const InterEventLaw& law) {
  if (const auto* e = std::get_if<InterEventLaw::Exponential>(&law.variant())) {
    const double rate = e->rate;
    return {[rate](cplx s) { return 1.0 / (rate + s); }, "survival[" + law_label(law) + "]"};
  }
  const double a = std::get<InterEventLaw::MittagLeffler>(law.variant()).order.value();
  return {[a](cplx s) {
            const cplx sa = power(s, a);
            return sa / (s * (1.0 + sa));
          },
          "survival[" + law_label(law) + "]"};
}

LaplaceSymbol kernel_symbol(const InterEventLaw& law) {
  if (const auto* e = std::get_if<InterEventLaw::Exponential>(&law.variant())) {
    const double inv_rate = 1.0 / e->rate;
    return {[inv_rate](cplx) { return cplx(inv_rate, 0.0); }, "kernel[" + law_label(law) + "]"};
  }
  const double a = std::get<InterEventLaw::MittagLeffler>(law.variant()).order.value();
  return {[a](cplx s) { return a == 1.0 ? cplx(1.0, 0.0) : std::pow(s, a - 1.0); },
          "kernel[" + law_label(law) + "]"};
}

double mw_symbol(double value, const InterEventLaw& law, double s) {
  if (!(s > 0.0)) throw DomainError("mw_symbol: s must be positive");
  if (!(value >= 0.0 && value <= 1.0)) throw DomainError("mw_symbol: transform value must lie in [0, 1]");
  const double density = density_symbol(law)(s);
  const double denominator = 1.0 - density * value;
  if (!(denominator > 0.0)) throw DomainError("mw_symbol: 1 - L(f_J)(s) v vanishes");
  return survival_symbol(law)(s) / denominator;
}

LaplaceSymbol mw_symbol(double value, const InterEventLaw& law) {
  if (!(value >= 0.0 && value <= 1.0)) throw DomainError("mw_symbol: transform value must lie in [0, 1]");
  LaplaceSymbol density = density_symbol(law);
  LaplaceSymbol survival = survival_symbol(law);
  std::ostringstream label;
  label.precision(12);
  label << "mw[" << law_label(law) << ", v=" << value << "]";
  return {[density, survival, value](cplx s) { return survival(s) / (1.0 - density(s) * value); }, label.str()};
}

LaplaceSymbol counting_pmf_symbol(const InterEventLaw& law, int n) {
  if (n < 0) throw DomainError("counting_pmf_symbol: n must be non-negative");
  LaplaceSymbol density = density_symbol(law);
  LaplaceSymbol survival = survival_symbol(law);
  return {[density, survival, n](cplx s) { return survival(s) * std::pow(density(s), n); },
          "pmf[" + law_label(law) + ", n=" + std::to_string(n) + "]"};
}

LaplaceSymbol epoch_cdf_symbol(const InterEventLaw& law, int n) {
  if (n < 0) throw DomainError("epoch_cdf_symbol: n must be non-negative");
  LaplaceSymbol density = density_symbol(law);
  return {[density, n](cplx s) { return std::pow(density(s), n) / s; },
          "epoch_cdf[" + law_label(law) + ", n=" + std::to_string(n) + "]"};
}

double gaver_stehfest(const LaplaceSymbol& symbol, double t, int order) {
  if (!(t > 0.0)) throw DomainError("gaver_stehfest: t must be positive");
  InversionConfig{InversionMethod::GaverStehfest, order}.validate();
  const std::vector<double> weights = stehfest_weights(order);
  const double a = std::numbers::ln2 / t;
  double sum = 0.0;
  for (int k = 1; k <= order; ++k) sum += weights[k - 1] * symbol(k * a);
  return a * sum;
}

double talbot(const LaplaceSymbol& symbol, double t, int order) {
  if (!(t > 0.0)) throw DomainError("talbot: t must be positive");
  // Fixed Talbot contour s(theta) = r theta (cot theta + i), r = 2M/(5t).
  const int m = order;
  const double r = 2.0 * m / (5.0 * t);
  double sum = 0.5 * std::exp(r * t) * symbol(cplx(r, 0.0)).real();
  for (int k = 1; k < m; ++k) {
    const double theta = k * std::numbers::pi / m;
    const double cot = std::cos(theta) / std::sin(theta);
    const cplx s(r * theta * cot, r * theta);
    const double sigma = theta + (theta * cot - 1.0) * cot;
    sum += (std::exp(t * s) * symbol(s) * cplx(1.0, sigma)).real();
  }
  return r / m * sum;
}

InversionResult invert_checked(const LaplaceSymbol& symbol, double t, const InversionConfig& config) {
  config.validate();
  if (!(t > 0.0)) throw DomainError("invert: t must be positive");
  InversionResult out;
  if (config.method == InversionMethod::GaverStehfest) {
    out.value = gaver_stehfest(symbol, t, config.order);
    out.cross_check = gaver_stehfest(symbol, t, config.order - 2);
  } else {
    out.value = talbot(symbol, t, config.order);
    out.cross_check = talbot(symbol, t, config.order - 4);
  }
  out.disagreement = std::abs(out.value - out.cross_check);
  if (!std::isfinite(out.value) || !std::isfinite(out.cross_check)) {
    std::ostringstream os;
    os << "invert: non-finite result for " << symbol.description() << " at t=" << t;
    throw NumericError(os.str());
  }
  if (out.disagreement > 10.0 * config.tolerance * std::max(1.0, std::abs(out.value))) {
    std::ostringstream os;
    os << "invert: orders disagree for " << symbol.description() << " at t=" << t << " (" << out.value << " vs "
       << out.cross_check << ")";
    throw NumericError(os.str());
  }
  return out;
}

double invert(const LaplaceSymbol& symbol, double t, const InversionConfig& config) {
  return invert_checked(symbol, t, config).value;
}

}  // namespace ctstat
