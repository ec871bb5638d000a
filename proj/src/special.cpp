#include "ctstat/special.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "ctstat/error.hpp"

namespace ctstat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Error budget used to choose between evaluation paths, and the bound
// past which ml_one_param reports an AccuracyError.
constexpr double kRegimeTarget = 1e-12;
constexpr double kGuaranteedError = 1e-10;

// Beyond this |z|^(1/alpha) the series is not even attempted.
constexpr double kSeriesMaxScale = 12.0;
constexpr int kSeriesMaxTerms = 200000;
constexpr int kAsymptoticMaxTerms = 20000;

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_sum(double x) {
  double a = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (x + static_cast<double>(i));
  return a;
}

// sin(pi x) with exact zeros at the integers.
double sin_pi(double x) {
  const double r = x - 2.0 * std::round(0.5 * x);  // r in [-1, 1]
  if (r == 0.0 || r == 1.0 || r == -1.0) return 0.0;
  if (r > 0.5) return std::sin(kPi * (1.0 - r));
  if (r < -0.5) return -std::sin(kPi * (1.0 + r));
  return std::sin(kPi * r);
}

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void require_finite(double z, const char* what) {
  if (!std::isfinite(z)) throw DomainError(std::string(what) + ": argument must be finite");
}

}  // namespace

MlOrder::MlOrder(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    std::ostringstream os;
    os << "Mittag-Leffler order must lie in (0, 1], got " << alpha;
    throw DomainError(os.str());
  }
}

std::string_view to_string(MlRegime regime) noexcept {
  switch (regime) {
    case MlRegime::Exponential: return "exponential";
    case MlRegime::Series: return "series";
    case MlRegime::Integral: return "integral";
    case MlRegime::Asymptotic: return "asymptotic";
  }
  return "unknown";
}

double gamma_function(double x) {
  if (x < 0.5) {
    const double s = sin_pi(x);
    if (s == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return kPi / (s * gamma_function(1.0 - x));
  }
  x -= 1.0;
  const double t = x + kLanczosG + 0.5;
  const double a = lanczos_sum(x);
  if (x < 140.0) return std::sqrt(2.0 * kPi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
  // Split the power to postpone overflow.
  const double half = std::pow(t, 0.5 * (x + 0.5));
  return std::sqrt(2.0 * kPi) * half * (half * std::exp(-t)) * a;
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
  if (x < 0.5) return std::log(kPi / sin_pi(x)) - log_gamma(1.0 - x);
  x -= 1.0;
  const double t = x + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (x + 0.5) * std::log(t) - t + std::log(lanczos_sum(x));
}

double reciprocal_gamma(double x) {
  if (x < 0.5) {
    const double s = sin_pi(x);
    if (s == 0.0) return 0.0;
    return s * gamma_function(1.0 - x) / kPi;
  }
  if (x > 171.0) return std::exp(-log_gamma(x));
  return 1.0 / gamma_function(x);
}

MlEvaluation ml_series(MlOrder order, double z) {
  require_finite(z, "ml_series");
  const double alpha = order.value();
  MlEvaluation out;
  out.regime = MlRegime::Series;
  if (z == 0.0) {
    out.value = 1.0;
    out.terms_used = 1;
    return out;
  }

  const double log_x = std::log(std::abs(z));
  const bool alternating = z < 0.0;
  CompensatedSum sum;
  double magnitude_sum = 0.0;
  double previous = std::numeric_limits<double>::infinity();
  int n = 0;
  for (; n < kSeriesMaxTerms; ++n) {
    const double arg = alpha * n + 1.0;
    const double magnitude =
        arg < 170.0 ? std::exp(n * log_x) / gamma_function(arg) : std::exp(n * log_x - log_gamma(arg));
    const double term = (alternating && (n % 2 == 1)) ? -magnitude : magnitude;
    sum.add(term);
    magnitude_sum += magnitude;
    const bool past_peak = magnitude <= previous;
    previous = magnitude;
    if (n > 2 && past_peak && magnitude <= kEps * 1e-3 * std::max(std::abs(sum.value()), 1e-300)) break;
    if (n > 2 && past_peak && magnitude < 1e-300) break;
  }
  out.value = sum.value();
  out.terms_used = n + 1;
  // Every term carries a relative error of roughly (n + 8) ulp from the
  // power and the gamma evaluation.
  out.est_error = magnitude_sum * (out.terms_used + 8) * kEps;
  if (n == kSeriesMaxTerms) {
    out.est_error = std::max(out.est_error, previous);
    throw AccuracyError("ml_series: term budget exhausted", out.value, out.est_error);
  }
  return out;
}

MlEvaluation ml_asymptotic(MlOrder order, double z) {
  require_finite(z, "ml_asymptotic");
  if (!(z < 0.0)) throw DomainError("ml_asymptotic: requires z < 0");
  const double alpha = order.value();
  const double log_x = std::log(-z);

  // term_k = (-1)^(k+1) x^(-k) / Gamma(1 - a k)
  //        = (-1)^(k+1) x^(-k) Gamma(a k) sin(pi a k) / pi.
  // The envelope x^(-k) Gamma(a k) / pi decides where to truncate.
  CompensatedSum sum;
  double previous_envelope = std::numeric_limits<double>::infinity();
  int k = 1;
  double next_envelope = previous_envelope;
  for (; k <= kAsymptoticMaxTerms; ++k) {
    const double envelope = std::exp(log_gamma(alpha * k) - k * log_x) / kPi;
    if (envelope > previous_envelope) {
      next_envelope = previous_envelope;
      break;
    }
    next_envelope = envelope;
    previous_envelope = envelope;
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    sum.add(sign * envelope * sin_pi(alpha * k));
    if (envelope < 1e-300) break;
  }
  MlEvaluation out;
  out.regime = MlRegime::Asymptotic;
  out.value = sum.value();
  out.terms_used = k - 1;
  // The smallest envelope term bounds both the truncation remainder and the
  // exponentially small contributions the expansion omits.
  out.est_error = next_envelope + 4.0 * kEps * std::abs(out.value);
  return out;
}

MlEvaluation ml_integral(MlOrder order, double z) {
  require_finite(z, "ml_integral");
  if (z > 0.0) throw DomainError("ml_integral: requires z <= 0");
  const double alpha = order.value();
  MlEvaluation out;
  out.regime = MlRegime::Integral;
  if (z == 0.0) {
    out.value = 1.0;
    return out;
  }
  if (order.is_exponential()) {
    out.value = std::exp(z);
    out.regime = MlRegime::Exponential;
    return out;
  }

  const double t = std::pow(-z, 1.0 / alpha);
  const double s = std::sin(alpha * kPi);
  const double c = std::cos(alpha * kPi);
  int evaluations = 0;
  auto integrand = [&](double v) {
    ++evaluations;
    const double d = (v + c) * (v + c) + s * s;
    return std::exp(-t * std::pow(v, 1.0 / alpha)) / d;
  };

  // Past v_cut the exponential factor is below exp(-45); the remaining mass
  // is bounded by that factor times the tail of 1/d.
  const double v_cut = std::pow(45.0 / t, alpha);
  const double v_peak = std::max(0.0, -c);
  // tanh-sinh absorbs the v^(1/alpha) endpoint behaviour at v = 0.
  thread_local boost::math::quadrature::tanh_sinh<double> quadrature;
  constexpr double kTol = 1e-13;

  double total = 0.0;
  double error = 0.0;
  auto piece = [&](double a, double b) {
    if (!(b > a)) return;
    double e = 0.0;
    // Integrate over [0, b - a]: abscissas clustered near a nonzero left
    // endpoint would otherwise round onto it.
    auto shifted = [&](double u) { return integrand(a + u); };
    total += quadrature.integrate(shifted, 0.0, b - a, kTol, &e);
    error += e;
  };
  if (v_peak > 0.0 && v_peak < v_cut) {
    piece(0.0, v_peak);
    piece(v_peak, v_cut);
  } else {
    piece(0.0, v_cut);
  }
  const double tail_bound = std::exp(-45.0) * (kPi / s);

  const double scale = s / (alpha * kPi);
  out.value = scale * total;
  out.est_error = scale * (error + tail_bound) + 4.0 * kEps * std::abs(out.value);
  out.terms_used = evaluations;
  return out;
}

MlEvaluation ml_one_param(MlOrder order, double z) {
  require_finite(z, "ml_one_param");
  if (z == 0.0) return MlEvaluation{1.0, 1, order.is_exponential() ? MlRegime::Exponential : MlRegime::Series, 0.0};
  if (order.is_exponential()) return MlEvaluation{std::exp(z), 1, MlRegime::Exponential, 0.0};

  const double alpha = order.value();
  if (z > 0.0) {
    MlEvaluation out = ml_series(order, z);
    if (!std::isfinite(out.value)) throw NumericError("ml_one_param: overflow for positive argument");
    return out;
  }

  const double scale = std::pow(-z, 1.0 / alpha);
  if (scale <= kSeriesMaxScale) {
    MlEvaluation series = ml_series(order, z);
    if (series.est_error <= kRegimeTarget) return series;
  }
  MlEvaluation asymptotic = ml_asymptotic(order, z);
  if (asymptotic.est_error <= kRegimeTarget) return asymptotic;

  MlEvaluation integral = ml_integral(order, z);
  const MlEvaluation& best = integral.est_error <= asymptotic.est_error ? integral : asymptotic;
  if (best.est_error > kGuaranteedError) {
    std::ostringstream os;
    os << "ml_one_param: accuracy unreachable for alpha=" << alpha << ", z=" << z
       << " (estimated error " << best.est_error << ")";
    throw AccuracyError(os.str(), best.value, best.est_error);
  }
  return best;
}

double ml_survival(MlOrder order, double t) {
  if (!(t >= 0.0)) throw DomainError("ml_survival: t must be non-negative");
  if (t == 0.0) return 1.0;
  if (std::isinf(t)) return 0.0;
  if (order.is_exponential()) return std::exp(-t);
  const double z = -std::pow(t, order.value());
  if (z == 0.0) return 1.0;
  if (std::isinf(z)) return 0.0;
  return ml_one_param(order, z).value;
}

MlRegimeBounds ml_regime_bounds(MlOrder order) {
  MlRegimeBounds bounds;
  if (order.is_exponential()) {
    bounds.series_limit = std::numeric_limits<double>::infinity();
    bounds.asymptotic_limit = std::numeric_limits<double>::infinity();
    return bounds;
  }
  const double alpha = order.value();
  auto series_ok = [&](double x) {
    if (std::pow(x, 1.0 / alpha) > kSeriesMaxScale) return false;
    try {
      return ml_series(order, -x).est_error <= kRegimeTarget;
    } catch (const AccuracyError&) {
      return false;
    }
  };
  auto asymptotic_ok = [&](double x) { return ml_asymptotic(order, -x).est_error <= kRegimeTarget; };

  // Both criteria are monotone in x; bisect in log x.
  auto bisect = [](auto&& ok_below, double lo, double hi) {
    for (int i = 0; i < 60; ++i) {
      const double mid = std::sqrt(lo * hi);
      if (ok_below(mid))
        lo = mid;
      else
        hi = mid;
    }
    return lo;
  };
  bounds.series_limit = bisect(series_ok, 1e-8, std::pow(kSeriesMaxScale, alpha));
  bounds.asymptotic_limit = bisect([&](double x) { return !asymptotic_ok(x); }, 1e-8, 1e8);
  // bisect returns the last failing point; step to the first passing one.
  bounds.asymptotic_limit = std::nextafter(bounds.asymptotic_limit, 1e9);
  return bounds;
}

}  // namespace ctstat
