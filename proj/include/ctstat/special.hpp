#pragma once

#include <string_view>

namespace ctstat {

/// Order of the one-parameter Mittag-Leffler function, 0 < alpha <= 1.
class MlOrder {
 public:
  explicit MlOrder(double alpha);

  double value() const noexcept { return alpha_; }
  bool is_exponential() const noexcept { return alpha_ == 1.0; }

  friend bool operator==(MlOrder, MlOrder) = default;

 private:
  double alpha_;
};

enum class MlRegime {
  Exponential,  // alpha == 1, evaluated as exp(z)
  Series,
  Integral,
  Asymptotic,
};

std::string_view to_string(MlRegime regime) noexcept;

struct MlEvaluation {
  double value = 0.0;
  int terms_used = 0;  // series/asymptotic terms, or integrand evaluations
  MlRegime regime = MlRegime::Series;
  double est_error = 0.0;
};

/// Switch points on the negative axis, expressed as |z|.
///
/// Below `series_limit` the Taylor series is summed directly; its
/// cancellation error grows like exp(|z|^(1/alpha)).  Above
/// `asymptotic_limit` the algebraic expansion
///   E_a(-x) ~ sum_{k>=1} (-1)^(k+1) x^(-k) / Gamma(1 - a k)
/// truncated at its smallest term is used; its error decays like
/// exp(-|z|^(1/alpha)).  The two estimates never both fall below the target
/// tolerance in double precision, so the band in between is covered by the
/// Laplace-type integral
///   E_a(-t^a) = sin(a pi)/(a pi) int_0^inf exp(-t v^(1/a)) / (v^2 + 2 v cos(a pi) + 1) dv.
///
/// Values at the 1e-12 selection target:
///   alpha  series_limit  asymptotic_limit
///   0.1    0.994         1.38
///   0.3    1.33          2.65
///   0.5    1.85          5.08
///   0.7    2.62          9.73
///   0.9    3.78          18.6
///   0.99   4.44          25.0
/// The exact values are produced by this function; see the unit tests.
struct MlRegimeBounds {
  double series_limit = 0.0;
  double asymptotic_limit = 0.0;
};

MlRegimeBounds ml_regime_bounds(MlOrder order);

/// E_alpha(z).  Absolute error <= 1e-10 for z in [-50, 0].  Throws
/// AccuracyError if no evaluation path reaches that bound.
MlEvaluation ml_one_param(MlOrder order, double z);

/// Survival function of the Mittag-Leffler waiting-time law, E_alpha(-t^alpha).
double ml_survival(MlOrder order, double t);

// Individual evaluation paths.  ml_one_param picks between them; they are
// exposed so the switch points can be checked against each other.
MlEvaluation ml_series(MlOrder order, double z);
MlEvaluation ml_asymptotic(MlOrder order, double z);
MlEvaluation ml_integral(MlOrder order, double z);

// Gamma function, Lanczos approximation (g = 7, 9 terms) with reflection.
double gamma_function(double x);
/// log|Gamma(x)| for x > 0.
double log_gamma(double x);
/// 1/Gamma(x); exactly zero at the poles x = 0, -1, -2, ...
double reciprocal_gamma(double x);

}  // namespace ctstat
