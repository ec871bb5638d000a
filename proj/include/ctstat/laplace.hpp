#pragma once

#include <complex>
#include <functional>
#include <string>

#include "ctstat/waiting_time.hpp"

namespace ctstat {

/// A Laplace-domain function.  Evaluated on the positive real axis by
/// callers; the Talbot inversion also evaluates it on a contour in the
/// complex plane, so every symbol is built from analytic expressions with
/// the branch cut of s^a on the negative real axis.
class LaplaceSymbol {
 public:
  using Evaluator = std::function<std::complex<double>(std::complex<double>)>;

  LaplaceSymbol(Evaluator evaluator, std::string description)
      : evaluator_(std::move(evaluator)), description_(std::move(description)) {}

  double operator()(double s) const { return evaluator_(std::complex<double>(s, 0.0)).real(); }
  std::complex<double> operator()(std::complex<double> s) const { return evaluator_(s); }

  const std::string& description() const noexcept { return description_; }

 private:
  Evaluator evaluator_;
  std::string description_;
};

enum class InversionMethod { GaverStehfest, Talbot };

/// Numeric inversion settings.  Each inversion is repeated at a lower
/// order (GS: order - 2, Talbot: order - 4) and the two results must agree
/// within 10 * tolerance * max(1, |f|).
struct InversionConfig {
  InversionMethod method = InversionMethod::Talbot;
  int order = 24;
  int working_precision_hint = 16;
  double tolerance = 1e-9;

  static InversionConfig gaver_stehfest(int order = 14) {
    return InversionConfig{InversionMethod::GaverStehfest, order, 16, 1e-5};
  }
  static InversionConfig talbot(int order = 24) { return InversionConfig{InversionMethod::Talbot, order, 16, 1e-9}; }

  /// Throws DomainError for an odd or out-of-range Gaver-Stehfest order
  /// (even, 8..20) or a Talbot order outside 8..64.
  void validate() const;
};

/// L(f_J)(s): lambda/(lambda + s), or 1/(1 + s^a).
LaplaceSymbol density_symbol(const InterEventLaw& law);
/// L(1 - F_J)(s) = (1 - L(f_J)(s))/s: 1/(lambda + s), or s^(a-1)/(1 + s^a).
LaplaceSymbol survival_symbol(const InterEventLaw& law);
/// Memory kernel (1 - L f_J)/(s L f_J): 1/lambda (a delta kernel), or
/// s^(a-1), the transform of t^(-a)/Gamma(1-a).
LaplaceSymbol kernel_symbol(const InterEventLaw& law);

/// Double transform Q(w, s) = L(1 - F_J)(s) / (1 - L(f_J)(s) v), where v is
/// the already-evaluated statistic transform at w.  v must lie in [0, 1].
double mw_symbol(double statistic_transform_value, const InterEventLaw& law, double s);
/// The same, as a function of s.
LaplaceSymbol mw_symbol(double statistic_transform_value, const InterEventLaw& law);

/// Symbol of P(N(t) = n): L(1 - F_J)(s) [L(f_J)(s)]^n.
LaplaceSymbol counting_pmf_symbol(const InterEventLaw& law, int n);
/// Symbol of P(T_n <= t) = [L(f_J)(s)]^n / s.
LaplaceSymbol epoch_cdf_symbol(const InterEventLaw& law, int n);

struct InversionResult {
  double value = 0.0;
  double cross_check = 0.0;  // same inversion at the lower order
  double disagreement = 0.0;
};

/// Original function at t > 0.  Throws NumericError when the two orders
/// disagree or the result is not finite.
InversionResult invert_checked(const LaplaceSymbol& symbol, double t, const InversionConfig& config = {});
double invert(const LaplaceSymbol& symbol, double t, const InversionConfig& config = {});

// Single-order inversions without the cross-check.
double gaver_stehfest(const LaplaceSymbol& symbol, double t, int order);
double talbot(const LaplaceSymbol& symbol, double t, int order);

}  // namespace ctstat
