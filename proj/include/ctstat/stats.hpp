#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ctstat/laplace.hpp"
#include "ctstat/random.hpp"
#include "ctstat/renewal.hpp"
#include "ctstat/special.hpp"
#include "ctstat/waiting_time.hpp"

namespace ctstat {

/// Law of the positive i.i.d. observations X_i.
class JumpLaw {
 public:
  struct Exponential {
    double rate;
  };
  struct Uniform {
    double upper;  // support [0, upper]
  };
  struct Pareto {
    double scale;  // support [scale, inf)
    double exponent;
  };
  struct Degenerate {
    double value;
  };
  using Variant = std::variant<Exponential, Uniform, Pareto, Degenerate>;

  static JumpLaw exponential(double rate = 1.0);
  static JumpLaw uniform(double upper);
  static JumpLaw pareto(double scale, double exponent);
  static JumpLaw degenerate(double value);

  const Variant& variant() const noexcept { return law_; }

  double cdf(double u) const;
  double survival(double u) const;
  double quantile(double p) const;

  bool has_density() const noexcept { return !std::holds_alternative<Degenerate>(law_); }
  /// Density for grid convolution: the right limit at the lower end of the
  /// support, the mean of the one-sided limits at interior jumps.
  double density(double u) const;

  /// Laplace-Stieltjes transform int e^(-w u) dF(u).  Pareto has no closed
  /// form and raises CapabilityError.
  double lst(double w) const;

  template <UniformSource R>
  double sample(R& rng) const {
    return quantile(rng.uniform());
  }

  /// "exp:RATE", "uniform:B", "pareto:SCALE,EXPONENT", "degenerate:C".
  std::string describe() const;
  /// Inverse of describe(); DomainError on malformed text.
  static JumpLaw parse(std::string_view text);

 private:
  explicit JumpLaw(Variant law) : law_(law) {}
  Variant law_;
};

enum class StatisticKind { Sum, Max };

std::string_view to_string(StatisticKind kind) noexcept;

/// Row-stochastic matrix over labelled states.
class TransitionMatrix {
 public:
  TransitionMatrix(std::vector<std::string> states, std::vector<std::vector<double>> rows);

  /// q_{A,B} = 1, q_{B,B} = 1.
  static TransitionMatrix absorbing_two_state();

  std::size_t size() const noexcept { return states_.size(); }
  const std::vector<std::string>& states() const noexcept { return states_; }
  std::size_t index_of(std::string_view label) const;
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * size() + j]; }

  /// Row vector times matrix.
  std::vector<double> propagate(std::span<const double> row) const;

 private:
  std::vector<std::string> states_;
  std::vector<double> entries_;
};

/// L(+)(F_X)(w): the Laplace-Stieltjes transform for Sum, the CDF for Max.
/// Either way the n-fold statistic transforms to the n-th power.
double statistic_transform(StatisticKind kind, const JumpLaw& law, double w);

/// Grid settings for n-fold convolutions of laws without a closed form.
struct ConvolutionOptions {
  int cells = 2048;  // h = u_max / cells; checked against cells * 2
  double max_error = 1e-3;
};

/// F^{*n}(u) for n = 0..n_max at every point of `us` (u >= 0).  Row n holds
/// the n-fold convolution; F^{*0} is the unit step at 0.  Exponential and
/// Degenerate laws are exact; other laws use trapezoidal convolution on a
/// uniform grid with a half-step comparison, and raise AccuracyError when
/// the estimated error exceeds options.max_error.
std::vector<std::vector<double>> convolution_power_cdfs(const JumpLaw& law, int n_max, std::span<const double> us,
                                                        const ConvolutionOptions& options = {});

/// Erlang(n, rate) CDF at u; n = 0 is the unit step.
double erlang_cdf(int n, double rate, double u);

/// Compound-Poisson CDF P(S(t) <= u) = e^{-rate t} sum_n F^{*n}(u) (rate t)^n / n!,
/// truncated once the remaining Poisson mass is below tol.
double sum_cdf_series(const JumpLaw& law, double rate, double t, double u, double tol,
                      const ConvolutionOptions& options = {});
std::vector<double> sum_cdf_series(const JumpLaw& law, double rate, double t, std::span<const double> us, double tol,
                                   const ConvolutionOptions& options = {});

/// Fractional Gumbel law E_alpha(-(1 - F_X(w)) t^alpha): the CDF at w of the
/// maximum of X_1..X_{N(t)} under Mittag-Leffler(alpha) waits (max of no
/// observations is 0).
double max_cdf(MlOrder order, const JumpLaw& law, double t, double w);

/// sum_n F_{S_n}(u) P(N(t) = n), truncated when the pmf tail is below tol.
double mixture_cdf(StatisticKind kind, const JumpLaw& law, const InterEventLaw& ie_law, double t, double u, double tol,
                   const InversionConfig& config = {}, const ConvolutionOptions& options = {});
std::vector<double> mixture_cdf(StatisticKind kind, const JumpLaw& law, const InterEventLaw& ie_law, double t,
                                std::span<const double> us, double tol, const InversionConfig& config = {},
                                const ConvolutionOptions& options = {});

/// P(Y(t) = j | Y(0) = i) = (1 - F_J(t)) delta_ij + sum_{n>=1} q^(n)_ij P(N(t) = n).
double semi_markov_marginal(const TransitionMatrix& q, std::size_t i, std::size_t j, const InterEventLaw& ie_law,
                            double t, double tol, const InversionConfig& config = {});
/// All j at once.
std::vector<double> semi_markov_row(const TransitionMatrix& q, std::size_t i, const InterEventLaw& ie_law, double t,
                                    double tol, const InversionConfig& config = {});

}  // namespace ctstat
