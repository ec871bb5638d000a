#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <variant>

#include "ctstat/random.hpp"
#include "ctstat/special.hpp"

namespace ctstat {

/// Law of the i.i.d. inter-event durations J_i of a renewal process.
///
/// Exponential(rate) gives a Poisson counting process; MittagLeffler(alpha)
/// has survival E_alpha(-t^alpha) and gives the fractional Poisson process.
/// MittagLeffler(1) coincides in law with Exponential(1).
class InterEventLaw {
 public:
  struct Exponential {
    double rate;
  };
  struct MittagLeffler {
    MlOrder order;
  };

  static InterEventLaw exponential(double rate = 1.0);
  static InterEventLaw mittag_leffler(MlOrder order);
  static InterEventLaw mittag_leffler(double alpha) { return mittag_leffler(MlOrder(alpha)); }

  bool is_exponential() const noexcept { return std::holds_alternative<Exponential>(law_); }
  const std::variant<Exponential, MittagLeffler>& variant() const noexcept { return law_; }

  double survival(double t) const;
  double cdf(double t) const { return 1.0 - survival(t); }

  /// Inverse-transform map from two independent uniforms to a waiting time.
  /// Exponential uses only `u`: -ln(u)/rate.  MittagLeffler uses
  ///   -ln(u) [sin(a pi)/tan(a pi v) - cos(a pi)]^(1/a).
  double from_uniforms(double u, double v) const;

  /// "exp:RATE" or "ml:ALPHA".
  std::string describe() const;
  /// Inverse of describe(); DomainError on malformed text.
  static InterEventLaw parse(std::string_view text);

 private:
  explicit InterEventLaw(std::variant<Exponential, MittagLeffler> law) : law_(law) {}
  std::variant<Exponential, MittagLeffler> law_;
};

template <UniformSource R>
double sample_waiting_time(const InterEventLaw& law, R& rng) {
  const double u = rng.uniform();
  if (law.is_exponential()) return law.from_uniforms(u, 0.5);
  const double v = rng.uniform();
  return law.from_uniforms(u, v);
}

}  // namespace ctstat
