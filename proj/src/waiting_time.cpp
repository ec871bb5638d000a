#include "ctstat/waiting_time.hpp"

#include <charconv>
#include <numbers>
#include <sstream>

#include "ctstat/error.hpp"

namespace ctstat {

InterEventLaw InterEventLaw::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("exponential waiting-time rate must be positive");
  return InterEventLaw(Exponential{rate});
}

InterEventLaw InterEventLaw::mittag_leffler(MlOrder order) { return InterEventLaw(MittagLeffler{order}); }

double InterEventLaw::survival(double t) const {
  if (std::isnan(t)) throw DomainError("survival: t is NaN");
  if (t <= 0.0) return 1.0;
  if (const auto* e = std::get_if<Exponential>(&law_)) return std::exp(-e->rate * t);
  return ml_survival(std::get<MittagLeffler>(law_).order, t);
}

double InterEventLaw::from_uniforms(double u, double v) const {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("from_uniforms: u must lie in (0, 1)");
  if (const auto* e = std::get_if<Exponential>(&law_)) return -std::log(u) / e->rate;
  const MlOrder order = std::get<MittagLeffler>(law_).order;
  if (order.is_exponential()) return -std::log(u);
  if (!(v > 0.0 && v < 1.0)) throw DomainError("from_uniforms: v must lie in (0, 1)");
  const double a = order.value();
  const double api = a * std::numbers::pi;
  const double base = std::sin(api) / std::tan(api * v) - std::cos(api);
  return -std::log(u) * std::pow(base, 1.0 / a);
}

std::string InterEventLaw::describe() const {
  std::ostringstream os;
  os.precision(12);
  if (const auto* e = std::get_if<Exponential>(&law_))
    os << "exp:" << e->rate;
  else
    os << "ml:" << std::get<MittagLeffler>(law_).order.value();
  return os.str();
}

InterEventLaw InterEventLaw::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  double value = 0.0;
  bool ok = colon != std::string_view::npos;
  if (ok) {
    const std::string_view arg = text.substr(colon + 1);
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), value);
    ok = ec == std::errc() && ptr == arg.data() + arg.size();
  }
  if (!ok) throw DomainError("cannot parse waiting-time law '" + std::string(text) + "' (exp:RATE or ml:ALPHA)");
  if (name == "exp") return exponential(value);
  if (name == "ml") return mittag_leffler(value);
  throw DomainError("unknown waiting-time law '" + std::string(name) + "'");
}

}  // namespace ctstat
