#include "ctstat/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "ctstat/error.hpp"

namespace ctstat {

namespace {

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError(std::string("JumpLaw: ") + what + " must be positive");
}

double parse_number(std::string_view text, std::string_view whole) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw DomainError("cannot parse jump law '" + std::string(whole) + "'");
  return value;
}

void check_spatial(std::span<const double> us) {
  for (double u : us)
    if (!(u >= 0.0) || !std::isfinite(u)) throw DomainError("spatial argument must be finite and non-negative");
}

void check_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("t must be finite and non-negative");
}

// Discontinuity of the law's density away from the origin, if any; the grid
// is aligned so that it and its multiples fall on nodes.
double breakpoint(const JumpLaw& law) {
  if (const auto* u = std::get_if<JumpLaw::Uniform>(&law.variant())) return u->upper;
  if (const auto* p = std::get_if<JumpLaw::Pareto>(&law.variant())) return p->scale;
  return 0.0;
}

// n-fold convolution CDFs of a law with a density, on a grid of `cells`
// intervals of width h over [0, cells*h] by the trapezoidal rule.
std::vector<std::vector<double>> grid_powers(const JumpLaw& law, int n_max, std::span<const double> us, double h,
                                             int cells) {
  const int m = cells;
  const double b = breakpoint(law);
  std::vector<double> f(m + 1);
  for (int i = 0; i <= m; ++i) {
    const double x = i * h;
    f[i] = law.density(b > 0.0 && std::abs(x - b) < 1e-6 * h ? b : x);
  }

  auto cdf_from_density = [&](const std::vector<double>& g, std::vector<double>& out) {
    // cumulative trapezoid, then linear interpolation of g inside the last cell
    std::vector<double> cumulative(m + 1, 0.0);
    for (int i = 1; i <= m; ++i) cumulative[i] = cumulative[i - 1] + 0.5 * h * (g[i - 1] + g[i]);
    for (std::size_t k = 0; k < us.size(); ++k) {
      const double x = us[k] / h;
      const int i = std::min(static_cast<int>(x), m - 1);
      const double frac = x - i;
      const double g_u = g[i] + frac * (g[i + 1] - g[i]);
      out[k] = std::clamp(cumulative[i] + 0.5 * frac * h * (g[i] + g_u), 0.0, 1.0);
    }
  };

  std::vector<std::vector<double>> rows(n_max + 1, std::vector<double>(us.size(), 0.0));
  std::fill(rows[0].begin(), rows[0].end(), 1.0);
  if (n_max == 0) return rows;
  for (std::size_t k = 0; k < us.size(); ++k) rows[1][k] = law.cdf(us[k]);

  std::vector<double> g = f;
  std::vector<double> next(m + 1);
  for (int n = 2; n <= n_max; ++n) {
    next[0] = 0.0;
    for (int i = 1; i <= m; ++i) {
      double sum = 0.5 * (g[i] * f[0] + g[0] * f[i]);
      for (int j = 1; j < i; ++j) sum += g[i - j] * f[j];
      next[i] = h * sum;
    }
    g.swap(next);
    cdf_from_density(g, rows[n]);
  }
  return rows;
}

std::vector<std::vector<double>> closed_form_powers(const JumpLaw& law, int n_max, std::span<const double> us) {
  std::vector<std::vector<double>> rows(n_max + 1, std::vector<double>(us.size(), 1.0));
  for (int n = 1; n <= n_max; ++n) {
    for (std::size_t k = 0; k < us.size(); ++k) {
      if (const auto* e = std::get_if<JumpLaw::Exponential>(&law.variant()))
        rows[n][k] = erlang_cdf(n, e->rate, us[k]);
      else
        rows[n][k] = us[k] >= n * std::get<JumpLaw::Degenerate>(law.variant()).value * (1.0 - 1e-12) ? 1.0 : 0.0;
    }
  }
  return rows;
}

CountingPmfTable checked_pmf(const InterEventLaw& ie_law, double t, double tol, const InversionConfig& config) {
  CountingPmfTable table = counting_pmf_auto(ie_law, t, tol, config);
  if (table.tail_bound >= tol) {
    std::ostringstream os;
    os << "counting pmf tail " << table.tail_bound << " still above " << tol << " after " << table.truncation
       << " terms at t=" << t;
    throw NumericError(os.str());
  }
  return table;
}

}  // namespace

JumpLaw JumpLaw::exponential(double rate) {
  require_positive(rate, "rate");
  return JumpLaw(Exponential{rate});
}

JumpLaw JumpLaw::uniform(double upper) {
  require_positive(upper, "upper bound");
  return JumpLaw(Uniform{upper});
}

JumpLaw JumpLaw::pareto(double scale, double exponent) {
  require_positive(scale, "scale");
  require_positive(exponent, "exponent");
  return JumpLaw(Pareto{scale, exponent});
}

JumpLaw JumpLaw::degenerate(double value) {
  require_positive(value, "point mass location");
  return JumpLaw(Degenerate{value});
}

double JumpLaw::cdf(double u) const {
  if (u < 0.0) return 0.0;
  return 1.0 - survival(u);
}

double JumpLaw::survival(double u) const {
  if (u < 0.0) return 1.0;
  return std::visit(
      [u](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Exponential>) {
          return std::exp(-law.rate * u);
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return u >= law.upper ? 0.0 : 1.0 - u / law.upper;
        } else if constexpr (std::is_same_v<T, Pareto>) {
          return u <= law.scale ? 1.0 : std::pow(law.scale / u, law.exponent);
        } else {
          return u >= law.value ? 0.0 : 1.0;
        }
      },
      law_);
}

double JumpLaw::quantile(double p) const {
  if (!(p >= 0.0 && p < 1.0)) throw DomainError("JumpLaw::quantile: p must lie in [0, 1)");
  return std::visit(
      [p](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Exponential>) {
          return -std::log1p(-p) / law.rate;
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return p * law.upper;
        } else if constexpr (std::is_same_v<T, Pareto>) {
          return law.scale * std::pow(1.0 - p, -1.0 / law.exponent);
        } else {
          return law.value;
        }
      },
      law_);
}

double JumpLaw::density(double u) const {
  if (u < 0.0) return 0.0;
  return std::visit(
      [u](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Exponential>) {
          return law.rate * std::exp(-law.rate * u);
        } else if constexpr (std::is_same_v<T, Uniform>) {
          if (u > law.upper) return 0.0;
          return u == law.upper ? 0.5 / law.upper : 1.0 / law.upper;
        } else if constexpr (std::is_same_v<T, Pareto>) {
          if (u < law.scale) return 0.0;
          const double f = law.exponent / law.scale * std::pow(law.scale / u, law.exponent + 1.0);
          return u == law.scale ? 0.5 * f : f;
        } else {
          throw CapabilityError("JumpLaw: a point mass has no density");
        }
      },
      law_);
}

double JumpLaw::lst(double w) const {
  if (!(w >= 0.0)) throw DomainError("JumpLaw::lst: w must be non-negative");
  return std::visit(
      [w](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Exponential>) {
          return law.rate / (law.rate + w);
        } else if constexpr (std::is_same_v<T, Uniform>) {
          const double x = w * law.upper;
          return x < 1e-8 ? 1.0 - 0.5 * x : -std::expm1(-x) / x;
        } else if constexpr (std::is_same_v<T, Pareto>) {
          throw CapabilityError(
              "no closed-form Laplace-Stieltjes transform for Pareto jumps; use the grid convolution path");
        } else {
          return std::exp(-w * law.value);
        }
      },
      law_);
}

std::string JumpLaw::describe() const {
  std::ostringstream os;
  os.precision(12);
  std::visit(
      [&os](const auto& law) {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Exponential>)
          os << "exp:" << law.rate;
        else if constexpr (std::is_same_v<T, Uniform>)
          os << "uniform:" << law.upper;
        else if constexpr (std::is_same_v<T, Pareto>)
          os << "pareto:" << law.scale << ',' << law.exponent;
        else
          os << "degenerate:" << law.value;
      },
      law_);
  return os.str();
}

JumpLaw JumpLaw::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw DomainError("jump law '" + std::string(text) + "' lacks parameters");
  const std::string_view name = text.substr(0, colon);
  const std::string_view args = text.substr(colon + 1);
  if (name == "exp") return exponential(parse_number(args, text));
  if (name == "uniform") return uniform(parse_number(args, text));
  if (name == "degenerate") return degenerate(parse_number(args, text));
  if (name == "pareto") {
    const auto comma = args.find(',');
    if (comma == std::string_view::npos) throw DomainError("pareto law needs SCALE,EXPONENT");
    return pareto(parse_number(args.substr(0, comma), text), parse_number(args.substr(comma + 1), text));
  }
  throw DomainError("unknown jump law '" + std::string(name) + "'");
}

std::string_view to_string(StatisticKind kind) noexcept { return kind == StatisticKind::Sum ? "sum" : "max"; }

TransitionMatrix::TransitionMatrix(std::vector<std::string> states, std::vector<std::vector<double>> rows)
    : states_(std::move(states)) {
  const std::size_t n = states_.size();
  if (n == 0) throw DomainError("TransitionMatrix: no states");
  if (rows.size() != n) throw DomainError("TransitionMatrix: row count differs from state count");
  entries_.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw DomainError("TransitionMatrix: matrix is not square");
    double sum = 0.0;
    for (double q : rows[i]) {
      if (!(q >= 0.0 && q <= 1.0)) throw DomainError("TransitionMatrix: entries must lie in [0, 1]");
      sum += q;
      entries_.push_back(q);
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw DomainError("TransitionMatrix: row '" + states_[i] + "' does not sum to 1");
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (states_[i] == states_[j]) throw DomainError("TransitionMatrix: duplicate state '" + states_[i] + "'");
}

TransitionMatrix TransitionMatrix::absorbing_two_state() { return TransitionMatrix({"A", "B"}, {{0.0, 1.0}, {0.0, 1.0}}); }

std::size_t TransitionMatrix::index_of(std::string_view label) const {
  const auto it = std::find(states_.begin(), states_.end(), label);
  if (it == states_.end()) throw DomainError("unknown state '" + std::string(label) + "'");
  return static_cast<std::size_t>(it - states_.begin());
}

std::vector<double> TransitionMatrix::propagate(std::span<const double> row) const {
  const std::size_t n = size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (row[i] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) out[j] += row[i] * entries_[i * n + j];
  }
  return out;
}

double statistic_transform(StatisticKind kind, const JumpLaw& law, double w) {
  if (!(w >= 0.0)) throw DomainError("statistic_transform: w must be non-negative");
  return kind == StatisticKind::Sum ? law.lst(w) : law.cdf(w);
}

double erlang_cdf(int n, double rate, double u) {
  if (n < 0) throw DomainError("erlang_cdf: n must be non-negative");
  if (u < 0.0) return 0.0;
  if (n == 0) return 1.0;
  const double x = rate * u;
  if (x == 0.0) return 0.0;
  // P(Erlang <= u) = P(Poisson(x) >= n); sum whichever side avoids cancellation.
  if (x < n) {
    double sum = 0.0;
    for (int k = n;; ++k) {
      const double p = poisson_pmf(x, k);
      sum += p;
      if (p <= 1e-17 * sum || k > n + 100000) break;
    }
    return std::min(sum, 1.0);
  }
  double lower = 0.0;
  for (int k = 0; k < n; ++k) lower += poisson_pmf(x, k);
  return std::clamp(1.0 - lower, 0.0, 1.0);
}

std::vector<std::vector<double>> convolution_power_cdfs(const JumpLaw& law, int n_max, std::span<const double> us,
                                                        const ConvolutionOptions& options) {
  if (n_max < 0) throw DomainError("convolution_power_cdfs: n_max must be non-negative");
  check_spatial(us);
  if (!law.has_density() || std::holds_alternative<JumpLaw::Exponential>(law.variant()))
    return closed_form_powers(law, n_max, us);
  if (options.cells < 16) throw DomainError("convolution grid needs at least 16 cells");

  const double u_max = us.empty() ? 0.0 : *std::max_element(us.begin(), us.end());
  if (u_max == 0.0 || n_max <= 1) {
    std::vector<std::vector<double>> rows(n_max + 1, std::vector<double>(us.size(), 1.0));
    if (n_max >= 1)
      for (std::size_t k = 0; k < us.size(); ++k) rows[1][k] = law.cdf(us[k]);
    return rows;
  }

  // Step no larger than u_max/cells with the density's jump on a node of
  // both the h and the 2h grid.
  const double b = breakpoint(law);
  double h = u_max / options.cells;
  if (b > 0.0) h = b / (2.0 * std::ceil(b / (2.0 * h)));
  const int cells = static_cast<int>(std::ceil(u_max / h - 1e-9));

  const auto coarse = grid_powers(law, n_max, us, 2.0 * h, (cells + 1) / 2);
  auto fine = grid_powers(law, n_max, us, h, cells);
  // The trapezoidal error is c h^2 + o(h^2): extrapolate, and take a third of
  // the h/2h gap as the estimate for what remains.
  double error = 0.0;
  for (int n = 2; n <= n_max; ++n)
    for (std::size_t k = 0; k < us.size(); ++k) {
      const double gap = fine[n][k] - coarse[n][k];
      error = std::max(error, std::abs(gap) / 3.0);
      fine[n][k] = std::clamp(fine[n][k] + gap / 3.0, 0.0, 1.0);
    }
  if (error > options.max_error) {
    std::ostringstream os;
    os << "grid convolution error estimate " << error << " exceeds budget " << options.max_error;
    throw AccuracyError(os.str(), fine[n_max].empty() ? 0.0 : fine[n_max][0], error);
  }
  return fine;
}

std::vector<double> sum_cdf_series(const JumpLaw& law, double rate, double t, std::span<const double> us, double tol,
                                   const ConvolutionOptions& options) {
  if (!(rate > 0.0)) throw DomainError("sum_cdf_series: rate must be positive");
  if (!(tol > 0.0)) throw DomainError("sum_cdf_series: tol must be positive");
  check_time(t);
  check_spatial(us);
  std::vector<double> out(us.size(), 1.0);
  if (t == 0.0) return out;

  const CountingPmfTable weights = checked_pmf(InterEventLaw::exponential(rate), t, tol, {});
  const auto powers = convolution_power_cdfs(law, weights.truncation, us, options);
  for (std::size_t k = 0; k < us.size(); ++k) {
    double sum = 0.0;
    for (int n = 0; n <= weights.truncation; ++n) sum += weights[n] * powers[n][k];
    out[k] = std::clamp(sum, 0.0, 1.0);
  }
  return out;
}

double sum_cdf_series(const JumpLaw& law, double rate, double t, double u, double tol,
                      const ConvolutionOptions& options) {
  return sum_cdf_series(law, rate, t, std::span<const double>(&u, 1), tol, options)[0];
}

double max_cdf(MlOrder order, const JumpLaw& law, double t, double w) {
  check_time(t);
  if (!(w >= 0.0)) throw DomainError("max_cdf: w must be non-negative");
  const double c = law.survival(w);
  if (t == 0.0 || c == 0.0) return 1.0;
  return ml_one_param(order, -c * std::pow(t, order.value())).value;
}

std::vector<double> mixture_cdf(StatisticKind kind, const JumpLaw& law, const InterEventLaw& ie_law, double t,
                                std::span<const double> us, double tol, const InversionConfig& config,
                                const ConvolutionOptions& options) {
  if (!(tol > 0.0)) throw DomainError("mixture_cdf: tol must be positive");
  check_time(t);
  check_spatial(us);
  std::vector<double> out(us.size(), 1.0);
  if (t == 0.0) return out;

  const CountingPmfTable pmf = checked_pmf(ie_law, t, tol, config);
  if (kind == StatisticKind::Max) {
    for (std::size_t k = 0; k < us.size(); ++k) {
      const double f = law.cdf(us[k]);
      double power = 1.0, sum = 0.0;
      for (int n = 0; n <= pmf.truncation; ++n, power *= f) sum += pmf[n] * power;
      out[k] = std::clamp(sum, 0.0, 1.0);
    }
    return out;
  }
  const auto powers = convolution_power_cdfs(law, pmf.truncation, us, options);
  for (std::size_t k = 0; k < us.size(); ++k) {
    double sum = 0.0;
    for (int n = 0; n <= pmf.truncation; ++n) sum += pmf[n] * powers[n][k];
    out[k] = std::clamp(sum, 0.0, 1.0);
  }
  return out;
}

double mixture_cdf(StatisticKind kind, const JumpLaw& law, const InterEventLaw& ie_law, double t, double u, double tol,
                   const InversionConfig& config, const ConvolutionOptions& options) {
  return mixture_cdf(kind, law, ie_law, t, std::span<const double>(&u, 1), tol, config, options)[0];
}

std::vector<double> semi_markov_row(const TransitionMatrix& q, std::size_t i, const InterEventLaw& ie_law, double t,
                                    double tol, const InversionConfig& config) {
  if (i >= q.size()) throw DomainError("semi_markov: state index out of range");
  if (!(tol > 0.0)) throw DomainError("semi_markov: tol must be positive");
  check_time(t);
  std::vector<double> out(q.size(), 0.0);
  out[i] = ie_law.survival(t);
  if (t == 0.0) return out;

  const CountingPmfTable pmf = checked_pmf(ie_law, t, tol, config);
  std::vector<double> row(q.size(), 0.0);
  row[i] = 1.0;
  for (int n = 1; n <= pmf.truncation; ++n) {
    row = q.propagate(row);
    for (std::size_t j = 0; j < q.size(); ++j) out[j] += row[j] * pmf[n];
  }
  return out;
}

double semi_markov_marginal(const TransitionMatrix& q, std::size_t i, std::size_t j, const InterEventLaw& ie_law,
                            double t, double tol, const InversionConfig& config) {
  if (j >= q.size()) throw DomainError("semi_markov: state index out of range");
  return semi_markov_row(q, i, ie_law, t, tol, config)[j];
}

}  // namespace ctstat
