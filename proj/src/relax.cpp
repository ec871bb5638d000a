#include "ctstat/relax.hpp"

#include <array>
#include <cmath>
#include <future>
#include <sstream>

#include "ctstat/error.hpp"

namespace ctstat {

namespace {

constexpr int kMaxCorrections = 3;

// The L1 discretisation on a uniform grid of step h:
//   D^a u(t_n) ~ mu sum_{j=1}^{n} b_{n-j} (u_j - u_{j-1}),
//   b_k = (k+1)^(1-a) - k^(1-a),  mu = h^(-a) / Gamma(2-a).
// Solutions behave like sum_k c_k t^(k a) near 0, which L1 resolves only to
// first order; starting weights W_{n,j} (j = 1..m) make the operator exact
// on t^(k a) for k = 1..m and restore the 2-a rate.
class L1Operator {
 public:
  L1Operator(double alpha, double step, std::size_t n_steps, int corrections)
      : alpha_(alpha), h_(step), m_(corrections), b_(n_steps + 1), weights_((n_steps + 1) * corrections, 0.0) {
    mu_ = std::pow(h_, -alpha_) / gamma_function(2.0 - alpha_);
    for (std::size_t k = 0; k <= n_steps; ++k) {
      const double kd = static_cast<double>(k);
      b_[k] = std::pow(kd + 1.0, 1.0 - alpha_) - std::pow(kd, 1.0 - alpha_);
    }
    if (m_ > 0) build_weights(n_steps);
  }

  double mu() const { return mu_; }
  double b(std::size_t k) const { return b_[k]; }
  int corrections() const { return m_; }
  double weight(std::size_t n, int j) const { return weights_[n * m_ + (j - 1)]; }

  // mu sum_{j=1}^{n} b_{n-j} (u_j - u_{j-1}), summed in a fixed order.
  double l1(std::span<const double> u, std::size_t n) const {
    double sum = 0.0;
    for (std::size_t j = 1; j <= n; ++j) sum += b_[n - j] * (u[j] - u[j - 1]);
    return mu_ * sum;
  }

  double correction(std::span<const double> u, std::size_t n) const {
    double sum = 0.0;
    for (int j = 1; j <= m_; ++j) sum += weight(n, j) * (u[j] - u[0]);
    return sum;
  }

 private:
  void build_weights(std::size_t n_steps) {
    const int m = m_;
    std::vector<double> sigma(m);
    for (int k = 0; k < m; ++k) sigma[k] = (k + 1) * alpha_;

    // V_{k,j} = t_j^{sigma_k}; solved once by Gaussian elimination with
    // partial pivoting into an explicit inverse (m <= 3).
    std::array<std::array<double, 2 * kMaxCorrections>, kMaxCorrections> aug{};
    for (int k = 0; k < m; ++k) {
      for (int j = 0; j < m; ++j) aug[k][j] = std::pow((j + 1) * h_, sigma[k]);
      aug[k][m + k] = 1.0;
    }
    for (int col = 0; col < m; ++col) {
      int pivot = col;
      for (int r = col + 1; r < m; ++r)
        if (std::abs(aug[r][col]) > std::abs(aug[pivot][col])) pivot = r;
      std::swap(aug[col], aug[pivot]);
      const double d = aug[col][col];
      if (d == 0.0) throw NumericError("relaxation: singular starting-weight system");
      for (int c = 0; c < 2 * m; ++c) aug[col][c] /= d;
      for (int r = 0; r < m; ++r) {
        if (r == col) continue;
        const double f = aug[r][col];
        for (int c = 0; c < 2 * m; ++c) aug[r][c] -= f * aug[col][c];
      }
    }

    // Residuals R_{k,n} = D^a t^sigma(t_n) - L1_n(t^sigma).
    std::vector<double> basis(n_steps + 1);
    std::vector<std::vector<double>> residual(m, std::vector<double>(n_steps + 1, 0.0));
    for (int k = 0; k < m; ++k) {
      const double s = sigma[k];
      const double scale = gamma_function(s + 1.0) / gamma_function(s + 1.0 - alpha_);
      for (std::size_t i = 0; i <= n_steps; ++i) basis[i] = std::pow(static_cast<double>(i) * h_, s);
      for (std::size_t n = 1; n <= n_steps; ++n)
        residual[k][n] = scale * std::pow(static_cast<double>(n) * h_, s - alpha_) - l1(basis, n);
    }
    for (std::size_t n = 1; n <= n_steps; ++n)
      for (int j = 0; j < m; ++j) {
        double w = 0.0;
        for (int k = 0; k < m; ++k) w += aug[j][m + k] * residual[k][n];
        weights_[n * m + j] = w;
      }
  }

  double alpha_;
  double h_;
  int m_;
  double mu_ = 0.0;
  std::vector<double> b_;
  std::vector<double> weights_;
};

// Implicit corrected L1 for D^a Q = -c Q, Q(0) = 1.  The first m steps are
// coupled through the starting weights and solved together.
std::vector<double> solve_l1(double alpha, double c, double h, std::size_t n_steps, int m) {
  const L1Operator op(alpha, h, n_steps, m);
  std::vector<double> q(n_steps + 1, 0.0);
  q[0] = 1.0;
  const std::size_t head = std::min<std::size_t>(m, n_steps);

  if (head > 0) {
    // Unknowns q_1..q_head: mu sum b_{n-j}(q_j - q_{j-1}) + sum_j W_{n,j}(q_j - 1) + c q_n = 0.
    std::array<std::array<double, kMaxCorrections + 1>, kMaxCorrections> a{};
    for (std::size_t n = 1; n <= head; ++n) {
      auto& row = a[n - 1];
      for (std::size_t j = 1; j <= n; ++j) {
        const double coef = op.mu() * op.b(n - j);
        row[j - 1] += coef;
        if (j >= 2)
          row[j - 2] -= coef;
        else
          row[head] += coef;
      }
      for (std::size_t j = 1; j <= head; ++j) {
        row[j - 1] += op.weight(n, static_cast<int>(j));
        row[head] += op.weight(n, static_cast<int>(j));
      }
      row[n - 1] += c;
    }
    for (std::size_t col = 0; col < head; ++col) {
      std::size_t pivot = col;
      for (std::size_t r = col + 1; r < head; ++r)
        if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
      std::swap(a[col], a[pivot]);
      if (a[col][col] == 0.0) throw NumericError("relaxation: singular starting system");
      for (std::size_t r = 0; r < head; ++r) {
        if (r == col) continue;
        const double f = a[r][col] / a[col][col];
        for (std::size_t k = col; k <= head; ++k) a[r][k] -= f * a[col][k];
      }
    }
    for (std::size_t n = 1; n <= head; ++n) q[n] = a[n - 1][head] / a[n - 1][n - 1];
  }

  const double diagonal = op.mu() * op.b(0) + c;
  for (std::size_t n = head + 1; n <= n_steps; ++n) {
    double history = 0.0;
    for (std::size_t j = 1; j < n; ++j) history += op.b(n - j) * (q[j] - q[j - 1]);
    const double rhs = op.mu() * (op.b(0) * q[n - 1] - history) - op.correction(q, n);
    q[n] = rhs / diagonal;
    if (!std::isfinite(q[n])) {
      std::ostringstream os;
      os << "relaxation: non-finite value at step " << n;
      throw NumericError(os.str());
    }
  }
  return q;
}

std::size_t step_count(const RelaxationProblem& p) {
  if (!(p.t_max > 0.0) || !std::isfinite(p.t_max)) throw DomainError("relaxation: t_max must be positive");
  if (!(p.step > 0.0) || p.step > p.t_max) throw DomainError("relaxation: step must lie in (0, t_max]");
  if (!(p.c >= 0.0) || !std::isfinite(p.c)) throw DomainError("relaxation: c must be non-negative");
  const double ratio = p.t_max / p.step;
  const double n = std::round(ratio);
  if (std::abs(ratio - n) > 1e-9 * ratio) throw DomainError("relaxation: t_max must be a whole number of steps");
  if (n > 2e6) throw DomainError("relaxation: more than 2e6 steps requested");
  return static_cast<std::size_t>(n);
}

}  // namespace

KernelSpec KernelSpec::power_law(MlOrder order) {
  if (order.is_exponential()) throw DomainError("power-law kernel needs order in (0, 1); use the delta kernel");
  return KernelSpec(PowerLaw{order});
}

std::string KernelSpec::describe() const {
  if (is_delta()) return "delta";
  std::ostringstream os;
  os.precision(12);
  os << "powerlaw:" << std::get<PowerLaw>(kernel_).order.value();
  return os.str();
}

int default_corrections(MlOrder order) {
  const double a = order.value();
  int m = 0;
  while (m < kMaxCorrections && (m + 1) * a < 2.0 - a) ++m;
  return m;
}

RelaxationSolution solve_relaxation(const RelaxationProblem& problem, const SolverOptions& options) {
  const std::size_t n_steps = step_count(problem);
  RelaxationSolution out;
  out.step = problem.t_max / static_cast<double>(n_steps);
  out.grid.resize(n_steps + 1);
  for (std::size_t i = 0; i <= n_steps; ++i) out.grid[i] = static_cast<double>(i) * out.step;
  out.grid.back() = problem.t_max;

  if (problem.kernel.is_delta()) {
    out.scheme = "exact-exponential";
    out.values.resize(n_steps + 1);
    for (std::size_t i = 0; i <= n_steps; ++i) out.values[i] = std::exp(-problem.c * out.grid[i]);
    return out;
  }

  const MlOrder order = std::get<KernelSpec::PowerLaw>(problem.kernel.variant()).order;
  const double alpha = order.value();
  if (options.corrections > kMaxCorrections) throw DomainError("relaxation: at most 3 starting corrections");
  const int m = options.corrections < 0 ? default_corrections(order) : options.corrections;
  out.corrections = m;
  out.scheme = m > 0 ? "l1-implicit-corrected" : "l1-implicit";

  if (problem.c == 0.0) {
    out.values.assign(n_steps + 1, 1.0);
    return out;
  }
  if (!options.estimate_error) {
    out.values = solve_l1(alpha, problem.c, out.step, n_steps, m);
    return out;
  }

  std::vector<double> fine;
  if (options.threads > 1) {
    auto pending = std::async(std::launch::async, solve_l1, alpha, problem.c, 0.5 * out.step, 2 * n_steps, m);
    out.values = solve_l1(alpha, problem.c, out.step, n_steps, m);
    fine = pending.get();
  } else {
    out.values = solve_l1(alpha, problem.c, out.step, n_steps, m);
    fine = solve_l1(alpha, problem.c, 0.5 * out.step, 2 * n_steps, m);
  }
  // Error of the coarse solution from the difference at rate 2 - a.
  const double gain = std::pow(2.0, 2.0 - alpha);
  double diff = 0.0;
  for (std::size_t i = 0; i <= n_steps; ++i) diff = std::max(diff, std::abs(out.values[i] - fine[2 * i]));
  out.est_error = diff * gain / (gain - 1.0);
  return out;
}

double caputo_l1(std::span<const double> values, double step, MlOrder order, std::size_t index, int corrections) {
  if (index == 0) throw DomainError("caputo_l1: the scheme is undefined at index 0");
  if (index >= values.size()) throw DomainError("caputo_l1: index beyond the samples");
  if (!(step > 0.0)) throw DomainError("caputo_l1: step must be positive");
  if (corrections < 0 || corrections > kMaxCorrections) throw DomainError("caputo_l1: corrections must lie in [0, 3]");
  if (static_cast<std::size_t>(corrections) >= values.size())
    throw DomainError("caputo_l1: fewer samples than starting corrections");
  if (order.is_exponential()) {
    // a = 1 is the first derivative; the backward difference is its L1 limit.
    return (values[index] - values[index - 1]) / step;
  }
  const L1Operator op(order.value(), step, index, corrections);
  return op.l1(values, index) + op.correction(values, index);
}

}  // namespace ctstat
