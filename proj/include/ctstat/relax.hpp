#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ctstat/special.hpp"

namespace ctstat {

/// Memory kernel of the relaxation equation int_0^t Phi(t - t') Q'(t') dt' = -c Q(t).
class KernelSpec {
 public:
  struct Delta {};
  struct PowerLaw {
    MlOrder order;  // Phi(t) = t^(-a) / Gamma(1 - a), 0 < a < 1
  };

  static KernelSpec delta() { return KernelSpec(Delta{}); }
  static KernelSpec power_law(MlOrder order);
  static KernelSpec power_law(double alpha) { return power_law(MlOrder(alpha)); }

  const std::variant<Delta, PowerLaw>& variant() const noexcept { return kernel_; }
  bool is_delta() const noexcept { return std::holds_alternative<Delta>(kernel_); }
  std::string describe() const;

 private:
  explicit KernelSpec(std::variant<Delta, PowerLaw> kernel) : kernel_(kernel) {}
  std::variant<Delta, PowerLaw> kernel_;
};

struct RelaxationProblem {
  KernelSpec kernel = KernelSpec::delta();
  double c = 1.0;  // >= 0
  double t_max = 1.0;
  double step = 1e-3;  // t_max must be a whole number of steps
};

struct RelaxationSolution {
  std::vector<double> grid;  // 0, h, ..., t_max
  std::vector<double> values;
  std::string scheme;
  double step = 0.0;
  /// Half-step Richardson estimate of max |Q_h - Q|; 0 for the exact exponential.
  double est_error = 0.0;
  /// Starting-correction count used by the L1 scheme (0 for plain L1).
  int corrections = 0;
};

struct SolverOptions {
  int threads = 1;          // the h and h/2 solves run concurrently when > 1
  bool estimate_error = true;
  /// Starting corrections for the t^a, t^2a, ... terms of the solution;
  /// -1 picks every k a < 2 - a (at most 3).  0 is the plain L1 scheme.
  int corrections = -1;
};

/// Delta kernel: exact e^(-c t) on the grid.  Power-law kernel: implicit L1
/// product integration with starting corrections for the t^(k a) terms of
/// the solution near t = 0.
RelaxationSolution solve_relaxation(const RelaxationProblem& problem, const SolverOptions& options = {});

/// Number of starting corrections the solver picks for a given order.
int default_corrections(MlOrder order);

/// L1 approximation of the Caputo derivative at grid point `index` >= 1 of
/// samples on a uniform grid.  With corrections > 0 the starting-correction
/// terms used by solve_relaxation are added, so the discrete residual of a
/// corrected solve is reproduced.
double caputo_l1(std::span<const double> values, double step, MlOrder order, std::size_t index, int corrections = 0);

}  // namespace ctstat
