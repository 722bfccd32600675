#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "logsymcure/likelihood.hpp"

namespace lsc {

struct OptimConfig {
  int max_iterations = 500;
  /// Convergence threshold on the max-norm of the unconstrained gradient.
  double gradient_tolerance = 1e-6;
  /// Relative step size below which iteration stops.
  double step_tolerance = 1e-10;
  int n_starts = 5;
  std::uint64_t seed = 0;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  /// Largest max-norm step tried first by the line search.
  double max_step = 5.0;
};

struct OptimResult {
  Eigen::VectorXd x;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
  int start_index = 0;
  int evaluations = 0;
  std::string message;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;
using Gradient = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// BFGS maximization with inverse-Hessian updates and a strong Wolfe line
/// search. Trial points where the objective is not finite (or equals the
/// loglik sentinel) are rejected rather than reported as errors.
OptimResult maximize(const Objective& objective, const Gradient& gradient, const Eigen::VectorXd& start,
                     const OptimConfig& config);

/// (beta, log eta, log phi).
Eigen::VectorXd to_unconstrained(const ParamVector& lambda);
ParamVector from_unconstrained(const Eigen::VectorXd& v);
/// Chain rule: d/d(log eta) = eta * U_eta, likewise for phi.
Eigen::VectorXd unconstrained_gradient(const Eigen::VectorXd& natural_score, const ParamVector& lambda);

/// Start values. The first is data driven (event-time median and log-variance,
/// Kaplan-Meier plateau as cure guess); the rest are seeded jitters of it.
std::vector<ParamVector> default_starts(const SurvivalDataset& data, const ModelSpec& model, int n_starts,
                                        std::uint64_t seed);

/// Intercept on the link scale matching a cure-fraction guess, clamped to [0.01, 0.99].
double intercept_for_cure_fraction(const IncidenceModel& incidence, double cure_fraction);

}  // namespace lsc
