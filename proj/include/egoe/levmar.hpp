#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace egoe {

// Residual map: parameters -> residual vector (data minus model).
using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct LevMarOptions {
  int max_iterations = 200;
  double gradient_tol = 1e-12;  // stop on small J^T r (infinity norm)
  double step_tol = 1e-12;      // stop on small relative step
  double initial_mu = 1e-3;     // damping scale relative to max diag(J^T J)
};

struct LevMarResult {
  Eigen::VectorXd x;
  double residual_norm = 0.0;  // |r|_2 at the solution
  int iterations = 0;
  bool converged = false;
};

// Damped least squares with a numeric forward-difference Jacobian and the
// Madsen-Nielsen gain-ratio damping update. `free_mask`, when non-empty,
// freezes parameters whose entry is false at their initial values.
LevMarResult levmar(const ResidualFn& residuals, Eigen::VectorXd x0,
                    const LevMarOptions& options = {},
                    const std::vector<bool>& free_mask = {});

}  // namespace egoe
