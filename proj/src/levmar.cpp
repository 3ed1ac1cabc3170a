#include "egoe/levmar.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "egoe/errors.hpp"

namespace egoe {

namespace {

Eigen::MatrixXd numeric_jacobian(const ResidualFn& f, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& r0, const std::vector<bool>& free_mask) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(r0.size(), n);
  for (Eigen::Index p = 0; p < n; ++p) {
    if (!free_mask.empty() && !free_mask[static_cast<std::size_t>(p)]) continue;
    const double h = std::sqrt(1e-12) * std::max(1.0, std::abs(x(p)));
    Eigen::VectorXd xp = x;
    xp(p) += h;
    jac.col(p) = (f(xp) - r0) / h;
  }
  return jac;
}

}  // namespace

LevMarResult levmar(const ResidualFn& residuals, Eigen::VectorXd x0, const LevMarOptions& options,
                    const std::vector<bool>& free_mask) {
  if (!free_mask.empty() && free_mask.size() != static_cast<std::size_t>(x0.size()))
    throw NumericError("levmar: free_mask length mismatch");

  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd r = residuals(x);
  double cost = 0.5 * r.squaredNorm();

  Eigen::MatrixXd jac = numeric_jacobian(residuals, x, r, free_mask);
  Eigen::MatrixXd jtj = jac.transpose() * jac;
  Eigen::VectorXd jtr = jac.transpose() * r;

  double mu = options.initial_mu * jtj.diagonal().maxCoeff();
  if (!(mu > 0.0)) mu = options.initial_mu;
  double nu = 2.0;

  LevMarResult result;
  bool converged = jtr.lpNorm<Eigen::Infinity>() <= options.gradient_tol;

  int it = 0;
  for (; it < options.max_iterations && !converged; ++it) {
    Eigen::MatrixXd a = jtj;
    a.diagonal().array() += mu;
    // Frozen parameters get an identity row/column so the solve stays regular.
    if (!free_mask.empty())
      for (Eigen::Index p = 0; p < x.size(); ++p)
        if (!free_mask[static_cast<std::size_t>(p)]) {
          a.row(p).setZero();
          a.col(p).setZero();
          a(p, p) = 1.0;
          jtr(p) = 0.0;
        }

    const Eigen::VectorXd step = a.ldlt().solve(-jtr);
    if (!step.allFinite()) {
      mu *= nu;
      nu *= 2.0;
      continue;
    }
    if (step.norm() <= options.step_tol * (x.norm() + options.step_tol)) {
      converged = true;
      break;
    }

    const Eigen::VectorXd x_new = x + step;
    const Eigen::VectorXd r_new = residuals(x_new);
    const double cost_new = 0.5 * r_new.squaredNorm();
    const double predicted = 0.5 * step.dot(mu * step - jtr);
    const double rho = predicted > 0.0 ? (cost - cost_new) / predicted : -1.0;

    if (rho > 0.0 && cost_new < cost) {
      x = x_new;
      r = r_new;
      cost = cost_new;
      jac = numeric_jacobian(residuals, x, r, free_mask);
      jtj = jac.transpose() * jac;
      jtr = jac.transpose() * r;
      mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
      nu = 2.0;
      if (jtr.lpNorm<Eigen::Infinity>() <= options.gradient_tol) converged = true;
    } else {
      mu *= nu;
      nu *= 2.0;
      if (!std::isfinite(mu)) break;
    }
  }

  result.x = std::move(x);
  result.residual_norm = std::sqrt(2.0 * cost);
  result.iterations = it;
  result.converged = converged;
  return result;
}

}  // namespace egoe
