// Tests for the damped least-squares fitter.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "egoe/levmar.hpp"

namespace {

// Noiseless exponential decay sampled on a fixed grid.
egoe::ResidualFn exponential_residuals(double a_true, double b_true) {
  return [a_true, b_true](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(20);
    for (int i = 0; i < 20; ++i) {
      const double t = 0.25 * i;
      const double data = a_true * std::exp(-b_true * t);
      r(i) = data - p(0) * std::exp(-p(1) * t);
    }
    return r;
  };
}

}  // namespace

TEST_CASE("levmar recovers exponential-decay parameters from a poor start") {
  const auto result = egoe::levmar(exponential_residuals(2.5, 1.3),
                                   Eigen::Vector2d{1.0, 0.5});
  CHECK(result.converged);
  CHECK(result.x(0) == doctest::Approx(2.5).epsilon(1e-8));
  CHECK(result.x(1) == doctest::Approx(1.3).epsilon(1e-8));
  CHECK(result.residual_norm <= 1e-8);
  CHECK(result.iterations > 0);
}

TEST_CASE("levmar minimizes the Rosenbrock valley") {
  const egoe::ResidualFn rosenbrock = [](const Eigen::VectorXd& p) {
    return Eigen::Vector2d{1.0 - p(0), 10.0 * (p(1) - p(0) * p(0))};
  };
  egoe::LevMarOptions options;
  options.max_iterations = 500;
  const auto result = egoe::levmar(rosenbrock, Eigen::Vector2d{-1.2, 1.0}, options);
  CHECK(result.converged);
  CHECK(result.x(0) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(result.x(1) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("levmar solves linear least squares to the normal-equations answer") {
  Eigen::MatrixXd a(5, 2);
  a << 1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0, 1.0, 4.0;
  const Eigen::VectorXd y = Eigen::VectorXd{{1.1, 1.9, 3.2, 3.8, 5.1}};
  const egoe::ResidualFn linear = [&](const Eigen::VectorXd& p) {
    return Eigen::VectorXd(y - a * p);
  };
  const Eigen::VectorXd direct =
      (a.transpose() * a).ldlt().solve(a.transpose() * y);
  const auto result = egoe::levmar(linear, Eigen::Vector2d{0.0, 0.0});
  CHECK(result.converged);
  CHECK((result.x - direct).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("levmar free_mask freezes parameters at their initial values") {
  // Fix the decay rate at the truth: the amplitude still converges.
  const auto fixed_true = egoe::levmar(exponential_residuals(2.5, 1.3),
                                       Eigen::Vector2d{1.0, 1.3}, {},
                                       {true, false});
  CHECK(fixed_true.converged);
  CHECK(fixed_true.x(0) == doctest::Approx(2.5).epsilon(1e-8));
  CHECK(fixed_true.x(1) == 1.3);

  // Fix the decay rate at a wrong value: it must not move, and the residual
  // cannot reach zero.
  const auto fixed_wrong = egoe::levmar(exponential_residuals(2.5, 1.3),
                                        Eigen::Vector2d{1.0, 2.0}, {},
                                        {true, false});
  CHECK(fixed_wrong.x(1) == 2.0);
  CHECK(fixed_wrong.residual_norm > 0.1);
}

TEST_CASE("levmar started at the optimum stays there") {
  const auto result = egoe::levmar(exponential_residuals(2.5, 1.3),
                                   Eigen::Vector2d{2.5, 1.3});
  CHECK(result.converged);
  CHECK(result.x(0) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(result.x(1) == doctest::Approx(1.3).epsilon(1e-12));
}
