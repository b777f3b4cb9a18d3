// Copyright 2026 The polchip Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Thin adapter over Eigen's MINPACK Levenberg-Marquardt for small dense problems.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>

#include <functional>

#include "polchip/errors.hpp"

namespace polchip {

struct LeastSquaresProblem {
  int n_params = 0;
  int n_residuals = 0;
  std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& r)> residuals;
  std::function<void(const Eigen::VectorXd& x, Eigen::MatrixXd& jac)> jacobian;
};

struct LeastSquaresSolution {
  Eigen::VectorXd x;
  double cost = 0.0;  // sum of squared residuals
  /// s^2 (J^T J)^-1 with s^2 = cost / (m - n); empty if J^T J is singular or m <= n.
  Eigen::MatrixXd covariance;
  int status = 0;
};

namespace detail {

struct LmFunctor {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const LeastSquaresProblem* p;
  int inputs() const { return p->n_params; }
  int values() const { return p->n_residuals; }
  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
    p->residuals(x, r);
    return 0;
  }
  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& j) const {
    p->jacobian(x, j);
    return 0;
  }
};

}  // namespace detail

inline LeastSquaresSolution solve_least_squares(const LeastSquaresProblem& problem, Eigen::VectorXd x0,
                                                double tol = 1e-14, int max_evals = 4000) {
  if (problem.n_residuals < problem.n_params) throw NumericalError("least squares: fewer residuals than parameters");
  detail::LmFunctor f{&problem};
  Eigen::LevenbergMarquardt<detail::LmFunctor> lm(f);
  lm.parameters.ftol = tol;
  lm.parameters.xtol = tol;
  lm.parameters.gtol = 0.0;
  lm.parameters.maxfev = max_evals;
  LeastSquaresSolution sol;
  sol.status = static_cast<int>(lm.minimize(x0));
  sol.x = x0;
  Eigen::VectorXd r(problem.n_residuals);
  problem.residuals(x0, r);
  sol.cost = r.squaredNorm();
  if (!r.allFinite()) throw NumericalError("least squares: non-finite residuals at solution");
  const int dof = problem.n_residuals - problem.n_params;
  if (dof > 0) {
    Eigen::MatrixXd j(problem.n_residuals, problem.n_params);
    problem.jacobian(x0, j);
    const Eigen::MatrixXd jtj = j.transpose() * j;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
    if (lu.isInvertible()) sol.covariance = lu.inverse() * (sol.cost / dof);
  }
  return sol;
}

}  // namespace polchip
