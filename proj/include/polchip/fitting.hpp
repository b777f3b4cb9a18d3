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

// Least-squares visibility fits of HOM dips and waveplate fringes.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "polchip/least_squares.hpp"
#include "polchip/scan.hpp"

namespace polchip {

namespace detail {

inline void model_eval(FitModel model, const Eigen::VectorXd& p, double x, double& y, double* grad) {
  switch (model) {
    case FitModel::dip: {
      const double n0 = p[0], v = p[1], x0 = p[2], w = p[3];
      const double u = (x - x0) / w;
      const double g = std::exp(-u * u);
      y = n0 * (1.0 - v * g);
      if (grad) {
        grad[0] = 1.0 - v * g;
        grad[1] = -n0 * g;
        grad[2] = -n0 * v * g * 2.0 * u / w;
        grad[3] = -n0 * v * g * 2.0 * u * u / w;
      }
      return;
    }
    case FitModel::cos4: {
      const double c = std::cos(4.0 * x);
      y = p[0] * (1.0 + p[1] * c);
      if (grad) {
        grad[0] = 1.0 + p[1] * c;
        grad[1] = p[0] * c;
      }
      return;
    }
    case FitModel::cos4_power: {
      const double c4 = std::pow(std::cos(x), 4);
      y = p[0] * (1.0 - p[1] + 2.0 * p[1] * c4);
      if (grad) {
        grad[0] = 1.0 - p[1] + 2.0 * p[1] * c4;
        grad[1] = p[0] * (2.0 * c4 - 1.0);
      }
      return;
    }
  }
}

inline int model_params(FitModel m) { return m == FitModel::dip ? 4 : 2; }

}  // namespace detail

/// Evaluates a fitted model at x.
inline double evaluate(const VisibilityFit& f, double x) {
  Eigen::VectorXd p(detail::model_params(f.model));
  p[0] = f.n0;
  p[1] = f.signed_visibility;
  if (f.model == FitModel::dip) {
    p[2] = f.center;
    p[3] = f.width;
  }
  double y = 0.0;
  detail::model_eval(f.model, p, x, y, nullptr);
  return y;
}

/// Least-squares fit of one of the fringe models. Needs at least 5 samples that are not all equal.
/// Optional per-sample sigma weights the residuals (for counts, sigma = sqrt(counts)). The reported
/// standard errors come from s^2 (J^T W J)^-1 at the optimum.
inline VisibilityFit fit_visibility(std::span<const double> x, std::span<const double> y, FitModel model,
                                    std::span<const double> sigma = {}) {
  if (x.size() != y.size()) throw ValidationError("fit_visibility: x and y differ in length");
  if (!sigma.empty() && sigma.size() != y.size()) throw ValidationError("fit_visibility: sigma length mismatch");
  for (double s : sigma)
    if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("fit_visibility: sigma must be positive");
  const auto weight = [&](int i) { return sigma.empty() ? 1.0 : 1.0 / sigma[i]; };
  if (x.size() < 5) throw ValidationError("fit_visibility: need at least 5 samples");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw ValidationError("fit_visibility: non-finite sample");
  const auto [ymin_it, ymax_it] = std::minmax_element(y.begin(), y.end());
  const double yscale = std::max(std::abs(*ymin_it), std::abs(*ymax_it));
  if (*ymax_it - *ymin_it <= 1e-12 * std::max(yscale, 1e-300)) {
    throw NumericalError("fit_visibility: degenerate samples (constant curve)");
  }

  const int np = detail::model_params(model);
  const int m = static_cast<int>(x.size());
  LeastSquaresProblem prob;
  prob.n_params = np;
  prob.n_residuals = m;
  prob.residuals = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    for (int i = 0; i < m; ++i) {
      double yi = 0.0;
      detail::model_eval(model, p, x[i], yi, nullptr);
      r[i] = (yi - y[i]) * weight(i);
    }
  };
  prob.jacobian = [&](const Eigen::VectorXd& p, Eigen::MatrixXd& j) {
    double g[4];
    for (int i = 0; i < m; ++i) {
      double yi = 0.0;
      detail::model_eval(model, p, x[i], yi, g);
      for (int k = 0; k < np; ++k) j(i, k) = g[k] * weight(i);
    }
  };

  std::vector<Eigen::VectorXd> starts;
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(m);
  if (model == FitModel::dip) {
    // The feature sits where y is furthest from the median; the baseline is the average of the
    // points furthest from it.
    std::vector<double> sorted(y.begin(), y.end());
    std::nth_element(sorted.begin(), sorted.begin() + m / 2, sorted.end());
    const double med = sorted[m / 2];
    std::size_t ic = 0;
    for (std::size_t i = 1; i < y.size(); ++i)
      if (std::abs(y[i] - med) > std::abs(y[ic] - med)) ic = i;
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return std::abs(x[a] - x[ic]) > std::abs(x[b] - x[ic]); });
    const std::size_t nb = std::max<std::size_t>(2, x.size() / 5);
    double base = 0.0;
    for (std::size_t i = 0; i < nb; ++i) base += y[order[i]];
    base /= static_cast<double>(nb);
    if (base == 0.0) base = mean;
    const auto [xmin_it, xmax_it] = std::minmax_element(x.begin(), x.end());
    const double span = *xmax_it - *xmin_it;
    for (double wf : {0.1, 0.25, 0.03}) {
      Eigen::VectorXd p(4);
      p << base, 1.0 - y[ic] / base, x[ic], std::max(wf * span, 1e-12);
      starts.push_back(p);
    }
  } else {
    Eigen::VectorXd p(2);
    p << mean, 0.5;
    starts.push_back(p);
    p << mean, -0.5;
    starts.push_back(p);
  }

  LeastSquaresSolution best;
  bool have = false;
  for (const auto& s : starts) {
    LeastSquaresSolution sol;
    try {
      sol = solve_least_squares(prob, s);
    } catch (const NumericalError&) {
      continue;
    }
    if (!have || sol.cost < best.cost) {
      best = sol;
      have = true;
    }
  }
  if (!have) throw NumericalError("fit_visibility: no start converged");

  VisibilityFit f;
  f.model = model;
  f.n0 = best.x[0];
  f.signed_visibility = best.x[1];
  f.visibility = std::abs(best.x[1]);
  if (model == FitModel::dip) {
    f.center = best.x[2];
    f.width = std::abs(best.x[3]);
  }
  if (best.covariance.size() > 0) {
    f.stderr_n0 = std::sqrt(std::max(0.0, best.covariance(0, 0)));
    f.stderr_visibility = std::sqrt(std::max(0.0, best.covariance(1, 1)));
  }
  // unweighted RMS so the number stays in the units of y
  Eigen::VectorXd r(m);
  for (int i = 0; i < m; ++i) {
    double yi = 0.0;
    detail::model_eval(model, best.x, x[i], yi, nullptr);
    r[i] = yi - y[i];
  }
  f.rms_residual = std::sqrt(r.squaredNorm() / m);
  return f;
}

inline VisibilityFit fit_visibility(const ScanResult& samples, FitModel model) {
  return fit_visibility(samples.param, samples.rate, model);
}

}  // namespace polchip
