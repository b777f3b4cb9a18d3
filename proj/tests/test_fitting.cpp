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

#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "polchip/fitting.hpp"
#include "polchip/interference.hpp"

using namespace polchip;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> dip_counts(const std::vector<double>& x, double n0, double v, double x0, double w,
                               std::mt19937_64* rng) {
  std::vector<double> y;
  for (double xi : x) {
    const double mean = n0 * (1 - v * std::exp(-std::pow((xi - x0) / w, 2)));
    if (rng) {
      std::poisson_distribution<long> pd(mean);
      y.push_back(static_cast<double>(pd(*rng)));
    } else {
      y.push_back(mean);
    }
  }
  return y;
}

}  // namespace

TEST(Fit, Cos4RoundTrip) {
  const auto x = linspace(0.0, kPi, 60);
  for (double v : {0.973, -0.4, 0.1}) {
    std::vector<double> y;
    for (double t : x) y.push_back(1234.5 * (1 + v * std::cos(4 * t)));
    const auto f = fit_visibility(x, y, FitModel::cos4);
    EXPECT_NEAR(f.signed_visibility, v, 1e-6);
    EXPECT_NEAR(f.visibility, std::abs(v), 1e-6);
    EXPECT_NEAR(f.n0, 1234.5, 1e-6);
    EXPECT_LT(f.rms_residual, 1e-6);
  }
}

TEST(Fit, Cos4PowerRoundTrip) {
  const auto x = linspace(0.0, kPi, 45);
  std::vector<double> y;
  for (double t : x) y.push_back(0.7 * (1 - 0.987 + 2 * 0.987 * std::pow(std::cos(t), 4)));
  const auto f = fit_visibility(x, y, FitModel::cos4_power);
  EXPECT_NEAR(f.visibility, 0.987, 1e-6);
  EXPECT_NEAR(f.n0, 0.7, 1e-9);
}

TEST(Fit, DipAndPeakRoundTrip) {
  const auto x = linspace(-150, 150, 61);
  const auto dip = fit_visibility(x, dip_counts(x, 3000, 0.93, 4.0, 30.0, nullptr), FitModel::dip);
  EXPECT_NEAR(dip.visibility, 0.93, 1e-8);
  EXPECT_NEAR(dip.center, 4.0, 1e-6);
  EXPECT_NEAR(dip.width, 30.0, 1e-6);
  // a peak is a dip with negative depth
  const auto peak = fit_visibility(x, dip_counts(x, 3000, -0.937, 0.0, 25.0, nullptr), FitModel::dip);
  EXPECT_NEAR(peak.signed_visibility, -0.937, 1e-8);
  EXPECT_NEAR(peak.visibility, 0.937, 1e-8);
}

TEST(Fit, PoissonDipWithinThreeSigma) {
  const auto x = linspace(-150, 150, 41);
  std::mt19937_64 rng(2024);
  const auto f = fit_visibility(x, dip_counts(x, 3000, 0.93, 0.0, 30.0, &rng), FitModel::dip);
  EXPECT_GT(f.stderr_visibility, 0.0);
  EXPECT_LT(std::abs(f.visibility - 0.93), 3 * f.stderr_visibility);
}

TEST(Fit, StandardErrorCoverage) {
  // With sqrt(counts) weights about 95% of 2-sigma intervals should contain the truth. The
  // unweighted fit spreads the baseline variance over the dip and is conservative.
  const auto x = linspace(-150, 150, 41);
  int inside_w = 0, inside_u = 0;
  const int trials = 300;
  for (int s = 0; s < trials; ++s) {
    std::mt19937_64 rng(s);
    const auto y = dip_counts(x, 3000, 0.93, 0.0, 30.0, &rng);
    std::vector<double> sig;
    for (double c : y) sig.push_back(std::sqrt(std::max(c, 1.0)));
    const auto fw = fit_visibility(x, y, FitModel::dip, sig);
    const auto fu = fit_visibility(x, y, FitModel::dip);
    if (std::abs(fw.visibility - 0.93) < 2 * fw.stderr_visibility) ++inside_w;
    if (std::abs(fu.visibility - 0.93) < 2 * fu.stderr_visibility) ++inside_u;
  }
  EXPECT_GT(inside_w, 0.90 * trials);
  EXPECT_LT(inside_w, 0.99 * trials);
  EXPECT_GE(inside_u, inside_w);
}

TEST(Fit, Errors) {
  const std::vector<double> x = {0, 1, 2, 3, 4, 5};
  const std::vector<double> flat(6, 7.0);
  EXPECT_THROW(fit_visibility(x, flat, FitModel::dip), NumericalError);
  EXPECT_THROW(fit_visibility(x, flat, FitModel::cos4), NumericalError);
  const std::vector<double> four = {1, 2, 3, 4};
  EXPECT_THROW(fit_visibility(four, four, FitModel::cos4), ValidationError);
  const std::vector<double> y = {1, 2, 3, 4, 5};
  EXPECT_THROW(fit_visibility(x, y, FitModel::cos4), ValidationError);
  const std::vector<double> y6 = {1, 2, 3, 4, 5, 6};
  const std::vector<double> bad_sigma = {1, 1, 0, 1, 1, 1};
  EXPECT_THROW(fit_visibility(x, y6, FitModel::cos4, bad_sigma), ValidationError);
}

TEST(Fit, EvaluateReproducesModel) {
  const auto x = linspace(0.0, kPi, 30);
  std::vector<double> y;
  for (double t : x) y.push_back(2 * (1 + 0.5 * std::cos(4 * t)));
  const auto f = fit_visibility(x, y, FitModel::cos4);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(evaluate(f, x[i]), y[i], 1e-9);
}

TEST(LeastSquares, LinearRegressionCovariance) {
  // y = a + b x with known residuals; compare against the normal-equation formulas.
  const std::vector<double> x = {0, 1, 2, 3, 4, 5, 6, 7};
  const std::vector<double> y = {1.1, 2.9, 5.2, 7.1, 8.8, 11.2, 12.9, 15.1};
  LeastSquaresProblem p;
  p.n_params = 2;
  p.n_residuals = 8;
  p.residuals = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r) {
    for (int i = 0; i < 8; ++i) r[i] = q[0] + q[1] * x[i] - y[i];
  };
  p.jacobian = [&](const Eigen::VectorXd&, Eigen::MatrixXd& j) {
    for (int i = 0; i < 8; ++i) {
      j(i, 0) = 1;
      j(i, 1) = x[i];
    }
  };
  const auto sol = solve_least_squares(p, Eigen::Vector2d(0, 0));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < 8; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double n = 8, det = n * sxx - sx * sx;
  const double b = (n * sxy - sx * sy) / det, a = (sy - b * sx) / n;
  EXPECT_NEAR(sol.x[0], a, 1e-10);
  EXPECT_NEAR(sol.x[1], b, 1e-10);
  double ss = 0;
  for (int i = 0; i < 8; ++i) ss += std::pow(a + b * x[i] - y[i], 2);
  const double s2 = ss / (n - 2);
  EXPECT_NEAR(sol.cost, ss, 1e-10);
  EXPECT_NEAR(sol.covariance(1, 1), s2 * n / det, 1e-10);
  EXPECT_NEAR(sol.covariance(0, 0), s2 * sxx / det, 1e-10);
}

TEST(ScanIo, CsvAndJson) {
  ScanResult r;
  r.kind = "hwp_fringe";
  r.param = {0.0, 0.1, 1.0 / 3.0};
  r.rate = {0.5, 0.25, 2.0 / 3.0};
  r.rate_closed_form = {0.5, 0.25, 2.0 / 3.0};
  const std::string csv = to_csv(r);
  EXPECT_EQ(csv, "param,rate,rate_closed_form\n0,0.5,0.5\n0.1,0.25,0.25\n0.333333333,0.666666667,0.666666667\n");
  const ScanResult back = scan_from_csv(csv);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_NEAR(back.rate[2], 2.0 / 3.0, 1e-9);
  EXPECT_EQ(to_csv(back), csv);
  EXPECT_THROW(scan_from_csv("x,y\n1,2\n"), IoError);
  EXPECT_THROW(scan_from_csv("param,rate,rate_closed_form\n1,abc,2\n"), IoError);

  r.summary["visibility_closed_form"] = 0.97;
  VisibilityFit f;
  f.model = FitModel::cos4;
  f.visibility = 0.97;
  r.fit = f;
  const auto j = to_json(r);
  EXPECT_EQ(j["fit"]["model"], "cos4");
  EXPECT_DOUBLE_EQ(j["summary"]["visibility_closed_form"].get<double>(), 0.97);
  EXPECT_EQ(j["rate"].size(), 3u);
  EXPECT_EQ(fit_model_from_string("cos4_power"), FitModel::cos4_power);
  EXPECT_THROW(fit_model_from_string("gauss"), ValidationError);
}
