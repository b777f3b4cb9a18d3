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

// Classical polarimetry of a waveguide modelled as a uniaxial linear retarder: Mueller matrix,
// Stokes propagation, (delta, theta) fits from six-state input/output data, and recovery of the
// birefringence from retardances measured at several lengths.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "polchip/errors.hpp"
#include "polchip/least_squares.hpp"

namespace polchip {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct StokesVector {
  double s0 = 1.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;

  Eigen::Vector4d vec() const { return {s0, s1, s2, s3}; }
  static StokesVector from(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }

  /// s1^2 + s2^2 + s3^2 <= s0^2 (+1e-9)
  bool is_physical() const { return s0 >= 0.0 && s1 * s1 + s2 * s2 + s3 * s3 <= s0 * s0 + 1e-9; }
};

/// The six cardinal input/analysis states. s3 = +1 for L = (H + iV)/sqrt2.
enum class Eigenstate : int { H = 0, V, P, M, L, R };
inline constexpr std::array<Eigenstate, 6> kEigenstates = {Eigenstate::H, Eigenstate::V, Eigenstate::P,
                                                           Eigenstate::M, Eigenstate::L, Eigenstate::R};

inline StokesVector stokes_of(Eigenstate e) {
  switch (e) {
    case Eigenstate::H: return {1, 1, 0, 0};
    case Eigenstate::V: return {1, -1, 0, 0};
    case Eigenstate::P: return {1, 0, 1, 0};
    case Eigenstate::M: return {1, 0, -1, 0};
    case Eigenstate::L: return {1, 0, 0, 1};
    case Eigenstate::R: return {1, 0, 0, -1};
  }
  return {};
}

inline Eigenstate eigenstate_from_string(std::string_view s) {
  if (s == "H") return Eigenstate::H;
  if (s == "V") return Eigenstate::V;
  if (s == "P" || s == "+" || s == "D") return Eigenstate::P;
  if (s == "M" || s == "-" || s == "A") return Eigenstate::M;
  if (s == "L") return Eigenstate::L;
  if (s == "R") return Eigenstate::R;
  throw ValidationError("unknown polarization eigenstate '" + std::string(s) + "'");
}

inline std::string_view to_string(Eigenstate e) {
  static constexpr std::string_view names[] = {"H", "V", "P", "M", "L", "R"};
  return names[static_cast<int>(e)];
}

/// sqrt(s1^2 + s2^2 + s3^2) / s0
inline double degree_of_polarization(const StokesVector& s) {
  if (!(s.s0 > 0.0)) throw ValidationError("degree_of_polarization: s0 must be positive");
  return std::sqrt(s.s1 * s.s1 + s.s2 * s.s2 + s.s3 * s.s3) / s.s0;
}

struct MuellerMatrix {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();

  double operator()(int r, int c) const { return m(r, c); }

  /// First row and column are (1,0,0,0) and the 3x3 block is a proper rotation.
  bool is_pure_retarder(double tol = 1e-9) const {
    for (int i = 1; i < 4; ++i)
      if (std::abs(m(0, i)) > tol || std::abs(m(i, 0)) > tol) return false;
    if (std::abs(m(0, 0) - 1.0) > tol) return false;
    const Eigen::Matrix3d r = m.block<3, 3>(1, 1);
    return (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= tol &&
           std::abs(r.determinant() - 1.0) <= tol;
  }
};

/// Retardance delta between the eigenpolarizations and optical-axis angle theta.
struct RetarderParams {
  double delta = 0.0;
  double theta = 0.0;

  /// (delta, theta + pi/2) describes the same element as (-delta, theta). Maps onto
  /// delta in [0, 2pi), theta in [0, pi/2).
  RetarderParams canonical() const {
    const double half = std::numbers::pi / 2.0;
    double t = std::fmod(theta, std::numbers::pi);
    if (t < 0.0) t += std::numbers::pi;  // may round up to exactly pi
    double d = delta;
    // each quarter turn of the axis flips the sign of delta
    while (t >= half) {
      t -= half;
      d = -d;
    }
    d = std::fmod(d, kTwoPi);
    if (d < 0.0) d += kTwoPi;
    if (d >= kTwoPi) d -= kTwoPi;
    return {d, t};
  }
};

inline MuellerMatrix retarder_mueller(const RetarderParams& p) {
  const double c = std::cos(2.0 * p.theta);
  const double s = std::sin(2.0 * p.theta);
  const double cd = std::cos(p.delta);
  const double sd = std::sin(p.delta);
  MuellerMatrix out;
  out.m << 1, 0, 0, 0,
           0, c * c + s * s * cd, s * c * (1 - cd), -s * sd,
           0, s * c * (1 - cd), s * s + c * c * cd, c * sd,
           0, s * sd, -c * sd, cd;
  return out;
}

namespace detail {

// d/d(delta) and d/d(theta) of the lower-right 3x3 block.
inline void retarder_block_derivatives(const RetarderParams& p, Eigen::Matrix3d& d_delta, Eigen::Matrix3d& d_theta) {
  const double c = std::cos(2.0 * p.theta);
  const double s = std::sin(2.0 * p.theta);
  const double cd = std::cos(p.delta);
  const double sd = std::sin(p.delta);
  d_delta << -s * s * sd, s * c * sd, -s * cd,
             s * c * sd, -c * c * sd, c * cd,
             s * cd, -c * cd, -sd;
  d_theta << -4 * s * c * (1 - cd), 2 * (c * c - s * s) * (1 - cd), -2 * c * sd,
             2 * (c * c - s * s) * (1 - cd), 4 * s * c * (1 - cd), -2 * s * sd,
             2 * c * sd, 2 * s * sd, 0;
}

}  // namespace detail

inline StokesVector propagate_stokes(const MuellerMatrix& m, const StokesVector& s) {
  return StokesVector::from(m.m * s.vec());
}

// ---------------------------------------------------------------------------
// Six-state measurements

/// intensity[input][projection], both indexed by Eigenstate.
struct RetarderMeasurement {
  std::array<std::array<double, 6>, 6> intensity{};
  std::array<bool, 6> present{};
};

/// s1 = (I_H - I_V)/(I_H + I_V), s2 = (I_P - I_M)/(I_P + I_M), s3 = (I_L - I_R)/(I_L + I_R).
inline StokesVector stokes_from_projections(const std::array<double, 6>& i) {
  auto ratio = [](double a, double b) {
    if (!(a + b > 0.0)) throw ValidationError("projection pair with zero total intensity");
    return (a - b) / (a + b);
  };
  return {1.0, ratio(i[0], i[1]), ratio(i[2], i[3]), ratio(i[4], i[5])};
}

/// Noiseless intensities I = (1 + s_out . s_proj)/2 for every input/projection pair.
inline RetarderMeasurement simulate_retarder_measurement(const RetarderParams& p) {
  const MuellerMatrix m = retarder_mueller(p);
  RetarderMeasurement out;
  for (Eigenstate in : kEigenstates) {
    const Eigen::Vector4d so = m.m * stokes_of(in).vec();
    for (Eigenstate pr : kEigenstates) {
      const Eigen::Vector4d sp = stokes_of(pr).vec();
      out.intensity[static_cast<int>(in)][static_cast<int>(pr)] = 0.5 * (so[0] + so.tail<3>().dot(sp.tail<3>()));
    }
    out.present[static_cast<int>(in)] = true;
  }
  return out;
}

struct StokesPair {
  StokesVector input;
  StokesVector output;
};

struct RetarderFitOptions {
  int grid = 16;
  /// RMS Stokes residual above which the retarder model is flagged as violated.
  double max_rms = 0.05;
  /// |sin(delta/2)| below this leaves theta unidentifiable.
  double identity_threshold = 1e-3;
};

struct RetarderFit {
  RetarderParams params;
  double rms_residual = 0.0;
  bool theta_determined = true;
  bool model_violation = false;
};

/// Multi-start Levenberg-Marquardt over a grid x grid set of initial (delta, theta), keeping the
/// lowest residual. Residuals are the s1..s3 differences between predicted and measured output.
inline RetarderFit fit_retarder(std::span<const StokesPair> pairs, const RetarderFitOptions& opt = {}) {
  if (pairs.size() < 2) throw ValidationError("fit_retarder: need at least two input states");
  const int m = static_cast<int>(pairs.size()) * 3;
  LeastSquaresProblem prob;
  prob.n_params = 2;
  prob.n_residuals = m;
  prob.residuals = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    const MuellerMatrix mm = retarder_mueller({x[0], x[1]});
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const Eigen::Vector4d pred = mm.m * pairs[k].input.vec();
      const Eigen::Vector4d meas = pairs[k].output.vec();
      for (int c = 0; c < 3; ++c) r[3 * k + c] = pred[c + 1] - meas[c + 1];
    }
  };
  prob.jacobian = [&](const Eigen::VectorXd& x, Eigen::MatrixXd& j) {
    Eigen::Matrix3d dd, dt;
    detail::retarder_block_derivatives({x[0], x[1]}, dd, dt);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const Eigen::Vector3d s_in = pairs[k].input.vec().tail<3>();
      j.block<3, 1>(3 * k, 0) = dd * s_in;
      j.block<3, 1>(3 * k, 1) = dt * s_in;
    }
  };

  RetarderFit best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int a = 0; a < opt.grid; ++a) {
    for (int b = 0; b < opt.grid; ++b) {
      Eigen::VectorXd x0(2);
      x0 << kTwoPi * (a + 0.5) / opt.grid, std::numbers::pi / 2.0 * (b + 0.5) / opt.grid;
      const LeastSquaresSolution sol = solve_least_squares(prob, x0, 1e-15, 400);
      if (sol.cost < best_cost) {
        best_cost = sol.cost;
        best.params = RetarderParams{sol.x[0], sol.x[1]}.canonical();
      }
    }
  }
  if (kTwoPi - best.params.delta < 1e-9) best.params.delta = 0.0;
  best.rms_residual = std::sqrt(best_cost / m);
  best.theta_determined = std::abs(std::sin(best.params.delta / 2.0)) >= opt.identity_threshold;
  best.model_violation = best.rms_residual > opt.max_rms;
  return best;
}

/// Converts the six-by-six projection data to Stokes pairs and fits. All six inputs are required.
inline RetarderFit fit_retarder(const RetarderMeasurement& meas, const RetarderFitOptions& opt = {}) {
  std::vector<StokesPair> pairs;
  for (Eigenstate in : kEigenstates) {
    if (!meas.present[static_cast<int>(in)]) {
      throw ValidationError("fit_retarder: input state " + std::string(to_string(in)) + " missing");
    }
    pairs.push_back({stokes_of(in), stokes_from_projections(meas.intensity[static_cast<int>(in)])});
  }
  return fit_retarder(pairs, opt);
}

// ---------------------------------------------------------------------------
// Multi-length order disambiguation

struct LengthSample {
  double length_mm = 0.0;
  double delta = 0.0;  // wrapped retardance, radians
  double theta = 0.0;
};

/// Total retardance 2 pi B L / lambda.
inline double total_retardance(double b, double length_mm, double wavelength_nm) {
  return kTwoPi * b * (length_mm * 1e-3) / (wavelength_nm * 1e-9);
}

inline double wrap_phase(double x) {
  double w = std::fmod(x, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w;
}

/// Re-expresses a retarder so its axis lies within pi/4 of `axis` (mod pi), using the
/// (delta, theta + pi/2) ~ (-delta, theta) symmetry. A length series must share one axis
/// before the retardances can be compared.
inline RetarderParams align_axis(const RetarderParams& p, double axis = 0.0) {
  const double half = std::numbers::pi / 2.0;
  double t = std::remainder(p.theta - axis, std::numbers::pi);  // (-pi/2, pi/2]
  double d = p.delta;
  if (t > half / 2.0) {
    t -= half;
    d = -d;
  } else if (t <= -half / 2.0) {
    t += half;
    d = -d;
  }
  return {wrap_phase(d), axis + t};
}

struct BirefringenceOptions {
  int max_order = 64;
  /// RMS phase residual (rad) above which no order assignment is considered consistent.
  double max_rms = 0.05;
};

struct BirefringenceFit {
  double b = 0.0;
  std::vector<int> orders;
  double rms_residual = 0.0;
  /// Number of order assignments fitting as well as the reported one (commensurate lengths
  /// cannot separate B from B + lambda / gcd(L)); the smallest such B is reported.
  int equivalent_solutions = 1;
};

/// Finds integer orders m_i and B minimising sum (delta_i + 2 pi m_i - 2 pi B L_i / lambda)^2.
/// Every order of the longest sample in [0, max_order] is tried; the other orders follow by
/// rounding, then B is refit by linear least squares and the orders re-rounded once.
inline BirefringenceFit fit_birefringence(std::span<const LengthSample> series, double wavelength_nm,
                                          const BirefringenceOptions& opt = {}) {
  if (series.size() < 2) throw ValidationError("fit_birefringence: need at least two lengths (one length is ambiguous)");
  if (!(wavelength_nm > 0.0)) throw ValidationError("fit_birefringence: wavelength must be positive");
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!(series[i].length_mm > 0.0)) throw ValidationError("fit_birefringence: lengths must be positive");
    for (std::size_t j = 0; j < i; ++j)
      if (series[i].length_mm == series[j].length_mm) throw ValidationError("fit_birefringence: lengths must be distinct");
  }
  const std::size_t n = series.size();
  std::size_t ref = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (series[i].length_mm > series[ref].length_mm) ref = i;

  // Work with k = 2 pi B / lambda in rad/mm.
  auto assign = [&](double k, std::vector<int>& m) {
    for (std::size_t i = 0; i < n; ++i) {
      const long r = std::lround((k * series[i].length_mm - series[i].delta) / kTwoPi);
      m[i] = static_cast<int>(std::clamp<long>(r, 0, opt.max_order));
    }
  };
  auto refit = [&](const std::vector<int>& m) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num += series[i].length_mm * (series[i].delta + kTwoPi * m[i]);
      den += series[i].length_mm * series[i].length_mm;
    }
    return num / den;
  };
  auto rms = [&](double k, const std::vector<int>& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = series[i].delta + kTwoPi * m[i] - k * series[i].length_mm;
      s += r * r;
    }
    return std::sqrt(s / static_cast<double>(n));
  };

  BirefringenceFit best;
  double best_k = 0.0;
  double best_rms = std::numeric_limits<double>::infinity();
  int ties = 0;
  std::vector<int> m(n);
  for (int mr = 0; mr <= opt.max_order; ++mr) {
    double k = (series[ref].delta + kTwoPi * mr) / series[ref].length_mm;
    assign(k, m);
    k = refit(m);
    assign(k, m);
    k = refit(m);
    const double r = rms(k, m);
    if (r < best_rms - 1e-9) {
      best_rms = r;
      best_k = k;
      best.orders = m;
      ties = 1;
    } else if (r <= best_rms + 1e-9) {
      ++ties;
      if (k < best_k) {
        best_k = k;
        best.orders = m;
        best_rms = std::min(best_rms, r);
      }
    }
  }
  if (best_rms > opt.max_rms) {
    throw NumericalError("fit_birefringence: inconsistent series (best RMS residual " + std::to_string(best_rms) + " rad)");
  }
  best.b = best_k * (wavelength_nm * 1e-9) / (kTwoPi * 1e-3);
  best.rms_residual = best_rms;
  best.equivalent_solutions = ties;
  return best;
}

// ---------------------------------------------------------------------------
// I/O

/// Reads `input_state,projection,intensity` with states in {H,V,P,M,L,R}.
inline RetarderMeasurement measurement_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line.rfind("input_state,projection,intensity", 0) != 0) {
    throw IoError("measurement CSV: expected header input_state,projection,intensity");
  }
  RetarderMeasurement out;
  std::array<std::array<bool, 6>, 6> seen{};
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string a, b, c;
    std::getline(ls, a, ',');
    std::getline(ls, b, ',');
    std::getline(ls, c, ',');
    try {
      const int i = static_cast<int>(eigenstate_from_string(a));
      const int j = static_cast<int>(eigenstate_from_string(b));
      const double v = std::stod(c);
      if (!(v >= 0.0)) throw IoError("negative intensity");
      out.intensity[i][j] = v;
      seen[i][j] = true;
    } catch (const std::exception& e) {
      throw IoError("measurement CSV line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  for (int i = 0; i < 6; ++i) {
    bool all = true;
    bool any = false;
    for (int j = 0; j < 6; ++j) {
      all = all && seen[i][j];
      any = any || seen[i][j];
    }
    if (any && !all) throw IoError("measurement CSV: input " + std::string(to_string(kEigenstates[i])) + " lacks some projections");
    out.present[i] = all;
  }
  return out;
}

inline std::string measurement_to_csv(const RetarderMeasurement& meas) {
  std::ostringstream os;
  os << "input_state,projection,intensity\n";
  for (Eigenstate in : kEigenstates) {
    if (!meas.present[static_cast<int>(in)]) continue;
    for (Eigenstate pr : kEigenstates) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", meas.intensity[static_cast<int>(in)][static_cast<int>(pr)]);
      os << to_string(in) << ',' << to_string(pr) << ',' << buf << '\n';
    }
  }
  return os.str();
}

}  // namespace polchip
