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

// Two-qubit polarization tomography: projective-count simulation, linear inversion and
// maximum-likelihood reconstruction, and parametric-bootstrap error bars.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "polchip/elements.hpp"
#include "polchip/entanglement.hpp"
#include "polchip/parallel.hpp"

namespace polchip {

/// Product projector |a_c> (x) |a_d> onto the polarizations analysed on modes C and D.
struct MeasurementSetting {
  PolarizationQubit analyzer_c;
  PolarizationQubit analyzer_d;
  /// Optional letter pair such as "HV" for reporting; empty for arbitrary directions.
  std::string label;

  Vector4c projector() const { return TwoQubitPureState::product(analyzer_c, analyzer_d).amplitudes(); }
};

inline MeasurementSetting make_setting(std::string_view c, std::string_view d) {
  return {PolarizationQubit::from_letter(c), PolarizationQubit::from_letter(d), std::string(c) + std::string(d)};
}

struct CountRecord {
  MeasurementSetting setting;
  /// Non-negative. Poisson-simulated and measured data are integral; noiseless simulations
  /// store the exact expectation.
  double counts = 0.0;
  double integration_time = 1.0;
};

/// The 16 product settings of the standard two-qubit tomography scheme over {H, V, D, L}.
inline std::vector<MeasurementSetting> standard_settings() {
  static constexpr const char* kPairs[16][2] = {{"H", "H"}, {"H", "V"}, {"V", "V"}, {"V", "H"},
                                                {"L", "H"}, {"L", "V"}, {"D", "V"}, {"D", "H"},
                                                {"D", "L"}, {"D", "D"}, {"L", "D"}, {"H", "D"},
                                                {"V", "D"}, {"V", "L"}, {"H", "L"}, {"L", "L"}};
  std::vector<MeasurementSetting> out;
  out.reserve(16);
  for (const auto& p : kPairs) out.push_back(make_setting(p[0], p[1]));
  return out;
}

// ---------------------------------------------------------------------------
// Analyzer optics. Each analysis arm is QWP -> HWP -> PBS transmitting H, so the analysed
// direction is (J_hwp J_qwp)^dagger |H>. Angles are from the vertical, as for the source plates.

struct AnalyzerAngles {
  double hwp = 0.0;
  double qwp = 0.0;
};

inline AnalyzerAngles analyzer_angles(std::string_view letter) {
  constexpr double d = std::numbers::pi / 180.0;
  if (letter == "H") return {0.0, 0.0};
  if (letter == "V") return {45.0 * d, 0.0};
  if (letter == "D" || letter == "P") return {22.5 * d, 45.0 * d};
  if (letter == "A" || letter == "M") return {67.5 * d, 45.0 * d};
  if (letter == "L") return {0.0, 135.0 * d};
  if (letter == "R") return {0.0, 45.0 * d};
  throw ValidationError("unknown analyzer setting '" + std::string(letter) + "'");
}

/// Direction actually analysed when both plates carry a systematic angle offset.
inline PolarizationQubit analyzer_direction(const AnalyzerAngles& a, double angle_error = 0.0) {
  const Matrix2c j = waveplate_jones(WaveplateSpec::half(a.hwp + angle_error)) *
                     waveplate_jones(WaveplateSpec::quarter(a.qwp + angle_error));
  return PolarizationQubit(j.adjoint() * Vector2c(1.0, 0.0));
}

/// Settings as realised by analyzers whose waveplates are off by `error_c` on the C arm and
/// `error_d` on the D arm. Labels must be letter pairs.
inline std::vector<MeasurementSetting> perturbed_settings(std::span<const MeasurementSetting> nominal, double error_c,
                                                          double error_d) {
  std::vector<MeasurementSetting> out;
  out.reserve(nominal.size());
  for (const auto& s : nominal) {
    if (s.label.size() != 2) throw ValidationError("perturbed_settings: setting without letter label");
    out.push_back({analyzer_direction(analyzer_angles(s.label.substr(0, 1)), error_c),
                   analyzer_direction(analyzer_angles(s.label.substr(1, 1)), error_d), s.label});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Forward model

struct CountNoise {
  enum class Kind { none, poisson } kind = Kind::none;
  std::uint64_t seed = 0;

  static CountNoise none() { return {}; }
  static CountNoise poisson(std::uint64_t seed) { return {Kind::poisson, seed}; }
};

inline double projection_probability(const Matrix4c& rho, const Vector4c& proj) {
  return std::max(0.0, proj.dot(rho * proj).real());
}

/// Expected count for each setting is n_per_setting <proj|rho|proj>. `actual` optionally gives the
/// directions physically realised (e.g. with analyzer errors); the records carry the nominal ones.
inline std::vector<CountRecord> simulate_counts(const DensityMatrix4& rho, std::span<const MeasurementSetting> settings,
                                                double n_per_setting, CountNoise noise = CountNoise::none(),
                                                std::span<const MeasurementSetting> actual = {}) {
  if (!(n_per_setting > 0.0)) throw ValidationError("simulate_counts: n_per_setting must be positive");
  if (!actual.empty() && actual.size() != settings.size()) {
    throw ValidationError("simulate_counts: actual settings differ in length");
  }
  std::mt19937_64 rng(noise.seed);
  std::vector<CountRecord> out;
  out.reserve(settings.size());
  for (std::size_t i = 0; i < settings.size(); ++i) {
    const auto& real = actual.empty() ? settings[i] : actual[i];
    const double mean = n_per_setting * projection_probability(rho.matrix(), real.projector());
    double c = mean;
    if (noise.kind == CountNoise::Kind::poisson) {
      c = mean > 0.0 ? static_cast<double>(std::poisson_distribution<std::int64_t>(mean)(rng)) : 0.0;
    }
    out.push_back({settings[i], c, 1.0});
  }
  return out;
}

namespace detail {

inline void check_records(std::span<const CountRecord> records) {
  double total = 0.0;
  for (const auto& r : records) {
    if (!(r.counts >= 0.0) || !std::isfinite(r.counts)) throw ValidationError("count record with negative or non-finite counts");
    if (!(r.integration_time > 0.0)) throw ValidationError("count record with non-positive integration time");
    total += r.counts;
  }
  if (!(total > 0.0)) throw NumericalError("all counts are zero: likelihood is degenerate");
}

inline Matrix2c pauli(int a) {
  Matrix2c s = Matrix2c::Zero();
  switch (a) {
    case 0: s(0, 0) = 1.0; s(1, 1) = 1.0; break;
    case 1: s(0, 1) = 1.0; s(1, 0) = 1.0; break;
    case 2: s(0, 1) = -kI; s(1, 0) = kI; break;
    default: s(0, 0) = 1.0; s(1, 1) = -1.0; break;
  }
  return s;
}

inline Matrix4c kron(const Matrix2c& a, const Matrix2c& b) {
  Matrix4c k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) k(2 * i + p, 2 * j + q) = a(i, j) * b(p, q);
  return k;
}

}  // namespace detail

/// Linear inversion in the Pauli-product basis. Result is Hermitian with unit trace but may have
/// negative eigenvalues. Throws NumericalError when the settings do not span the operator space.
inline Matrix4c reconstruct_linear(std::span<const CountRecord> records) {
  detail::check_records(records);
  const int m = static_cast<int>(records.size());
  if (m < 16) throw NumericalError("reconstruct_linear: need at least 16 settings");
  std::array<Matrix4c, 16> basis;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) basis[4 * a + b] = detail::kron(detail::pauli(a), detail::pauli(b));
  Eigen::MatrixXd design(m, 16);
  Eigen::VectorXd rates(m);
  for (int j = 0; j < m; ++j) {
    const Vector4c v = records[j].setting.projector();
    for (int k = 0; k < 16; ++k) design(j, k) = v.dot(basis[k] * v).real();
    rates[j] = records[j].counts / records[j].integration_time;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < 16) throw NumericalError("reconstruct_linear: singular design matrix (settings are not tomographically complete)");
  const Eigen::VectorXd x = qr.solve(rates);
  Matrix4c rho = Matrix4c::Zero();
  for (int k = 0; k < 16; ++k) rho += x[k] * basis[k];
  const double tr = rho.trace().real();
  if (!(std::abs(tr) > 1e-300)) throw NumericalError("reconstruct_linear: zero trace");
  rho /= tr;
  return 0.5 * (rho + rho.adjoint());
}

/// Nearest-in-spectrum physical state: negative eigenvalues set to zero, then renormalized.
inline DensityMatrix4 clip_to_physical(const Matrix4c& m) {
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(0.5 * (m + m.adjoint()));
  Eigen::Vector4d ev = es.eigenvalues().cwiseMax(0.0);
  if (!(ev.sum() > 0.0)) return DensityMatrix4::maximally_mixed();
  ev /= ev.sum();
  return DensityMatrix4(es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint());
}

/// Poisson log-likelihood of the records under rho with the overall rate profiled out,
/// up to a rho-independent constant. -inf if rho assigns zero probability to an observed count.
inline double log_likelihood(std::span<const CountRecord> records, const DensityMatrix4& rho) {
  detail::check_records(records);
  double total = 0.0;
  double lam_sum = 0.0;
  for (const auto& r : records) {
    total += r.counts;
    lam_sum += r.integration_time * projection_probability(rho.matrix(), r.setting.projector());
  }
  double ll = 0.0;
  for (const auto& r : records) {
    if (r.counts == 0.0) continue;
    const double lam = r.integration_time * projection_probability(rho.matrix(), r.setting.projector()) / lam_sum;
    if (!(lam > 0.0)) return -std::numeric_limits<double>::infinity();
    ll += r.counts / total * std::log(lam);
  }
  return ll;
}

// ---------------------------------------------------------------------------
// Maximum likelihood

struct MleOptions {
  double gradient_tolerance = 1e-8;
  int max_iterations = 10000;
};

struct MleResult {
  DensityMatrix4 rho;
  int iterations = 0;
  double gradient_norm = 0.0;
  double objective = 0.0;
};

/// Raised when the optimizer stops without meeting the gradient criterion.
class MleError : public NumericalError {
 public:
  MleError(const std::string& what, MleResult best) : NumericalError(what), best_(std::move(best)) {}
  const MleResult& best_iterate() const { return best_; }

 private:
  MleResult best_;
};

namespace detail {

// T is lower triangular: 4 real diagonal entries then 6 complex sub-diagonal entries.
inline Matrix4c unpack_t(const Eigen::Matrix<double, 16, 1>& x) {
  Matrix4c t = Matrix4c::Zero();
  int k = 4;
  for (int i = 0; i < 4; ++i) {
    t(i, i) = x[i];
    for (int j = 0; j < i; ++j) {
      t(i, j) = Complex(x[k], x[k + 1]);
      k += 2;
    }
  }
  return t;
}

inline Eigen::Matrix<double, 16, 1> pack_t(const Matrix4c& t) {
  Eigen::Matrix<double, 16, 1> x;
  int k = 4;
  for (int i = 0; i < 4; ++i) {
    x[i] = t(i, i).real();
    for (int j = 0; j < i; ++j) {
      x[k] = t(i, j).real();
      x[k + 1] = t(i, j).imag();
      k += 2;
    }
  }
  return x;
}

// Lower-triangular T with T^dagger T = m, via Cholesky of the index-reversed matrix.
inline Matrix4c reverse_cholesky(const Matrix4c& m) {
  Matrix4c j = Matrix4c::Zero();
  for (int i = 0; i < 4; ++i) j(i, 3 - i) = 1.0;
  Eigen::LLT<Matrix4c> llt(j * m * j);
  if (llt.info() != Eigen::Success) throw NumericalError("MLE start is not positive definite");
  const Matrix4c l = llt.matrixL();
  Matrix4c u = j * l * j;  // upper triangular, m = u u^dagger
  Matrix4c t = u.adjoint();
  // Gauge the diagonal to be real and non-negative.
  for (int i = 0; i < 4; ++i) {
    const double a = std::abs(t(i, i));
    if (a > 0.0) t.row(i) *= std::conj(t(i, i)) / a;
  }
  return t;
}

struct MleObjective {
  std::vector<Vector4c> proj;
  std::vector<double> weight;  // n_j / sum n
  std::vector<double> tau;

  // Negative normalized log-likelihood; fills the gradient when asked.
  double value(const Eigen::Matrix<double, 16, 1>& x, Eigen::Matrix<double, 16, 1>* grad) const {
    const Matrix4c t = unpack_t(x);
    double f = 0.0;
    Matrix4c g = Matrix4c::Zero();
    for (std::size_t j = 0; j < proj.size(); ++j) {
      const Vector4c tv = t * proj[j];
      const double lam = tau[j] * tv.squaredNorm();
      if (weight[j] > 0.0) {
        if (!(lam > 0.0)) return std::numeric_limits<double>::infinity();
        f -= weight[j] * std::log(lam);
      }
      f += lam;
      if (grad) {
        const double c = tau[j] * (weight[j] > 0.0 ? weight[j] / lam : 0.0) - tau[j];
        g += c * tv * proj[j].adjoint();
      }
    }
    if (grad) {
      int k = 4;
      for (int i = 0; i < 4; ++i) {
        (*grad)[i] = -2.0 * g(i, i).real();
        for (int jj = 0; jj < i; ++jj) {
          (*grad)[k] = -2.0 * g(i, jj).real();
          (*grad)[k + 1] = -2.0 * g(i, jj).imag();
          k += 2;
        }
      }
    }
    return f;
  }
};

}  // namespace detail

/// Maximum-likelihood state over rho = T^dagger T / Tr(T^dagger T) with T lower triangular.
/// BFGS on the 16 real parameters of T with Armijo backtracking, starting from the clipped
/// linear-inversion estimate.
inline MleResult reconstruct_mle(std::span<const CountRecord> records, const MleOptions& opt = {}) {
  detail::check_records(records);
  if (records.size() < 16) throw ValidationError("reconstruct_mle: need at least 16 records");

  detail::MleObjective obj;
  double total = 0.0;
  for (const auto& r : records) total += r.counts;
  for (const auto& r : records) {
    obj.proj.push_back(r.setting.projector());
    obj.weight.push_back(r.counts / total);
    obj.tau.push_back(r.integration_time);
  }

  Matrix4c start;
  try {
    start = clip_to_physical(reconstruct_linear(records)).matrix();
  } catch (const NumericalError&) {
    start = Matrix4c::Identity() / 4.0;
  }
  start = 0.9 * start + 0.1 * Matrix4c::Identity() / 4.0;
  double lam_sum = 0.0;
  for (std::size_t j = 0; j < obj.proj.size(); ++j) lam_sum += obj.tau[j] * projection_probability(start, obj.proj[j]);
  start /= lam_sum;

  using Vec = Eigen::Matrix<double, 16, 1>;
  using Mat = Eigen::Matrix<double, 16, 16>;
  Vec x = detail::pack_t(detail::reverse_cholesky(start));
  Vec g;
  double f = obj.value(x, &g);
  Mat h = Mat::Identity();
  MleResult res;
  int it = 0;
  int stalls = 0;
  for (; it < opt.max_iterations; ++it) {
    if (g.norm() < opt.gradient_tolerance) break;
    Vec dir = -h * g;
    double slope = g.dot(dir);
    if (slope >= 0.0) {
      h = Mat::Identity();
      dir = -g;
      slope = -g.squaredNorm();
    }
    double step = 1.0;
    Vec xn, gn;
    double fn = 0.0;
    bool ok = false;
    for (int ls = 0; ls < 60; ++ls) {
      xn = x + step * dir;
      fn = obj.value(xn, nullptr);
      if (std::isfinite(fn) && fn <= f + 1e-4 * step * slope) {
        ok = true;
        break;
      }
      step *= 0.5;
    }
    if (!ok) {
      // No representable decrease along this direction: restart from steepest descent once.
      if (++stalls > 2) break;
      h = Mat::Identity();
      continue;
    }
    stalls = 0;
    obj.value(xn, &gn);
    const Vec s = xn - x;
    const Vec y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      const double r = 1.0 / sy;
      const Mat i16 = Mat::Identity();
      h = (i16 - r * s * y.transpose()) * h * (i16 - r * y * s.transpose()) + r * s * s.transpose();
    }
    x = xn;
    g = gn;
    f = fn;
  }

  const Matrix4c t = detail::unpack_t(x);
  Matrix4c rho = t.adjoint() * t;
  rho /= rho.trace().real();
  res.rho = DensityMatrix4(0.5 * (rho + rho.adjoint()));
  res.iterations = it;
  res.gradient_norm = g.norm();
  res.objective = f;
  // A stall at machine precision close to the optimum is accepted.
  if (res.gradient_norm >= opt.gradient_tolerance && res.gradient_norm > 1e-6) {
    throw MleError("reconstruct_mle: no convergence after " + std::to_string(it) + " iterations (gradient norm " +
                       std::to_string(res.gradient_norm) + ")",
                   res);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Metrics and bootstrap

struct TomographyMetrics {
  double linear_entropy = 0.0;
  double concurrence = 0.0;
  double fidelity_singlet = 0.0;
};

inline TomographyMetrics compute_metrics(const DensityMatrix4& rho) {
  return {linear_entropy(rho), concurrence(rho), fidelity_pure(rho, bell_state(BellLabel::psi_minus))};
}

struct MetricUncertainties {
  double linear_entropy = 0.0;
  double concurrence = 0.0;
  double fidelity_singlet = 0.0;
  int resamples = 0;
};

/// Parametric bootstrap: counts are redrawn from Poisson distributions with the means predicted by
/// the MLE state, re-reconstructed, and the per-metric standard deviation reported. Resample i
/// draws from its own generator seeded with (seed, i), so results do not depend on `workers`.
inline MetricUncertainties bootstrap_metrics(std::span<const CountRecord> records, int n_resamples, std::uint64_t seed,
                                             unsigned workers = 1, const MleOptions& opt = {}) {
  if (n_resamples < 100) throw ValidationError("bootstrap_metrics: need at least 100 resamples");
  const MleResult fit = reconstruct_mle(records, opt);
  double total = 0.0;
  double lam_sum = 0.0;
  for (const auto& r : records) {
    total += r.counts;
    lam_sum += r.integration_time * projection_probability(fit.rho.matrix(), r.setting.projector());
  }
  std::vector<double> means;
  for (const auto& r : records) {
    means.push_back(total * r.integration_time * projection_probability(fit.rho.matrix(), r.setting.projector()) / lam_sum);
  }
  const std::vector<CountRecord> base(records.begin(), records.end());
  const auto samples = parallel_map(static_cast<std::size_t>(n_resamples), workers, [&](std::size_t i) {
    std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(ss);
    std::vector<CountRecord> resampled = base;
    for (std::size_t j = 0; j < resampled.size(); ++j) {
      resampled[j].counts =
          means[j] > 0.0 ? static_cast<double>(std::poisson_distribution<std::int64_t>(means[j])(rng)) : 0.0;
    }
    try {
      return compute_metrics(reconstruct_mle(resampled, opt).rho);
    } catch (const NumericalError& e) {
      throw NumericalError("bootstrap resample " + std::to_string(i) + ": " + e.what());
    }
  });
  auto sd = [&](auto field) {
    double mean = 0.0;
    for (const auto& s : samples) mean += s.*field;
    mean /= static_cast<double>(samples.size());
    double var = 0.0;
    for (const auto& s : samples) var += (s.*field - mean) * (s.*field - mean);
    return std::sqrt(var / static_cast<double>(samples.size() - 1));
  };
  return {sd(&TomographyMetrics::linear_entropy), sd(&TomographyMetrics::concurrence),
          sd(&TomographyMetrics::fidelity_singlet), n_resamples};
}

struct TomographyResult {
  Matrix4c rho_linear;
  DensityMatrix4 rho_mle;
  TomographyMetrics metrics;
  std::optional<MetricUncertainties> uncertainties;
  MleResult mle_diagnostics;
};

inline TomographyResult run_tomography(std::span<const CountRecord> records, int bootstrap_resamples = 0,
                                       std::uint64_t bootstrap_seed = 0, unsigned workers = 1) {
  TomographyResult out;
  out.rho_linear = reconstruct_linear(records);
  out.mle_diagnostics = reconstruct_mle(records);
  out.rho_mle = out.mle_diagnostics.rho;
  out.metrics = compute_metrics(out.rho_mle);
  if (bootstrap_resamples > 0) out.uncertainties = bootstrap_metrics(records, bootstrap_resamples, bootstrap_seed, workers);
  return out;
}

// ---------------------------------------------------------------------------
// I/O

/// Reads `setting_c,setting_d,counts,seconds` with settings in {H,V,D,A,L,R}.
inline std::vector<CountRecord> records_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line.rfind("setting_c,setting_d,counts", 0) != 0) {
    throw IoError("count CSV: expected header setting_c,setting_d,counts,seconds");
  }
  std::vector<CountRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string c, d, n, s;
    std::getline(ls, c, ',');
    std::getline(ls, d, ',');
    std::getline(ls, n, ',');
    std::getline(ls, s, ',');
    CountRecord r;
    try {
      r.setting = make_setting(c, d);
      r.counts = std::stod(n);
      r.integration_time = s.empty() ? 1.0 : std::stod(s);
    } catch (const ValidationError& e) {
      throw IoError("count CSV line " + std::to_string(lineno) + ": " + e.what());
    } catch (const std::exception&) {
      throw IoError("count CSV line " + std::to_string(lineno) + ": bad number");
    }
    if (r.counts < 0.0 || r.integration_time <= 0.0) throw IoError("count CSV line " + std::to_string(lineno) + ": out of range");
    out.push_back(std::move(r));
  }
  return out;
}

inline std::string records_to_csv(std::span<const CountRecord> records) {
  std::ostringstream os;
  os << "setting_c,setting_d,counts,seconds\n";
  for (const auto& r : records) {
    if (r.setting.label.size() != 2) throw ValidationError("records_to_csv: setting without letter label");
    char buf[96];
    std::snprintf(buf, sizeof buf, "%c,%c,%.9g,%.9g\n", r.setting.label[0], r.setting.label[1], r.counts,
                  r.integration_time);
    os << buf;
  }
  return os.str();
}

/// Row-major array of [re, im] pairs.
inline nlohmann::ordered_json matrix_to_json(const Matrix4c& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int i = 0; i < 4; ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int j = 0; j < 4; ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

inline nlohmann::ordered_json to_json(const DensityMatrix4& rho) { return matrix_to_json(rho.matrix()); }

inline Matrix4c matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) throw IoError("density matrix JSON: expected 4 rows");
  Matrix4c m;
  for (int i = 0; i < 4; ++i) {
    if (!j[i].is_array() || j[i].size() != 4) throw IoError("density matrix JSON: expected 4 columns");
    for (int k = 0; k < 4; ++k) {
      const auto& e = j[i][k];
      if (!e.is_array() || e.size() != 2) throw IoError("density matrix JSON: entries must be [re, im]");
      m(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

inline DensityMatrix4 density_from_json(const nlohmann::json& j) { return DensityMatrix4(matrix_from_json(j)); }

inline nlohmann::ordered_json to_json(const TomographyResult& r) {
  nlohmann::ordered_json j;
  j["rho_linear"] = matrix_to_json(r.rho_linear);
  j["rho_mle"] = to_json(r.rho_mle);
  nlohmann::ordered_json m;
  m["S_L"] = r.metrics.linear_entropy;
  m["C"] = r.metrics.concurrence;
  m["F_singlet"] = r.metrics.fidelity_singlet;
  j["metrics"] = m;
  if (r.uncertainties) {
    nlohmann::ordered_json u;
    u["S_L"] = r.uncertainties->linear_entropy;
    u["C"] = r.uncertainties->concurrence;
    u["F_singlet"] = r.uncertainties->fidelity_singlet;
    u["resamples"] = r.uncertainties->resamples;
    j["uncertainties"] = u;
  } else {
    j["uncertainties"] = nullptr;
  }
  j["mle"] = {{"iterations", r.mle_diagnostics.iterations}, {"gradient_norm", r.mle_diagnostics.gradient_norm}};
  return j;
}

}  // namespace polchip
