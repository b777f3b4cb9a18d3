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

// Two-qubit polarization states.
//
// Basis ordering is (HH, HV, VH, VV). The first tensor factor is the photon on
// spatial mode A at the input (C at the output), the second is B (D).

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <string_view>

#include "polchip/errors.hpp"

namespace polchip {

using Complex = std::complex<double>;
using Vector2c = Eigen::Matrix<Complex, 2, 1>;
using Vector4c = Eigen::Matrix<Complex, 4, 1>;
using Matrix2c = Eigen::Matrix<Complex, 2, 2>;
using Matrix4c = Eigen::Matrix<Complex, 4, 4>;

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr Complex kI{0.0, 1.0};

/// Index of a two-qubit basis state in (HH, HV, VH, VV) ordering.
constexpr int basis_index(int pol_first, int pol_second) { return 2 * pol_first + pol_second; }

enum class Polarization : int { H = 0, V = 1 };

/// Single-photon polarization state over (H, V). Always normalized.
class PolarizationQubit {
 public:
  PolarizationQubit() : amp_(1.0, 0.0) {}

  /// Normalizes the given amplitudes; throws on a zero vector.
  explicit PolarizationQubit(const Vector2c& amplitudes) : amp_(amplitudes) {
    const double n = amp_.norm();
    if (!(n > 1e-15) || !std::isfinite(n)) {
      throw ValidationError("PolarizationQubit: zero or non-finite amplitudes");
    }
    amp_ /= n;
  }
  PolarizationQubit(Complex h, Complex v) : PolarizationQubit(Vector2c(h, v)) {}

  static PolarizationQubit h() { return {1.0, 0.0}; }
  static PolarizationQubit v() { return {0.0, 1.0}; }
  static PolarizationQubit d() { return {kInvSqrt2, kInvSqrt2}; }
  static PolarizationQubit a() { return {kInvSqrt2, -kInvSqrt2}; }
  static PolarizationQubit l() { return {Complex(kInvSqrt2), kI * kInvSqrt2}; }
  static PolarizationQubit r() { return {Complex(kInvSqrt2), -kI * kInvSqrt2}; }

  /// Looks up one of the six cardinal states by letter: H, V, D (alias P or +),
  /// A (alias M or -), L, R.
  static PolarizationQubit from_letter(std::string_view s) {
    if (s == "H") return h();
    if (s == "V") return v();
    if (s == "D" || s == "P" || s == "+") return d();
    if (s == "A" || s == "M" || s == "-") return a();
    if (s == "L") return l();
    if (s == "R") return r();
    throw ValidationError("unknown polarization label '" + std::string(s) + "'");
  }

  const Vector2c& amplitudes() const { return amp_; }
  Complex operator[](int i) const { return amp_[i]; }

 private:
  Vector2c amp_;
};

/// Pure two-photon polarization state. Always normalized.
class TwoQubitPureState {
 public:
  TwoQubitPureState() : amp_(Vector4c::Zero()) { amp_[0] = 1.0; }

  explicit TwoQubitPureState(const Vector4c& amplitudes) : amp_(amplitudes) {
    const double n = amp_.norm();
    if (!(n > 1e-15) || !std::isfinite(n)) {
      throw ValidationError("TwoQubitPureState: zero or non-finite amplitudes");
    }
    amp_ /= n;
  }
  TwoQubitPureState(Complex hh, Complex hv, Complex vh, Complex vv)
      : TwoQubitPureState(Vector4c(hh, hv, vh, vv)) {}

  static TwoQubitPureState product(const PolarizationQubit& first, const PolarizationQubit& second) {
    Vector4c v;
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q) v[basis_index(p, q)] = first[p] * second[q];
    return TwoQubitPureState(v);
  }

  const Vector4c& amplitudes() const { return amp_; }
  Complex operator[](int i) const { return amp_[i]; }
  Complex amplitude(Polarization first, Polarization second) const {
    return amp_[basis_index(static_cast<int>(first), static_cast<int>(second))];
  }

  /// <this|other>
  Complex inner(const TwoQubitPureState& other) const { return amp_.dot(other.amp_); }

 private:
  Vector4c amp_;
};

enum class BellLabel { psi_minus, psi_plus, phi_plus, phi_minus };

inline constexpr std::array<BellLabel, 4> kAllBellLabels = {BellLabel::psi_minus, BellLabel::psi_plus,
                                                            BellLabel::phi_plus, BellLabel::phi_minus};

inline std::string_view to_string(BellLabel b) {
  switch (b) {
    case BellLabel::psi_minus: return "psi_minus";
    case BellLabel::psi_plus: return "psi_plus";
    case BellLabel::phi_plus: return "phi_plus";
    case BellLabel::phi_minus: return "phi_minus";
  }
  return "?";
}

inline TwoQubitPureState bell_state(BellLabel label) {
  switch (label) {
    case BellLabel::psi_minus: return {0.0, kInvSqrt2, -kInvSqrt2, 0.0};
    case BellLabel::psi_plus: return {0.0, kInvSqrt2, kInvSqrt2, 0.0};
    case BellLabel::phi_plus: return {kInvSqrt2, 0.0, 0.0, kInvSqrt2};
    case BellLabel::phi_minus: return {kInvSqrt2, 0.0, 0.0, -kInvSqrt2};
  }
  throw ValidationError("bell_state: bad label");
}

/// (|HV> - i|VH>)/sqrt2
inline TwoQubitPureState psi_i_state() { return {0.0, kInvSqrt2, -kI * kInvSqrt2, 0.0}; }

/// (|HH> + i|VV>)/sqrt2
inline TwoQubitPureState phi_i_state() { return {kInvSqrt2, 0.0, 0.0, kI * kInvSqrt2}; }

/// |<a|b>|^2
inline double overlap_probability(const TwoQubitPureState& a, const TwoQubitPureState& b) {
  return std::norm(a.inner(b));
}

/// True when a and b differ only by a global phase, to within tol on every amplitude.
inline bool equal_up_to_phase(const Vector4c& a, const Vector4c& b, double tol) {
  int k = 0;
  for (int i = 1; i < 4; ++i)
    if (std::abs(b[i]) > std::abs(b[k])) k = i;
  if (std::abs(b[k]) < tol) return a.norm() < tol;
  const Complex phase = a[k] / b[k];
  if (std::abs(std::abs(phase) - 1.0) > tol) return false;
  return (a - phase * b).cwiseAbs().maxCoeff() <= tol;
}

// ---------------------------------------------------------------------------
// Density matrices

namespace detail {

inline void check_density(const Matrix4c& m, double herm_tol = 1e-10, double trace_tol = 1e-10,
                          double eig_floor = -1e-9) {
  if (!m.allFinite()) throw ValidationError("density matrix has non-finite entries");
  const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > herm_tol) throw ValidationError("density matrix is not Hermitian (deviation " + std::to_string(herm) + ")");
  const Complex tr = m.trace();
  if (std::abs(tr - Complex(1.0)) > trace_tol) {
    throw ValidationError("density matrix trace " + std::to_string(tr.real()) + " != 1");
  }
  const Matrix4c h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(h, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < eig_floor) {
    throw ValidationError("density matrix has negative eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
  }
}

}  // namespace detail

/// 4x4 Hermitian, unit-trace, positive semidefinite matrix. Construction validates; eigenvalues
/// down to -1e-9 are accepted and treated as zero by the metric functions.
class DensityMatrix4 {
 public:
  DensityMatrix4() : m_(Matrix4c::Identity() / 4.0) {}

  explicit DensityMatrix4(const Matrix4c& m) : m_(m) {
    detail::check_density(m_);
    m_ = 0.5 * (m_ + m_.adjoint()).eval();
  }

  static DensityMatrix4 from_pure(const TwoQubitPureState& psi) {
    return DensityMatrix4(psi.amplitudes() * psi.amplitudes().adjoint());
  }
  static DensityMatrix4 maximally_mixed() { return DensityMatrix4(); }

  /// p |psi-><psi-| + (1-p) I/4
  static DensityMatrix4 werner(double p) {
    if (p < 0.0 || p > 1.0) throw ValidationError("werner: p outside [0,1]");
    const Vector4c s = bell_state(BellLabel::psi_minus).amplitudes();
    return DensityMatrix4(p * s * s.adjoint() + (1.0 - p) * Matrix4c::Identity() / 4.0);
  }

  const Matrix4c& matrix() const { return m_; }
  Complex operator()(int r, int c) const { return m_(r, c); }

 private:
  Matrix4c m_;
};

/// Trace distance (1/2)||a - b||_1.
inline double trace_distance(const Matrix4c& a, const Matrix4c& b) {
  const Matrix4c d = a - b;
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline double trace_distance(const DensityMatrix4& a, const DensityMatrix4& b) {
  return trace_distance(a.matrix(), b.matrix());
}

}  // namespace polchip
