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

// Operator models of the optical elements: waveplates and the polarization-dependent
// directional coupler.

#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "polchip/quantum_state.hpp"

namespace polchip {

/// Lossless beam splitter with separate power reflectivities for H and V.
/// Transmissivities are t_p = 1 - r_p.
class CouplerSpec {
 public:
  CouplerSpec() = default;
  CouplerSpec(double r_h, double r_v) : r_h_(r_h), r_v_(r_v) {
    if (!(r_h >= 0.0 && r_h <= 1.0)) throw ValidationError("coupler r_h = " + std::to_string(r_h) + " outside [0,1]");
    if (!(r_v >= 0.0 && r_v <= 1.0)) throw ValidationError("coupler r_v = " + std::to_string(r_v) + " outside [0,1]");
  }

  static CouplerSpec balanced() { return {0.5, 0.5}; }
  /// Reflectivities measured on the fabricated device at 806 nm.
  static CouplerSpec measured_device() { return {0.492, 0.581}; }

  double r_h() const { return r_h_; }
  double r_v() const { return r_v_; }
  double t_h() const { return 1.0 - r_h_; }
  double t_v() const { return 1.0 - r_v_; }
  double r(Polarization p) const { return p == Polarization::H ? r_h_ : r_v_; }
  double t(Polarization p) const { return 1.0 - r(p); }
  double mean_reflectivity() const { return 0.5 * (r_h_ + r_v_); }

 private:
  double r_h_ = 0.5;
  double r_v_ = 0.5;
};

/// Single-photon mode indices. Inputs (A_H, A_V, B_H, B_V), outputs (C_H, C_V, D_H, D_V).
enum class Port : int { first = 0, second = 1 };

constexpr int mode_index(Port port, Polarization p) { return 2 * static_cast<int>(port) + static_cast<int>(p); }

/// Phase convention for the lossless coupler.
/// symmetric_i: A -> sqrt(t) C + i sqrt(r) D,  B -> i sqrt(r) C + sqrt(t) D
/// real_antisymmetric: A -> sqrt(t) C + sqrt(r) D,  B -> -sqrt(r) C + sqrt(t) D
enum class PhaseConvention { symmetric_i, real_antisymmetric };

/// Unitary acting on single-photon creation operators: a+_in(j) -> sum_i U(i, j) a+_out(i).
class ModeTransform {
 public:
  explicit ModeTransform(const Matrix4c& u) : u_(u) {
    const double dev = (u_.adjoint() * u_ - Matrix4c::Identity()).cwiseAbs().maxCoeff();
    if (dev > 1e-10) throw ValidationError("ModeTransform is not unitary (deviation " + std::to_string(dev) + ")");
  }
  const Matrix4c& matrix() const { return u_; }
  Complex operator()(int out, int in) const { return u_(out, in); }

 private:
  Matrix4c u_;
};

inline ModeTransform coupler_transform(const CouplerSpec& spec,
                                       PhaseConvention convention = PhaseConvention::symmetric_i) {
  Matrix4c u = Matrix4c::Zero();
  for (Polarization p : {Polarization::H, Polarization::V}) {
    const double st = std::sqrt(spec.t(p));
    const double sr = std::sqrt(spec.r(p));
    const int a = mode_index(Port::first, p);
    const int b = mode_index(Port::second, p);
    const int c = a;
    const int d = b;
    if (convention == PhaseConvention::symmetric_i) {
      u(c, a) = st;
      u(d, a) = kI * sr;
      u(c, b) = kI * sr;
      u(d, b) = st;
    } else {
      u(c, a) = st;
      u(d, a) = sr;
      u(c, b) = -sr;
      u(d, b) = st;
    }
  }
  return ModeTransform(u);
}

enum class WaveplateKind { half, quarter };

/// Waveplate with optical axis at `theta` radians from the vertical direction.
class WaveplateSpec {
 public:
  WaveplateSpec(WaveplateKind kind, double theta) : kind_(kind) {
    if (!std::isfinite(theta)) throw ValidationError("waveplate angle is not finite");
    theta_ = std::fmod(theta, std::numbers::pi);
    if (theta_ < 0.0) theta_ += std::numbers::pi;
  }
  static WaveplateSpec half(double theta) { return {WaveplateKind::half, theta}; }
  static WaveplateSpec quarter(double theta) { return {WaveplateKind::quarter, theta}; }

  WaveplateKind kind() const { return kind_; }
  double theta() const { return theta_; }
  double retardance() const { return kind_ == WaveplateKind::half ? std::numbers::pi : std::numbers::pi / 2.0; }

 private:
  WaveplateKind kind_;
  double theta_ = 0.0;
};

/// Jones matrix R(-phi) diag(e^{-i G/2}, e^{i G/2}) R(phi) with phi = theta + pi/2 the axis angle
/// measured from horizontal. Determinant is 1 for both plate kinds.
inline Matrix2c waveplate_jones(const WaveplateSpec& spec) {
  const double phi = spec.theta() + std::numbers::pi / 2.0;
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  Matrix2c rot;
  rot << c, s, -s, c;
  const double g = spec.retardance();
  Matrix2c ret = Matrix2c::Zero();
  ret(0, 0) = std::polar(1.0, -g / 2.0);
  ret(1, 1) = std::polar(1.0, g / 2.0);
  return rot.adjoint() * ret * rot;
}

inline bool is_unitary(const Matrix2c& u, double tol = 1e-10) {
  return (u.adjoint() * u - Matrix2c::Identity()).cwiseAbs().maxCoeff() <= tol;
}

/// Applies a single-qubit operation to the photon on the given spatial mode.
inline TwoQubitPureState apply_local(const Matrix2c& element, Port mode, const TwoQubitPureState& state) {
  if (!is_unitary(element, 1e-10)) throw ValidationError("apply_local: element is not unitary");
  const Matrix2c id = Matrix2c::Identity();
  const Matrix2c& first = mode == Port::first ? element : id;
  const Matrix2c& second = mode == Port::second ? element : id;
  Matrix4c k;
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q)
      for (int pp = 0; pp < 2; ++pp)
        for (int qq = 0; qq < 2; ++qq) k(basis_index(p, q), basis_index(pp, qq)) = first(p, pp) * second(q, qq);
  return TwoQubitPureState(k * state.amplitudes());
}

}  // namespace polchip
