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

// Purity and entanglement metrics of two-qubit density matrices.

#pragma once

#include <algorithm>
#include <functional>

#include "polchip/quantum_state.hpp"

namespace polchip {

namespace detail {

inline constexpr double kMetricSlack = 1e-9;

// Values within kMetricSlack outside [0,1] are clamped; anything further out is a bug upstream.
inline double clamp_unit(double x, const char* what) {
  if (x < -kMetricSlack || x > 1.0 + kMetricSlack || !std::isfinite(x)) {
    throw NumericalError(std::string(what) + " out of [0,1]: " + std::to_string(x));
  }
  return std::clamp(x, 0.0, 1.0);
}

inline Matrix4c sigma_y_sigma_y() {
  Matrix4c s = Matrix4c::Zero();
  // sigma_y (x) sigma_y in (HH, HV, VH, VV): anti-diagonal (-1, 1, 1, -1)
  s(0, 3) = -1.0;
  s(1, 2) = 1.0;
  s(2, 1) = 1.0;
  s(3, 0) = -1.0;
  return s;
}

}  // namespace detail

/// <psi|rho|psi>
inline double fidelity_pure(const DensityMatrix4& rho, const TwoQubitPureState& psi) {
  const Complex f = psi.amplitudes().dot(rho.matrix() * psi.amplitudes());
  return detail::clamp_unit(f.real(), "fidelity");
}

/// Tr(rho^2)
inline double purity(const DensityMatrix4& rho) {
  // Tr(rho rho) = sum |rho_ij|^2 for Hermitian rho
  return detail::clamp_unit(rho.matrix().squaredNorm(), "purity");
}

/// Normalized linear entropy (4/3)(1 - Tr rho^2); 0 for pure states, 1 for I/4.
inline double linear_entropy(const DensityMatrix4& rho) {
  return detail::clamp_unit(4.0 / 3.0 * (1.0 - rho.matrix().squaredNorm()), "linear entropy");
}

/// Wootters concurrence. The lambda_i are computed as square roots of the eigenvalues of the
/// Hermitian matrix sqrt(rho) rho~ sqrt(rho), which share the spectrum of rho rho~.
inline double concurrence(const DensityMatrix4& rho) {
  // lambda_i are the singular values of tau = W^T (Y x Y) W with W the eigenvectors of rho scaled
  // by sqrt(p_i). Eigenvalues at round-off level are dropped so that rank-deficient states do not
  // pick up sqrt(eps) spurious terms.
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(rho.matrix());
  const double cutoff = 1e-13 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  Matrix4c w = Matrix4c::Zero();
  for (int i = 0; i < 4; ++i) {
    const double p = es.eigenvalues()[i];
    if (p > cutoff) w.col(i) = std::sqrt(p) * es.eigenvectors().col(i);
  }
  const Matrix4c tau = w.transpose() * detail::sigma_y_sigma_y() * w;
  Eigen::JacobiSVD<Matrix4c> svd(tau);
  std::array<double, 4> lam{};
  for (int i = 0; i < 4; ++i) lam[i] = svd.singularValues()[i];
  std::sort(lam.begin(), lam.end(), std::greater<>());
  return detail::clamp_unit(std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]), "concurrence");
}

enum class Subsystem { first, second };

/// Reduced 2x2 state of the remaining qubit after tracing out `traced`.
inline Matrix2c partial_trace(const DensityMatrix4& rho, Subsystem traced) {
  Matrix2c out = Matrix2c::Zero();
  const Matrix4c& m = rho.matrix();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        out(i, j) += traced == Subsystem::first ? m(basis_index(k, i), basis_index(k, j))
                                                : m(basis_index(i, k), basis_index(j, k));
      }
    }
  }
  return out;
}

}  // namespace polchip
