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

// Two-photon interference through the polarization-dependent coupler.
//
// The input a+_{A,p} a+_{B,q} is mapped through the single-photon mode transform U and the
// product is expanded over the four output modes. With M(k,l) = sum_pq c_pq U(k,A_p) U(l,B_q),
// the amplitude of |1_k 1_l> (k != l) is M(k,l) + M(l,k) and of |2_k> is sqrt(2) M(k,k).
// Fully distinguishable photons give the classical probabilities |M(k,l)|^2 with no exchange
// term. Partial distinguishability mixes the two affinely in mu.

#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "polchip/elements.hpp"
#include "polchip/entanglement.hpp"
#include "polchip/parallel.hpp"
#include "polchip/scan.hpp"

namespace polchip {

/// Polarization state of (photon on A) x (photon on B) plus the temporal/spectral
/// indistinguishability mu in [0, 1].
class TwoPhotonInput {
 public:
  TwoPhotonInput() = default;
  explicit TwoPhotonInput(TwoQubitPureState state, double mu = 1.0) : state_(std::move(state)), mu_(mu) {
    if (!(mu >= 0.0 && mu <= 1.0)) throw ValidationError("indistinguishability mu = " + std::to_string(mu) + " outside [0,1]");
  }
  const TwoQubitPureState& state() const { return state_; }
  double mu() const { return mu_; }

 private:
  TwoQubitPureState state_;
  double mu_ = 1.0;
};

/// Gaussian overlap mu(dx) = exp(-(dx / L_c)^2), lengths in micrometers.
class DelayModel {
 public:
  explicit DelayModel(double coherence_length_um) : lc_(coherence_length_um) {
    if (!(coherence_length_um > 0.0) || !std::isfinite(coherence_length_um)) {
      throw ValidationError("coherence length must be positive");
    }
  }
  /// L_c = lambda^2 / (pi dlambda). 806 nm with a 6 nm filter gives about 34.5 um.
  static DelayModel from_bandwidth(double wavelength_nm, double bandwidth_nm) {
    if (!(wavelength_nm > 0.0 && bandwidth_nm > 0.0)) throw ValidationError("wavelength and bandwidth must be positive");
    return DelayModel(wavelength_nm * wavelength_nm / (std::numbers::pi * bandwidth_nm) * 1e-3);
  }
  double coherence_length() const { return lc_; }
  double overlap(double delay_um) const {
    const double u = delay_um / lc_;
    return std::exp(-u * u);
  }

 private:
  double lc_;
};

struct CoincidenceOutcome {
  double p_coincidence = 0.0;
  double p_bunch_c = 0.0;
  double p_bunch_d = 0.0;

  double total() const { return p_coincidence + p_bunch_c + p_bunch_d; }
};

namespace detail {

inline constexpr int kOutC[2] = {0, 1};  // C_H, C_V
inline constexpr int kOutD[2] = {2, 3};  // D_H, D_V

// M(k, l) = amplitude for the A photon in output mode k and the B photon in l.
inline Matrix4c pair_amplitudes(const TwoQubitPureState& s, const Matrix4c& u) {
  Matrix4c m = Matrix4c::Zero();
  for (int p = 0; p < 2; ++p) {
    for (int q = 0; q < 2; ++q) {
      const Complex c = s[basis_index(p, q)];
      if (c == Complex(0.0)) continue;
      m += c * u.col(p) * u.col(2 + q).transpose();
    }
  }
  return m;
}

inline bool in_c(int k) { return k < 2; }

inline CoincidenceOutcome quantum_outcome(const Matrix4c& m) {
  CoincidenceOutcome o;
  for (int k = 0; k < 4; ++k) {
    const double p2 = 2.0 * std::norm(m(k, k));
    (in_c(k) ? o.p_bunch_c : o.p_bunch_d) += p2;
    for (int l = k + 1; l < 4; ++l) {
      const double p = std::norm(m(k, l) + m(l, k));
      if (in_c(k) != in_c(l)) o.p_coincidence += p;
      else (in_c(k) ? o.p_bunch_c : o.p_bunch_d) += p;
    }
  }
  return o;
}

inline CoincidenceOutcome classical_outcome(const Matrix4c& m) {
  CoincidenceOutcome o;
  for (int k = 0; k < 4; ++k) {
    for (int l = 0; l < 4; ++l) {
      const double p = std::norm(m(k, l));
      if (in_c(k) != in_c(l)) o.p_coincidence += p;
      else (in_c(k) ? o.p_bunch_c : o.p_bunch_d) += p;
    }
  }
  return o;
}

inline CoincidenceOutcome mix(const CoincidenceOutcome& q, const CoincidenceOutcome& c, double mu) {
  return {mu * q.p_coincidence + (1.0 - mu) * c.p_coincidence, mu * q.p_bunch_c + (1.0 - mu) * c.p_bunch_c,
          mu * q.p_bunch_d + (1.0 - mu) * c.p_bunch_d};
}

}  // namespace detail

/// Outcome probabilities for perfectly indistinguishable (mu = 1) photons.
inline CoincidenceOutcome quantum_coincidence(const TwoQubitPureState& s, const ModeTransform& u) {
  return detail::quantum_outcome(detail::pair_amplitudes(s, u.matrix()));
}

/// Outcome probabilities for fully distinguishable (mu = 0) photons.
inline CoincidenceOutcome classical_coincidence(const TwoQubitPureState& s, const ModeTransform& u) {
  return detail::classical_outcome(detail::pair_amplitudes(s, u.matrix()));
}

/// P(mu) = mu P_quantum + (1 - mu) P_classical for each outcome.
inline CoincidenceOutcome coincidence_probability(const TwoPhotonInput& in, const ModeTransform& u) {
  const Matrix4c m = detail::pair_amplitudes(in.state(), u.matrix());
  return detail::mix(detail::quantum_outcome(m), detail::classical_outcome(m), in.mu());
}

inline CoincidenceOutcome coincidence_probability(const TwoPhotonInput& in, const CouplerSpec& coupler,
                                                  PhaseConvention convention = PhaseConvention::symmetric_i) {
  return coincidence_probability(in, coupler_transform(coupler, convention));
}

struct PostSelectedState {
  DensityMatrix4 rho;  // polarization of (photon in C) x (photon in D)
  double probability = 0.0;
};

/// Polarization state conditioned on one photon in each output. Indistinguishable pairs give the
/// coherent coincidence amplitudes; distinguishable pairs give an incoherent sum over the two
/// which-photon branches (A->C, B->D) and (A->D, B->C). The two are mixed with weight mu.
inline PostSelectedState postselect_coincidence(const TwoPhotonInput& in, const ModeTransform& u) {
  const Matrix4c m = detail::pair_amplitudes(in.state(), u.matrix());
  Vector4c coherent, branch_cd, branch_dc;
  for (int p = 0; p < 2; ++p) {
    for (int q = 0; q < 2; ++q) {
      const int c = detail::kOutC[p];
      const int d = detail::kOutD[q];
      coherent[basis_index(p, q)] = m(c, d) + m(d, c);
      branch_cd[basis_index(p, q)] = m(c, d);
      branch_dc[basis_index(p, q)] = m(d, c);
    }
  }
  const double mu = in.mu();
  Matrix4c rho = mu * coherent * coherent.adjoint() +
                 (1.0 - mu) * (branch_cd * branch_cd.adjoint() + branch_dc * branch_dc.adjoint());
  const double prob = rho.trace().real();
  if (!(prob > 1e-12)) throw NumericalError("post-selection probability is zero");
  rho /= prob;
  return {DensityMatrix4(rho), prob};
}

// ---------------------------------------------------------------------------
// Closed forms
//
// Collecting the coincidence amplitudes of the four input components gives
//   (C_H, D_H): c_HH (t_H - r_H)            (C_V, D_V): c_VV (t_V - r_V)
//   (C_H, D_V): c_HV a - c_VH b             (C_V, D_H): c_VH a - c_HV b
// with a = sqrt(t_H t_V), b = sqrt(r_H r_V), and classical coincidence weights
// t_H^2 + r_H^2, t_V^2 + r_V^2 and a^2 + b^2 for the HH, VV and HV/VH components.

/// Quantum (mu = 1) coincidence probability from the collected amplitudes.
inline double coincidence_closed_form_quantum(const TwoQubitPureState& s, const CouplerSpec& k) {
  const double a = std::sqrt(k.t_h() * k.t_v());
  const double b = std::sqrt(k.r_h() * k.r_v());
  const Complex hh = s[0], hv = s[1], vh = s[2], vv = s[3];
  return std::norm(hh) * std::pow(k.t_h() - k.r_h(), 2) + std::norm(vv) * std::pow(k.t_v() - k.r_v(), 2) +
         std::norm(hv * a - vh * b) + std::norm(vh * a - hv * b);
}

inline double coincidence_closed_form_classical(const TwoQubitPureState& s, const CouplerSpec& k) {
  const double a2 = k.t_h() * k.t_v();
  const double b2 = k.r_h() * k.r_v();
  return std::norm(s[0]) * (k.t_h() * k.t_h() + k.r_h() * k.r_h()) +
         std::norm(s[3]) * (k.t_v() * k.t_v() + k.r_v() * k.r_v()) + (std::norm(s[1]) + std::norm(s[2])) * (a2 + b2);
}

inline double coincidence_closed_form(const TwoQubitPureState& s, const CouplerSpec& k, double mu) {
  return mu * coincidence_closed_form_quantum(s, k) + (1.0 - mu) * coincidence_closed_form_classical(s, k);
}

/// HOM visibility |C0 - C_int| / C0 for an arbitrary input at mu = 1.
inline double hom_visibility_closed_form(const TwoQubitPureState& s, const CouplerSpec& k) {
  const double c0 = coincidence_closed_form_classical(s, k);
  if (c0 <= 0.0) throw NumericalError("no coincidences outside interference for this input");
  return std::abs(c0 - coincidence_closed_form_quantum(s, k)) / c0;
}

/// Maximum visibility for psi+- : 2 sqrt(T_H T_V R_H R_V) / (T_H T_V + R_H R_V).
inline double visibility_psi(const CouplerSpec& k) {
  const double tt = k.t_h() * k.t_v();
  const double rr = k.r_h() * k.r_v();
  if (tt + rr <= 0.0) return 0.0;
  return 2.0 * std::sqrt(tt * rr) / (tt + rr);
}

/// Maximum visibility for phi+- : 2 (T_H R_H + T_V R_V) / (T_H^2 + R_H^2 + T_V^2 + R_V^2).
inline double visibility_phi(const CouplerSpec& k) {
  const double th = k.t_h(), tv = k.t_v(), rh = k.r_h(), rv = k.r_v();
  return 2.0 * (th * rh + tv * rv) / (th * th + rh * rh + tv * tv + rv * rv);
}

/// Fringe visibility of N0 [1 + V cos 4 theta] for psi+ with a HWP on mode B.
inline double hwp_fringe_visibility(const CouplerSpec& k, double mu = 1.0) {
  const double p_psi = coincidence_closed_form(bell_state(BellLabel::psi_minus), k, mu);
  const double p_phi = coincidence_closed_form(bell_state(BellLabel::phi_plus), k, mu);
  return (p_psi - p_phi) / (p_psi + p_phi);
}

/// 2(1 - R) R / (2R^2 - 2R + 1): QWP fringe visibility for a polarization-independent coupler.
inline double qwp_fringe_visibility(double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("reflectivity outside [0,1]");
  return 2.0 * (1.0 - r) * r / (2.0 * r * r - 2.0 * r + 1.0);
}

/// Indistinguishability that scales the mu = 1 HOM visibility of `s` down to `measured`.
/// The visibility is exactly linear in mu, V(mu) = mu V(1).
inline double mu_for_visibility(const TwoQubitPureState& s, const CouplerSpec& k, double measured) {
  const double vmax = hom_visibility_closed_form(s, k);
  if (!(measured >= 0.0) || measured > vmax + 1e-12) {
    throw ValidationError("visibility " + std::to_string(measured) + " not reachable (maximum " + std::to_string(vmax) + ")");
  }
  return vmax > 0.0 ? std::min(1.0, measured / vmax) : 0.0;
}

// ---------------------------------------------------------------------------
// Scans. Each has a pure per-point function; the scan runners evaluate points in parallel and
// keep input order.

/// C(dx) / C0 where C0 is the coincidence rate far outside the coherence length.
inline double hom_point(const TwoPhotonInput& in, const ModeTransform& u, const DelayModel& delay, double dx) {
  const Matrix4c m = detail::pair_amplitudes(in.state(), u.matrix());
  const CoincidenceOutcome q = detail::quantum_outcome(m);
  const CoincidenceOutcome c = detail::classical_outcome(m);
  if (c.p_coincidence <= 0.0) throw NumericalError("hom_scan: zero coincidence rate outside interference");
  const double mu = in.mu() * delay.overlap(dx);
  return detail::mix(q, c, mu).p_coincidence / c.p_coincidence;
}

inline ScanResult hom_scan(const TwoPhotonInput& in, const CouplerSpec& coupler, const DelayModel& delay,
                           std::span<const double> delays, unsigned workers = 1) {
  for (double d : delays)
    if (!std::isfinite(d)) throw ValidationError("hom_scan: non-finite delay");
  const ModeTransform u = coupler_transform(coupler);
  ScanResult r;
  r.kind = "hom_scan";
  r.param_name = "delay_um";
  r.param.assign(delays.begin(), delays.end());
  r.rate = parallel_map(delays.size(), workers, [&](std::size_t i) { return hom_point(in, u, delay, delays[i]); });
  const double c0 = coincidence_closed_form_classical(in.state(), coupler);
  const double qf = coincidence_closed_form_quantum(in.state(), coupler);
  r.rate_closed_form.reserve(delays.size());
  for (double d : delays) {
    const double mu = in.mu() * delay.overlap(d);
    r.rate_closed_form.push_back(1.0 + mu * (qf - c0) / c0);
  }
  r.summary["coherence_length_um"] = delay.coherence_length();
  r.summary["mu"] = in.mu();
  r.summary["visibility_closed_form"] = in.mu() * std::abs(qf - c0) / c0;
  return r;
}

/// psi+ source, HWP at theta on mode B, coincidence probability.
inline double hwp_point(const ModeTransform& u, double mu, double theta, double angle_error = 0.0) {
  const Matrix2c hwp = waveplate_jones(WaveplateSpec::half(theta + angle_error));
  const TwoQubitPureState s = apply_local(hwp, Port::second, bell_state(BellLabel::psi_plus));
  return coincidence_probability(TwoPhotonInput(s, mu), u).p_coincidence;
}

inline ScanResult hwp_fringe(const CouplerSpec& coupler, std::span<const double> thetas, double mu = 1.0,
                             unsigned workers = 1) {
  const ModeTransform u = coupler_transform(coupler);
  ScanResult r;
  r.kind = "hwp_fringe";
  r.param_name = "theta_rad";
  r.param.assign(thetas.begin(), thetas.end());
  r.rate = parallel_map(thetas.size(), workers, [&](std::size_t i) { return hwp_point(u, mu, thetas[i]); });
  const double p_psi = coincidence_closed_form(bell_state(BellLabel::psi_minus), coupler, mu);
  const double p_phi = coincidence_closed_form(bell_state(BellLabel::phi_plus), coupler, mu);
  const double n0 = 0.5 * (p_psi + p_phi);
  const double v = (p_psi - p_phi) / (p_psi + p_phi);
  double dev = 0.0;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    r.rate_closed_form.push_back(n0 * (1.0 + v * std::cos(4.0 * thetas[i])));
    dev = std::max(dev, std::abs(r.rate[i] - r.rate_closed_form.back()));
  }
  r.summary["N0_closed_form"] = n0;
  r.summary["visibility_closed_form"] = v;
  r.summary["max_abs_deviation"] = dev;
  return r;
}

/// psi^i source, QWP at theta on mode A, coincidence probability.
inline double qwp_point(const ModeTransform& u, double mu, double theta, double angle_error = 0.0) {
  const Matrix2c qwp = waveplate_jones(WaveplateSpec::quarter(theta + angle_error));
  const TwoQubitPureState s = apply_local(qwp, Port::first, psi_i_state());
  return coincidence_probability(TwoPhotonInput(s, mu), u).p_coincidence;
}

/// Exact engine curve with the polarization-dependent coupler, alongside the closed form
/// N0 [1 - V + 2V cos^4 theta] evaluated at the mean reflectivity (R_H + R_V)/2.
inline ScanResult qwp_fringe(const CouplerSpec& coupler, std::span<const double> thetas, double mu = 1.0,
                             unsigned workers = 1) {
  const ModeTransform u = coupler_transform(coupler);
  ScanResult r;
  r.kind = "qwp_fringe";
  r.param_name = "theta_rad";
  r.param.assign(thetas.begin(), thetas.end());
  r.rate = parallel_map(thetas.size(), workers, [&](std::size_t i) { return qwp_point(u, mu, thetas[i]); });

  const double rm = coupler.mean_reflectivity();
  const double d = std::pow(1.0 - 2.0 * rm, 2);
  const double v_teo = qwp_fringe_visibility(rm);
  // P(mu) = mu [d + (1 - d) cos^4] + (1 - mu)(1 + d)/2
  const double n0 = 0.5 * (1.0 + d);
  const double v = mu * v_teo;
  double dev = 0.0;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const double c4 = std::pow(std::cos(thetas[i]), 4);
    r.rate_closed_form.push_back(n0 * (1.0 - v + 2.0 * v * c4));
    dev = std::max(dev, std::abs(r.rate[i] - r.rate_closed_form.back()));
  }
  r.summary["mean_reflectivity"] = rm;
  r.summary["N0_closed_form"] = n0;
  r.summary["visibility_closed_form"] = v;
  r.summary["max_abs_deviation"] = dev;
  return r;
}

/// n evenly spaced samples over [lo, hi] inclusive.
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

}  // namespace polchip
