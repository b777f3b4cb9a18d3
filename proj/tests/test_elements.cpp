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

#include "oracles.hpp"
#include "polchip/elements.hpp"
#include "polchip/source.hpp"

using namespace polchip;

namespace {

constexpr double kPi = std::numbers::pi;

// -cos2t psi- + sin2t phi+
Vector4c hwp_family(double theta) {
  return -std::cos(2 * theta) * bell_state(BellLabel::psi_minus).amplitudes() +
         std::sin(2 * theta) * bell_state(BellLabel::phi_plus).amplitudes();
}

// cos^2 t psi- - i sin^2 t psi+ + e^{-i pi/4}/sqrt2 sin2t phi^i
Vector4c qwp_family(double theta) {
  const Complex i(0, 1);
  const double c = std::cos(theta), s = std::sin(theta);
  return c * c * bell_state(BellLabel::psi_minus).amplitudes() - i * s * s * bell_state(BellLabel::psi_plus).amplitudes() +
         std::polar(1.0, -kPi / 4) / std::sqrt(2.0) * std::sin(2 * theta) * phi_i_state().amplitudes();
}

}  // namespace

TEST(Coupler, MatchesHandWrittenMatrix) {
  for (auto [rh, rv] : {std::pair{0.5, 0.5}, {0.492, 0.581}, {0.0, 0.0}, {1.0, 0.3}}) {
    const Matrix4c got = coupler_transform(CouplerSpec(rh, rv)).matrix();
    EXPECT_LT((got - oracle::coupler(rh, rv)).cwiseAbs().maxCoeff(), 1e-15) << rh << "," << rv;
  }
}

TEST(Coupler, Examples) {
  const Matrix4c bal = coupler_transform(CouplerSpec::balanced()).matrix();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if ((i % 2) == (j % 2)) {
        EXPECT_NEAR(std::abs(bal(i, j)), 1.0 / std::sqrt(2.0), 1e-15);
      }
  const Matrix4c id = coupler_transform(CouplerSpec(0.0, 0.0)).matrix();
  EXPECT_LT((id - Matrix4c::Identity()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Coupler, BlockDiagonalAndUnitary) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int n = 0; n < 200; ++n) {
    for (auto conv : {PhaseConvention::symmetric_i, PhaseConvention::real_antisymmetric}) {
      const Matrix4c u = coupler_transform(CouplerSpec(u01(rng), u01(rng)), conv).matrix();
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          if ((i % 2) != (j % 2)) {
            EXPECT_EQ(u(i, j), Complex(0.0));
          }
      EXPECT_LT((u.adjoint() * u - Matrix4c::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
  const CouplerSpec k = CouplerSpec::measured_device();
  EXPECT_DOUBLE_EQ(k.r_h(), 0.492);
  EXPECT_DOUBLE_EQ(k.r_v(), 0.581);
  EXPECT_NEAR(k.mean_reflectivity(), 0.5365, 1e-15);
}

TEST(Coupler, RejectsOutOfRange) {
  EXPECT_THROW(CouplerSpec(1.3, 0.5), ValidationError);
  EXPECT_THROW(CouplerSpec(0.5, -0.1), ValidationError);
  EXPECT_THROW(CouplerSpec(std::nan(""), 0.5), ValidationError);
  Matrix4c bad = Matrix4c::Identity();
  bad(0, 0) = 2.0;
  EXPECT_THROW(ModeTransform{bad}, ValidationError);
}

TEST(Waveplate, UnitaryWithUnitDeterminant) {
  for (int i = 0; i < 100; ++i) {
    const double th = -2.0 + 0.07 * i;
    for (auto w : {WaveplateSpec::half(th), WaveplateSpec::quarter(th)}) {
      const Matrix2c j = waveplate_jones(w);
      EXPECT_LT((j.adjoint() * j - Matrix2c::Identity()).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_NEAR(std::abs(j.determinant() - 1.0), 0.0, 1e-12);
      EXPECT_GE(w.theta(), 0.0);
      EXPECT_LT(w.theta(), kPi);
    }
  }
}

TEST(Waveplate, HalfSquaredIsIdentityUpToPhase) {
  for (int i = 0; i < 60; ++i) {
    const Matrix2c j = waveplate_jones(WaveplateSpec::half(i * kPi / 60));
    const Matrix2c sq = j * j;
    const Complex ph = sq(0, 0);
    EXPECT_NEAR(std::abs(ph), 1.0, 1e-10);
    EXPECT_LT((sq - ph * Matrix2c::Identity()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Waveplate, AxisFromVertical) {
  // theta = 0: axis vertical, so H and V are eigenpolarizations; theta = pi/4 swaps H and V
  const Matrix2c j0 = waveplate_jones(WaveplateSpec::half(0.0));
  EXPECT_NEAR(std::abs(j0(0, 1)), 0.0, 1e-15);
  const Matrix2c j45 = waveplate_jones(WaveplateSpec::half(kPi / 4));
  EXPECT_NEAR(std::abs(j45(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(j45(0, 0)), 0.0, 1e-15);
}

TEST(ApplyLocal, HalfWaveplateFamily) {
  const auto psi_plus = bell_state(BellLabel::psi_plus);
  for (double th : {0.0, kPi / 8, kPi / 4, 0.3, 1.1, 2.9}) {
    const auto out = apply_local(waveplate_jones(WaveplateSpec::half(th)), Port::second, psi_plus);
    EXPECT_TRUE(equal_up_to_phase(out.amplitudes(), hwp_family(th), 1e-12)) << th;
  }
  // theta = 0 gives -psi-, theta = pi/4 gives phi+, pi/8 is the equal superposition
  const auto at0 = apply_local(waveplate_jones(WaveplateSpec::half(0.0)), Port::second, psi_plus);
  EXPECT_NEAR(overlap_probability(at0, bell_state(BellLabel::psi_minus)), 1.0, 1e-12);
  const auto at4 = apply_local(waveplate_jones(WaveplateSpec::half(kPi / 4)), Port::second, psi_plus);
  EXPECT_NEAR(overlap_probability(at4, bell_state(BellLabel::phi_plus)), 1.0, 1e-12);
  const auto at8 = apply_local(waveplate_jones(WaveplateSpec::half(kPi / 8)), Port::second, psi_plus);
  EXPECT_NEAR(overlap_probability(at8, bell_state(BellLabel::phi_plus)), 0.5, 1e-12);
  EXPECT_NEAR(overlap_probability(at8, bell_state(BellLabel::psi_minus)), 0.5, 1e-12);
}

TEST(ApplyLocal, HalfWaveplateDecompositionIsExhaustive) {
  for (int i = 0; i < 200; ++i) {
    const double th = i * kPi / 200;
    const auto out =
        apply_local(waveplate_jones(WaveplateSpec::half(th)), Port::second, bell_state(BellLabel::psi_plus));
    const double sum = overlap_probability(out, bell_state(BellLabel::psi_minus)) +
                       overlap_probability(out, bell_state(BellLabel::phi_plus));
    EXPECT_NEAR(sum, 1.0, 1e-10);
  }
}

TEST(ApplyLocal, QuarterWaveplateFamily) {
  for (double th : {0.0, kPi / 8, kPi / 4, 0.4, 1.3, 2.5}) {
    const auto out = apply_local(waveplate_jones(WaveplateSpec::quarter(th)), Port::first, psi_i_state());
    EXPECT_TRUE(equal_up_to_phase(out.amplitudes(), qwp_family(th), 1e-12)) << th;
  }
  const auto at0 = apply_local(waveplate_jones(WaveplateSpec::quarter(0.0)), Port::first, psi_i_state());
  EXPECT_NEAR(overlap_probability(at0, bell_state(BellLabel::psi_minus)), 1.0, 1e-12);
}

TEST(ApplyLocal, IdentityAndNorm) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const TwoQubitPureState s(oracle::random_pure(rng));
    for (Port p : {Port::first, Port::second}) {
      EXPECT_LT((apply_local(Matrix2c::Identity(), p, s).amplitudes() - s.amplitudes()).norm(), 1e-15);
      const Matrix2c u = oracle::random_unitary2(rng);
      EXPECT_NEAR(apply_local(u, p, s).amplitudes().norm(), 1.0, 1e-12);
    }
  }
}

TEST(ApplyLocal, ActsOnTheNamedMode) {
  // X on the first qubit maps |HV> to |VV>
  Matrix2c x;
  x << 0, 1, 1, 0;
  const TwoQubitPureState hv(0, 1, 0, 0);
  EXPECT_NEAR(std::abs(apply_local(x, Port::first, hv)[3]), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(apply_local(x, Port::second, hv)[0]), 1.0, 1e-15);
}

TEST(ApplyLocal, RejectsNonUnitary) {
  Matrix2c m = Matrix2c::Identity();
  m(0, 1) = 0.5;
  EXPECT_THROW(apply_local(m, Port::first, bell_state(BellLabel::psi_minus)), ValidationError);
}

TEST(Source, Presets) {
  SourcePreset p;
  p.kind = SourceKind::psi_plus;
  p.mu = 0.7;
  const auto in = prepare(p);
  EXPECT_NEAR(overlap_probability(in.state(), bell_state(BellLabel::psi_plus)), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(in.mu(), 0.7);

  p.kind = SourceKind::hv_separable;
  EXPECT_NEAR(std::abs(prepare(p).state()[1]), 1.0, 1e-15);
  p.kind = SourceKind::hh;
  EXPECT_NEAR(std::abs(prepare(p).state()[0]), 1.0, 1e-15);
  p.kind = SourceKind::vv;
  EXPECT_NEAR(std::abs(prepare(p).state()[3]), 1.0, 1e-15);
  p.kind = SourceKind::pp;
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(prepare(p).state()[i].real(), 0.5, 1e-15);
  p.kind = SourceKind::psi_i;
  EXPECT_NEAR(overlap_probability(prepare(p).state(), psi_i_state()), 1.0, 1e-15);

  p.kind = SourceKind::custom;
  p.custom_amplitudes = Vector4c(1.0, Complex(0, 1), 0.0, 0.0);
  EXPECT_NEAR(std::abs(prepare(p).state()[1]), 1.0 / std::sqrt(2.0), 1e-15);
  p.custom_amplitudes = Vector4c::Zero();
  EXPECT_THROW(prepare(p), ValidationError);

  p.kind = SourceKind::psi_plus;
  p.mu = 1.5;
  EXPECT_THROW(prepare(p), ValidationError);

  for (const auto& info : kPresets) EXPECT_EQ(to_string(source_kind_from_string(info.name)), info.name);
  EXPECT_THROW(source_kind_from_string("bogus"), ValidationError);
}

TEST(Source, WaveplatesAndError) {
  SourcePreset p;
  p.kind = SourceKind::psi_plus;
  const double th = 0.37;
  const PlacedWaveplate hwp{WaveplateSpec::half(th), Port::second};
  EXPECT_TRUE(equal_up_to_phase(prepare(p, std::span(&hwp, 1)).state().amplitudes(), hwp_family(th), 1e-12));

  p.waveplate_error = 0.01;
  EXPECT_TRUE(
      equal_up_to_phase(prepare(p, std::span(&hwp, 1)).state().amplitudes(), hwp_family(th + 0.01), 1e-12));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ang(0.0, kPi);
  for (int i = 0; i < 50; ++i) {
    p.kind = SourceKind::custom;
    const oracle::V4 v = oracle::random_pure(rng);
    p.custom_amplitudes = v;
    p.waveplate_error = 0.0;
    const std::vector<PlacedWaveplate> plates = {{WaveplateSpec::quarter(ang(rng)), Port::first},
                                                 {WaveplateSpec::half(ang(rng)), Port::second}};
    EXPECT_NEAR(prepare(p, plates).state().amplitudes().norm(), 1.0, 1e-12);
  }
}
