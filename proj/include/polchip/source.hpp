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

// Abstract pair source: named state presets, optional preparation waveplates, and the
// indistinguishability / waveplate-error knobs that stand in for lab imperfections.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polchip/interference.hpp"

namespace polchip {

enum class SourceKind { psi_plus, psi_i, hh, vv, pp, hv_separable, custom };

struct PresetInfo {
  SourceKind kind;
  std::string_view name;
  std::string_view description;
};

inline constexpr PresetInfo kPresets[] = {
    {SourceKind::psi_plus, "psi_plus", "(|HV> + |VH>)/sqrt2, entangled source"},
    {SourceKind::psi_i, "psi_i", "(|HV> - i|VH>)/sqrt2, entangled source"},
    {SourceKind::hh, "hh", "|H>_A |H>_B, PBS-filtered product"},
    {SourceKind::vv, "vv", "|V>_A |V>_B, PBS-filtered product"},
    {SourceKind::pp, "pp", "|+>_A |+>_B, PBS at 45 degrees"},
    {SourceKind::hv_separable, "hv_separable", "|H>_A |V>_B, singlet-filter input"},
    {SourceKind::custom, "custom", "user amplitudes over (HH, HV, VH, VV)"},
};

inline SourceKind source_kind_from_string(std::string_view s) {
  for (const auto& p : kPresets)
    if (p.name == s) return p.kind;
  throw ValidationError("unknown source preset '" + std::string(s) + "'");
}

inline std::string_view to_string(SourceKind k) {
  for (const auto& p : kPresets)
    if (p.kind == k) return p.name;
  return "?";
}

struct SourcePreset {
  SourceKind kind = SourceKind::psi_plus;
  /// Only read for SourceKind::custom.
  Vector4c custom_amplitudes = Vector4c::Zero();
  double mu = 1.0;
  /// Systematic angle offset added to every preparation waveplate, radians.
  double waveplate_error = 0.0;
};

/// A preparation waveplate on one input arm.
struct PlacedWaveplate {
  WaveplateSpec plate;
  Port mode;
};

inline TwoQubitPureState base_state(const SourcePreset& preset) {
  switch (preset.kind) {
    case SourceKind::psi_plus: return bell_state(BellLabel::psi_plus);
    case SourceKind::psi_i: return psi_i_state();
    case SourceKind::hh: return TwoQubitPureState::product(PolarizationQubit::h(), PolarizationQubit::h());
    case SourceKind::vv: return TwoQubitPureState::product(PolarizationQubit::v(), PolarizationQubit::v());
    case SourceKind::pp: return TwoQubitPureState::product(PolarizationQubit::d(), PolarizationQubit::d());
    case SourceKind::hv_separable: return TwoQubitPureState::product(PolarizationQubit::h(), PolarizationQubit::v());
    case SourceKind::custom: return TwoQubitPureState(preset.custom_amplitudes);
  }
  throw ValidationError("bad source kind");
}

/// Base state, then each waveplate in order with the preset's angle error added.
inline TwoPhotonInput prepare(const SourcePreset& preset, std::span<const PlacedWaveplate> waveplates = {}) {
  if (!(preset.mu >= 0.0 && preset.mu <= 1.0)) throw ValidationError("source mu outside [0,1]");
  TwoQubitPureState s = base_state(preset);
  for (const auto& w : waveplates) {
    const WaveplateSpec actual(w.plate.kind(), w.plate.theta() + preset.waveplate_error);
    s = apply_local(waveplate_jones(actual), w.mode, s);
  }
  return TwoPhotonInput(s, preset.mu);
}

}  // namespace polchip
