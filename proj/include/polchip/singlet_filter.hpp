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

// A-posteriori singlet filtration: a product input through the coupler, conditioned on one
// photon per output, followed by simulated two-qubit tomography of the C/D pair.

#pragma once

#include "polchip/interference.hpp"
#include "polchip/tomography.hpp"

namespace polchip {

struct SingletFilterOptions {
  double counts_per_setting = 1e5;
  CountNoise noise = CountNoise::none();
  /// Systematic angle offsets on the analyzer waveplates of the C and D arms, radians. An equal
  /// offset on both arms leaves singlet data consistent with a pure singlet.
  double analyzer_error_c = 0.0;
  double analyzer_error_d = 0.0;
  int bootstrap_resamples = 0;
  std::uint64_t bootstrap_seed = 0;
  unsigned workers = 1;
};

struct SingletFilterResult {
  PostSelectedState exact;
  TomographyMetrics exact_metrics;
  std::vector<CountRecord> records;
  TomographyResult tomography;
};

inline SingletFilterResult singlet_filter_experiment(const TwoQubitPureState& input, const CouplerSpec& coupler,
                                                     double mu, const SingletFilterOptions& opt = {}) {
  SingletFilterResult out;
  out.exact = postselect_coincidence(TwoPhotonInput(input, mu), coupler_transform(coupler));
  out.exact_metrics = compute_metrics(out.exact.rho);
  const auto nominal = standard_settings();
  const auto actual = perturbed_settings(nominal, opt.analyzer_error_c, opt.analyzer_error_d);
  out.records = simulate_counts(out.exact.rho, nominal, opt.counts_per_setting, opt.noise, actual);
  out.tomography = run_tomography(out.records, opt.bootstrap_resamples, opt.bootstrap_seed, opt.workers);
  return out;
}

}  // namespace polchip
