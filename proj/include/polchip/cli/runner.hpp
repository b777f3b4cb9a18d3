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

// Executes a parsed experiment config and renders its output files. Rendering is separate from
// writing so tests can compare bytes without touching the filesystem.

#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "polchip/birefringence.hpp"
#include "polchip/cli/config.hpp"
#include "polchip/fitting.hpp"
#include "polchip/parallel.hpp"
#include "polchip/singlet_filter.hpp"
#include "polchip/source.hpp"

namespace polchip::cli {

struct OutputFile {
  std::string name;
  std::string contents;
};

struct RunOutput {
  std::vector<OutputFile> files;
  /// Headline numbers, also embedded in the main JSON file.
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
};

namespace detail {

inline std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

inline nlohmann::ordered_json coupler_json(const CouplerSpec& c) { return {{"r_h", c.r_h()}, {"r_v", c.r_v()}}; }

// Replaces each rate by k / counts with k ~ Poisson(counts * rate) and returns sigma per point.
inline std::vector<double> apply_poisson(ScanResult& scan, const NoiseConfig& noise) {
  std::mt19937_64 rng(noise.seed);
  std::vector<double> sigma(scan.size());
  for (std::size_t i = 0; i < scan.size(); ++i) {
    const double mean = noise.counts * std::max(0.0, scan.rate[i]);
    const double k = mean > 0.0 ? static_cast<double>(std::poisson_distribution<std::int64_t>(mean)(rng)) : 0.0;
    scan.rate[i] = k / noise.counts;
    sigma[i] = std::sqrt(std::max(k, 1.0)) / noise.counts;
  }
  scan.summary["noise_counts"] = noise.counts;
  return sigma;
}

inline RunOutput finish_scan(const ExperimentConfig& cfg, ScanResult scan) {
  std::vector<double> sigma;
  if (cfg.noise) sigma = apply_poisson(scan, *cfg.noise);
  if (cfg.fit) scan.fit = fit_visibility(scan.param, scan.rate, *cfg.fit, sigma);

  RunOutput out;
  out.summary["experiment"] = std::string(to_string(cfg.kind));
  out.summary["name"] = cfg.name;
  out.summary["points"] = scan.size();
  for (const auto& [k, v] : scan.summary) out.summary[k] = v;
  if (scan.fit) {
    out.summary["fit_V"] = scan.fit->visibility;
    out.summary["fit_V_stderr"] = scan.fit->stderr_visibility;
  }

  nlohmann::ordered_json doc;
  doc["experiment"] = std::string(to_string(cfg.kind));
  doc["name"] = cfg.name;
  doc["coupler"] = coupler_json(cfg.coupler);
  doc["noise"] = cfg.noise ? nlohmann::ordered_json{{"counts", cfg.noise->counts}, {"seed", cfg.noise->seed}}
                          : nlohmann::ordered_json(nullptr);
  doc["scan"] = to_json(scan);
  out.files.push_back({cfg.name + ".csv", to_csv(scan)});
  out.files.push_back({cfg.name + ".json", dump(doc)});
  if (scan.fit) {
    nlohmann::ordered_json f = to_json(*scan.fit);
    if (scan.summary.contains("visibility_closed_form")) {
      f["V_closed_form"] = scan.summary.at("visibility_closed_form");
    }
    f["weighted"] = !sigma.empty();
    out.files.push_back({cfg.name + "_fit.json", dump(f)});
  }
  return out;
}

inline RunOutput run_hom(const ExperimentConfig& cfg, unsigned workers) {
  TwoPhotonInput in = prepare(cfg.source, cfg.waveplates);
  if (cfg.target_visibility) {
    in = TwoPhotonInput(in.state(), mu_for_visibility(in.state(), cfg.coupler, *cfg.target_visibility));
  }
  ScanResult scan = hom_scan(in, cfg.coupler, *cfg.delay, cfg.grid, workers);
  scan.summary["visibility_mu1_closed_form"] = hom_visibility_closed_form(in.state(), cfg.coupler);
  return finish_scan(cfg, std::move(scan));
}

inline RunOutput run_fringe(const ExperimentConfig& cfg, unsigned workers) {
  ScanResult scan = cfg.kind == ExperimentKind::hwp_fringe ? hwp_fringe(cfg.coupler, cfg.grid, cfg.source.mu, workers)
                                                           : qwp_fringe(cfg.coupler, cfg.grid, cfg.source.mu, workers);
  return finish_scan(cfg, std::move(scan));
}

inline nlohmann::ordered_json metrics_json(const TomographyMetrics& m) {
  return {{"S_L", m.linear_entropy}, {"C", m.concurrence}, {"F_singlet", m.fidelity_singlet}};
}

inline RunOutput run_singlet(const ExperimentConfig& cfg, unsigned workers) {
  const TwoPhotonInput in = prepare(cfg.source, cfg.waveplates);
  SingletFilterOptions opt;
  const auto& tc = cfg.tomography;
  opt.counts_per_setting = tc.counts_per_setting;
  if (tc.seed) opt.noise = CountNoise::poisson(*tc.seed);
  opt.analyzer_error_c = tc.analyzer_error_c;
  opt.analyzer_error_d = tc.analyzer_error_d;
  opt.bootstrap_resamples = tc.bootstrap_resamples;
  opt.bootstrap_seed = tc.bootstrap_seed;
  opt.workers = workers;
  const SingletFilterResult r = singlet_filter_experiment(in.state(), cfg.coupler, in.mu(), opt);

  RunOutput out;
  out.summary["experiment"] = std::string(to_string(cfg.kind));
  out.summary["name"] = cfg.name;
  out.summary["coincidence_probability"] = r.exact.probability;
  out.summary["F_singlet"] = r.tomography.metrics.fidelity_singlet;
  out.summary["C"] = r.tomography.metrics.concurrence;
  out.summary["S_L"] = r.tomography.metrics.linear_entropy;

  nlohmann::ordered_json doc;
  doc["experiment"] = std::string(to_string(cfg.kind));
  doc["name"] = cfg.name;
  doc["coupler"] = coupler_json(cfg.coupler);
  doc["mu"] = in.mu();
  doc["coincidence_probability"] = r.exact.probability;
  doc["exact_state"] = to_json(r.exact.rho);
  doc["exact_metrics"] = metrics_json(r.exact_metrics);
  doc["tomography"] = to_json(r.tomography);
  out.files.push_back({cfg.name + "_counts.csv", records_to_csv(r.records)});
  out.files.push_back({cfg.name + ".json", dump(doc)});
  return out;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline RunOutput run_birefringence(const ExperimentConfig& cfg) {
  const auto& bc = cfg.birefringence;
  std::vector<LengthSample> series;
  std::vector<RetarderFit> fits;
  for (const auto& s : bc.samples) {
    const RetarderMeasurement meas = measurement_from_csv(read_file(s.measurement));
    const RetarderFit f = fit_retarder(meas);
    if (f.model_violation) {
      throw NumericalError("retarder model violated for " + s.measurement.filename().string() + " (RMS residual " +
                           format_g9(f.rms_residual) + ")");
    }
    const RetarderParams p = align_axis(f.params, bc.axis);
    fits.push_back(f);
    series.push_back({s.length_mm, p.delta, p.theta});
  }
  const BirefringenceFit b = fit_birefringence(series, bc.wavelength_nm);

  RunOutput out;
  out.summary["experiment"] = std::string(to_string(cfg.kind));
  out.summary["name"] = cfg.name;
  out.summary["B"] = b.b;
  out.summary["rms_residual"] = b.rms_residual;
  out.summary["equivalent_solutions"] = b.equivalent_solutions;

  std::ostringstream csv;
  csv << "length_mm,delta_rad,theta_rad,delta_unwrapped_rad\n";
  nlohmann::ordered_json samples = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double unwrapped = series[i].delta + kTwoPi * b.orders[i];
    csv << format_g9(series[i].length_mm) << ',' << format_g9(series[i].delta) << ',' << format_g9(series[i].theta)
        << ',' << format_g9(unwrapped) << '\n';
    samples.push_back({{"length_mm", series[i].length_mm},
                       {"measurement", bc.samples[i].measurement.filename().string()},
                       {"delta_rad", series[i].delta},
                       {"theta_rad", series[i].theta},
                       {"order", b.orders[i]},
                       {"delta_unwrapped_rad", unwrapped},
                       {"fit_rms_residual", fits[i].rms_residual},
                       {"theta_determined", fits[i].theta_determined}});
  }
  nlohmann::ordered_json doc;
  doc["experiment"] = std::string(to_string(cfg.kind));
  doc["name"] = cfg.name;
  doc["wavelength_nm"] = bc.wavelength_nm;
  doc["samples"] = samples;
  doc["B"] = b.b;
  doc["orders"] = b.orders;
  doc["rms_residual"] = b.rms_residual;
  doc["equivalent_solutions"] = b.equivalent_solutions;
  out.files.push_back({cfg.name + ".csv", csv.str()});
  out.files.push_back({cfg.name + ".json", dump(doc)});
  return out;
}

}  // namespace detail

/// Runs the experiment. Output bytes depend only on the config, never on `workers`.
inline RunOutput run_experiment(const ExperimentConfig& cfg, unsigned workers) {
  switch (cfg.kind) {
    case ExperimentKind::hom_scan: return detail::run_hom(cfg, workers);
    case ExperimentKind::hwp_fringe:
    case ExperimentKind::qwp_fringe: return detail::run_fringe(cfg, workers);
    case ExperimentKind::singlet_filter: return detail::run_singlet(cfg, workers);
    case ExperimentKind::birefringence_fit: return detail::run_birefringence(cfg);
  }
  throw ValidationError("unknown experiment kind");
}

inline void write_outputs(const RunOutput& out, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  for (const auto& f : out.files) {
    const auto path = dir / f.name;
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot write " + path.string());
    os << f.contents;
    if (!os) throw IoError("write failed for " + path.string());
  }
}

}  // namespace polchip::cli
