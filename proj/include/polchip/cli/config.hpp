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

// Experiment configuration files.
//
// A config is one JSON object. Top-level keys:
//   experiment    "hom_scan" | "hwp_fringe" | "qwp_fringe" | "singlet_filter" | "birefringence_fit"
//   name          output file stem, [A-Za-z0-9_.-]+ (default: the experiment kind)
//   coupler       {"r_h": 0.492, "r_v": 0.581}
//   source        {"preset": "psi_plus", "mu": 1.0, "visibility": 0.93, "waveplate_error_deg": 0,
//                  "amplitudes": [[re, im] x 4], "waveplates": [{"element": "half", "mode": "B",
//                  "theta_deg": 45}]}; "visibility" sets mu so the HOM visibility equals it
//   scan          {"start": a, "stop": b, "points": n} or {"values": [...]}, plus "unit":
//                 "um" for hom_scan, "deg" or "rad" for the fringes
//   delay         {"coherence_length_um": L} or {"wavelength_nm": 806, "bandwidth_nm": 6}
//   noise         {"counts": N, "seed": s}: Poisson counts with mean N * rate
//   fit           {"model": "dip" | "cos4" | "cos4_power"}, or false to skip fitting
//   tomography    {"counts_per_setting": 1e5, "seed": s, "analyzer_error_c_deg": 0,
//                  "analyzer_error_d_deg": 0, "bootstrap_resamples": 0, "bootstrap_seed": 0}
//   birefringence {"wavelength_nm": 806, "axis_deg": 0, "samples": [{"length_mm": 6,
//                  "measurement": "data/l06.csv"}]}; paths are relative to the config file
//   workers       optional cap on worker threads

#pragma once

#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "polchip/birefringence.hpp"
#include "polchip/scan.hpp"
#include "polchip/source.hpp"

namespace polchip::cli {

enum class ExperimentKind { hom_scan, hwp_fringe, qwp_fringe, singlet_filter, birefringence_fit };

inline constexpr std::pair<ExperimentKind, std::string_view> kExperimentNames[] = {
    {ExperimentKind::hom_scan, "hom_scan"},
    {ExperimentKind::hwp_fringe, "hwp_fringe"},
    {ExperimentKind::qwp_fringe, "qwp_fringe"},
    {ExperimentKind::singlet_filter, "singlet_filter"},
    {ExperimentKind::birefringence_fit, "birefringence_fit"},
};

inline std::string_view to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kExperimentNames)
    if (kind == k) return name;
  return "?";
}

struct Diagnostic {
  std::string path;
  std::string message;
};

inline nlohmann::ordered_json to_json(const std::vector<Diagnostic>& ds) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& d : ds) j.push_back({{"path", d.path}, {"message", d.message}});
  return j;
}

struct NoiseConfig {
  double counts = 0.0;
  std::uint64_t seed = 0;
};

struct TomographyConfig {
  double counts_per_setting = 1e5;
  std::optional<std::uint64_t> seed;  // Poisson noise when set
  double analyzer_error_c = 0.0;      // radians
  double analyzer_error_d = 0.0;
  int bootstrap_resamples = 0;
  std::uint64_t bootstrap_seed = 0;
};

struct BirefringenceSampleConfig {
  double length_mm = 0.0;
  std::filesystem::path measurement;
};

struct BirefringenceConfig {
  double wavelength_nm = 806.0;
  double axis = 0.0;  // radians
  std::vector<BirefringenceSampleConfig> samples;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::hom_scan;
  std::string name;
  CouplerSpec coupler;
  SourcePreset source;
  std::optional<double> target_visibility;
  std::vector<PlacedWaveplate> waveplates;
  std::vector<double> grid;  // micrometers for hom_scan, radians for fringes
  std::optional<DelayModel> delay;
  std::optional<NoiseConfig> noise;
  std::optional<FitModel> fit;
  TomographyConfig tomography;
  BirefringenceConfig birefringence;
  std::optional<unsigned> workers;
};

struct ParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<Diagnostic> diagnostics;
};

namespace detail {

constexpr double kDeg = std::numbers::pi / 180.0;

// Non-negative integer, whichever way the JSON library stored it.
inline bool is_count(const nlohmann::json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

// Collects diagnostics while walking a JSON document.
class Reader {
 public:
  std::vector<Diagnostic> diags;

  void error(const std::string& path, const std::string& msg) { diags.push_back({path, msg}); }

  const nlohmann::json* child(const nlohmann::json& obj, const std::string& path, const char* key, bool required) {
    if (!obj.is_object()) return nullptr;
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) error(join(path, key), "missing required field");
      return nullptr;
    }
    return &*it;
  }

  std::optional<double> number(const nlohmann::json& obj, const std::string& path, const char* key, bool required) {
    const auto* v = child(obj, path, key, required);
    if (!v) return std::nullopt;
    if (!v->is_number()) {
      error(join(path, key), "expected a number");
      return std::nullopt;
    }
    const double x = v->get<double>();
    if (!std::isfinite(x)) {
      error(join(path, key), "must be finite");
      return std::nullopt;
    }
    return x;
  }

  std::optional<double> ranged(const nlohmann::json& obj, const std::string& path, const char* key, bool required,
                               double lo, double hi) {
    auto x = number(obj, path, key, required);
    if (x && (*x < lo || *x > hi)) {
      std::ostringstream os;
      os << "value " << *x << " outside [" << lo << ", " << hi << "]";
      error(join(path, key), os.str());
      return std::nullopt;
    }
    return x;
  }

  std::optional<std::uint64_t> seed(const nlohmann::json& obj, const std::string& path, const char* key,
                                    bool required) {
    const auto* v = child(obj, path, key, required);
    if (!v) return std::nullopt;
    if (!is_count(*v)) {
      error(join(path, key), "expected a non-negative integer");
      return std::nullopt;
    }
    return v->get<std::uint64_t>();
  }

  std::optional<std::string> string(const nlohmann::json& obj, const std::string& path, const char* key,
                                    bool required) {
    const auto* v = child(obj, path, key, required);
    if (!v) return std::nullopt;
    if (!v->is_string()) {
      error(join(path, key), "expected a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  void reject_unknown(const nlohmann::json& obj, const std::string& path, std::initializer_list<const char*> known) {
    if (!obj.is_object()) return;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool ok = false;
      for (const char* k : known) ok = ok || it.key() == k;
      if (!ok) error(join(path, it.key().c_str()), "unknown field");
    }
  }

  static std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }
};

inline void parse_coupler(Reader& rd, const nlohmann::json& root, ExperimentConfig& cfg) {
  const auto* c = rd.child(root, "", "coupler", true);
  if (!c) return;
  if (!c->is_object()) {
    rd.error("coupler", "expected an object");
    return;
  }
  rd.reject_unknown(*c, "coupler", {"r_h", "r_v"});
  const auto rh = rd.ranged(*c, "coupler", "r_h", true, 0.0, 1.0);
  const auto rv = rd.ranged(*c, "coupler", "r_v", true, 0.0, 1.0);
  if (rh && rv) cfg.coupler = CouplerSpec(*rh, *rv);
}

inline void parse_source(Reader& rd, const nlohmann::json& root, ExperimentConfig& cfg, bool required) {
  const auto* s = rd.child(root, "", "source", required);
  if (!s) return;
  if (!s->is_object()) {
    rd.error("source", "expected an object");
    return;
  }
  rd.reject_unknown(*s, "source", {"preset", "mu", "visibility", "waveplate_error_deg", "amplitudes", "waveplates"});
  if (auto p = rd.string(*s, "source", "preset", required)) {
    try {
      cfg.source.kind = source_kind_from_string(*p);
    } catch (const ValidationError& e) {
      rd.error("source.preset", e.what());
    }
  }
  if (auto mu = rd.ranged(*s, "source", "mu", false, 0.0, 1.0)) cfg.source.mu = *mu;
  if (auto v = rd.ranged(*s, "source", "visibility", false, 0.0, 1.0)) {
    if (s->contains("mu")) rd.error("source.visibility", "give either mu or visibility, not both");
    cfg.target_visibility = *v;
  }
  if (auto e = rd.number(*s, "source", "waveplate_error_deg", false)) cfg.source.waveplate_error = *e * kDeg;

  const auto* amps = rd.child(*s, "source", "amplitudes", false);
  if (cfg.source.kind == SourceKind::custom) {
    if (!amps) {
      rd.error("source.amplitudes", "required for the custom preset");
    } else if (!amps->is_array() || amps->size() != 4) {
      rd.error("source.amplitudes", "expected four [re, im] pairs over (HH, HV, VH, VV)");
    } else {
      Vector4c v;
      bool ok = true;
      for (int i = 0; i < 4; ++i) {
        const auto& e = (*amps)[i];
        if (e.is_number()) {
          v[i] = e.get<double>();
        } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
          v[i] = Complex(e[0].get<double>(), e[1].get<double>());
        } else {
          ok = false;
        }
      }
      if (!ok) {
        rd.error("source.amplitudes", "entries must be numbers or [re, im] pairs");
      } else if (!(v.norm() > 0.0) || !std::isfinite(v.norm())) {
        rd.error("source.amplitudes", "amplitudes must not all be zero");
      } else {
        cfg.source.custom_amplitudes = v;
      }
    }
  } else if (amps) {
    rd.error("source.amplitudes", "only allowed with the custom preset");
  }

  if (const auto* wps = rd.child(*s, "source", "waveplates", false)) {
    if (!wps->is_array()) {
      rd.error("source.waveplates", "expected an array");
      return;
    }
    for (std::size_t i = 0; i < wps->size(); ++i) {
      const std::string path = "source.waveplates[" + std::to_string(i) + "]";
      const auto& w = (*wps)[i];
      if (!w.is_object()) {
        rd.error(path, "expected an object");
        continue;
      }
      rd.reject_unknown(w, path, {"element", "mode", "theta_deg"});
      const auto el = rd.string(w, path, "element", true);
      const auto mode = rd.string(w, path, "mode", true);
      const auto th = rd.number(w, path, "theta_deg", true);
      std::optional<WaveplateKind> kind;
      if (el) {
        if (*el == "half") kind = WaveplateKind::half;
        else if (*el == "quarter") kind = WaveplateKind::quarter;
        else rd.error(path + ".element", "expected \"half\" or \"quarter\"");
      }
      std::optional<Port> port;
      if (mode) {
        if (*mode == "A") port = Port::first;
        else if (*mode == "B") port = Port::second;
        else rd.error(path + ".mode", "expected \"A\" or \"B\"");
      }
      if (kind && port && th) cfg.waveplates.push_back({WaveplateSpec(*kind, *th * kDeg), *port});
    }
  }
}

inline void parse_grid(Reader& rd, const nlohmann::json& root, ExperimentConfig& cfg) {
  const auto* g = rd.child(root, "", "scan", true);
  if (!g) return;
  if (!g->is_object()) {
    rd.error("scan", "expected an object");
    return;
  }
  rd.reject_unknown(*g, "scan", {"start", "stop", "points", "values", "unit"});
  const bool angular = cfg.kind != ExperimentKind::hom_scan;
  const auto unit = rd.string(*g, "scan", "unit", true);
  double scale = 1.0;
  if (unit) {
    if (angular && *unit == "deg") scale = kDeg;
    else if (angular && *unit == "rad") scale = 1.0;
    else if (!angular && *unit == "um") scale = 1.0;
    else rd.error("scan.unit", angular ? "expected \"deg\" or \"rad\"" : "expected \"um\"");
  }
  std::vector<double> grid;
  if (const auto* vals = rd.child(*g, "scan", "values", false)) {
    if (g->contains("start") || g->contains("stop") || g->contains("points")) {
      rd.error("scan", "give either values or start/stop/points");
    }
    if (!vals->is_array()) {
      rd.error("scan.values", "expected an array of numbers");
    } else {
      for (const auto& v : *vals) {
        if (!v.is_number() || !std::isfinite(v.get<double>())) {
          rd.error("scan.values", "expected finite numbers");
          grid.clear();
          break;
        }
        grid.push_back(v.get<double>() * scale);
      }
      if (vals->empty()) rd.error("scan.values", "scan grid is empty");
    }
  } else {
    const auto a = rd.number(*g, "scan", "start", true);
    const auto b = rd.number(*g, "scan", "stop", true);
    const auto* n = rd.child(*g, "scan", "points", true);
    std::optional<std::size_t> np;
    if (n) {
      if (!is_count(*n) || n->get<std::uint64_t>() == 0) {
        rd.error("scan.points", "expected a positive integer (scan grid is empty)");
      } else if (n->get<std::uint64_t>() > 1000000) {
        rd.error("scan.points", "more than 1000000 points");
      } else {
        np = n->get<std::size_t>();
      }
    }
    if (a && b && np) grid = linspace(*a * scale, *b * scale, *np);
  }
  cfg.grid = std::move(grid);
}

inline void parse_delay(Reader& rd, const nlohmann::json& root, ExperimentConfig& cfg) {
  const auto* d = rd.child(root, "", "delay", true);
  if (!d) return;
  if (!d->is_object()) {
    rd.error("delay", "expected an object");
    return;
  }
  rd.reject_unknown(*d, "delay", {"coherence_length_um", "wavelength_nm", "bandwidth_nm"});
  if (d->contains("coherence_length_um")) {
    if (d->contains("wavelength_nm") || d->contains("bandwidth_nm")) {
      rd.error("delay", "give either coherence_length_um or wavelength_nm/bandwidth_nm");
    }
    const auto lc = rd.number(*d, "delay", "coherence_length_um", true);
    if (lc && *lc <= 0.0) rd.error("delay.coherence_length_um", "must be positive");
    else if (lc) cfg.delay = DelayModel(*lc);
  } else {
    const auto w = rd.number(*d, "delay", "wavelength_nm", true);
    const auto b = rd.number(*d, "delay", "bandwidth_nm", true);
    if (w && *w <= 0.0) rd.error("delay.wavelength_nm", "must be positive");
    if (b && *b <= 0.0) rd.error("delay.bandwidth_nm", "must be positive");
    if (w && b && *w > 0.0 && *b > 0.0) cfg.delay = DelayModel::from_bandwidth(*w, *b);
  }
}

inline void parse_noise(Reader& rd, const nlohmann::json& root, ExperimentConfig& cfg) {
  const auto* n = rd.child(root, "", "noise", false);
  if (!n || n->is_null()) return;
  if (!n->is_object()) {
    rd.error("noise", "expected an object");
    return;
  }
  rd.reject_unknown(*n, "noise", {"counts", "seed"});
  const auto c = rd.number(*n, "noise", "counts", true);
  const auto s = rd.seed(*n, "noise", "seed", true);
  if (c && *c <= 0.0) rd.error("noise.counts", "must be positive");
  if (c && s && *c > 0.0) cfg.noise = NoiseConfig{*c, *s};
}

inline void parse_fit(Reader& rd, const nlohmann::json& root, ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case ExperimentKind::hom_scan: cfg.fit = FitModel::dip; break;
    case ExperimentKind::hwp_fringe: cfg.fit = FitModel::cos4; break;
    case ExperimentKind::qwp_fringe: cfg.fit = FitModel::cos4_power; break;
    default: break;
  }
  const auto* f = rd.child(root, "", "fit", false);
  if (!f) return;
  if (f->is_boolean() && !f->get<bool>()) {
    cfg.fit.reset();
    return;
  }
  if (!f->is_object()) {
    rd.error("fit", "expected an object or false");
    return;
  }
  rd.reject_unknown(*f, "fit", {"model"});
  if (auto m = rd.string(*f, "fit", "model", true)) {
    try {
      cfg.fit = fit_model_from_string(*m);
    } catch (const ValidationError& e) {
      rd.error("fit.model", e.what());
    }
  }
}

inline void parse_tomography(Reader& rd, const nlohmann::json& root, ExperimentConfig& cfg) {
  const auto* t = rd.child(root, "", "tomography", false);
  if (!t) return;
  if (!t->is_object()) {
    rd.error("tomography", "expected an object");
    return;
  }
  rd.reject_unknown(*t, "tomography", {"counts_per_setting", "seed", "analyzer_error_c_deg", "analyzer_error_d_deg",
                                       "bootstrap_resamples", "bootstrap_seed"});
  auto& tc = cfg.tomography;
  if (auto c = rd.number(*t, "tomography", "counts_per_setting", false)) {
    if (*c <= 0.0) rd.error("tomography.counts_per_setting", "must be positive");
    else tc.counts_per_setting = *c;
  }
  tc.seed = rd.seed(*t, "tomography", "seed", false);
  if (auto e = rd.number(*t, "tomography", "analyzer_error_c_deg", false)) tc.analyzer_error_c = *e * kDeg;
  if (auto e = rd.number(*t, "tomography", "analyzer_error_d_deg", false)) tc.analyzer_error_d = *e * kDeg;
  if (const auto* b = rd.child(*t, "tomography", "bootstrap_resamples", false)) {
    if (!is_count(*b) || (b->get<std::uint64_t>() != 0 && b->get<std::uint64_t>() < 100) ||
        b->get<std::uint64_t>() > 100000) {
      rd.error("tomography.bootstrap_resamples", "expected 0 or an integer in [100, 100000]");
    } else {
      tc.bootstrap_resamples = b->get<int>();
    }
  }
  if (auto s = rd.seed(*t, "tomography", "bootstrap_seed", false)) tc.bootstrap_seed = *s;
}

inline void parse_birefringence(Reader& rd, const nlohmann::json& root, ExperimentConfig& cfg,
                                const std::filesystem::path& base_dir) {
  const auto* b = rd.child(root, "", "birefringence", true);
  if (!b) return;
  if (!b->is_object()) {
    rd.error("birefringence", "expected an object");
    return;
  }
  rd.reject_unknown(*b, "birefringence", {"wavelength_nm", "axis_deg", "samples"});
  auto& bc = cfg.birefringence;
  if (auto w = rd.number(*b, "birefringence", "wavelength_nm", true)) {
    if (*w <= 0.0) rd.error("birefringence.wavelength_nm", "must be positive");
    else bc.wavelength_nm = *w;
  }
  if (auto a = rd.number(*b, "birefringence", "axis_deg", false)) bc.axis = *a * kDeg;
  const auto* s = rd.child(*b, "birefringence", "samples", true);
  if (!s) return;
  if (!s->is_array() || s->size() < 2) {
    rd.error("birefringence.samples", "expected an array of at least two lengths (one length is ambiguous)");
    return;
  }
  for (std::size_t i = 0; i < s->size(); ++i) {
    const std::string path = "birefringence.samples[" + std::to_string(i) + "]";
    const auto& e = (*s)[i];
    rd.reject_unknown(e, path, {"length_mm", "measurement"});
    const auto l = rd.number(e, path, "length_mm", true);
    const auto m = rd.string(e, path, "measurement", true);
    if (l && *l <= 0.0) rd.error(path + ".length_mm", "must be positive");
    if (l && m && *l > 0.0) {
      const std::filesystem::path p = std::filesystem::path(*m).is_absolute() ? std::filesystem::path(*m) : base_dir / *m;
      if (!std::filesystem::is_regular_file(p)) rd.error(path + ".measurement", "file not found: " + p.string());
      for (const auto& prev : bc.samples)
        if (prev.length_mm == *l) rd.error(path + ".length_mm", "lengths must be distinct");
      bc.samples.push_back({*l, p});
    }
  }
}

}  // namespace detail

/// Schema and invariant checks. Never throws on bad input; problems come back as diagnostics.
inline ParseResult parse_config(const nlohmann::json& root, const std::filesystem::path& base_dir = ".") {
  detail::Reader rd;
  ExperimentConfig cfg;
  if (!root.is_object()) {
    rd.error("", "config must be a JSON object");
    return {std::nullopt, rd.diags};
  }
  rd.reject_unknown(root, "", {"experiment", "name", "coupler", "source", "scan", "delay", "noise", "fit", "tomography",
                               "birefringence", "workers", "description"});
  bool have_kind = false;
  if (auto k = rd.string(root, "", "experiment", true)) {
    for (const auto& [kind, name] : kExperimentNames) {
      if (name == *k) {
        cfg.kind = kind;
        have_kind = true;
      }
    }
    if (!have_kind) {
      rd.error("experiment", "unknown experiment '" + *k +
                                 "' (expected hom_scan, hwp_fringe, qwp_fringe, singlet_filter or birefringence_fit)");
    }
  }
  cfg.name = std::string(to_string(cfg.kind));
  if (auto n = rd.string(root, "", "name", false)) {
    static const std::regex ok("[A-Za-z0-9_.-]+");
    if (!std::regex_match(*n, ok) || *n == "." || *n == "..") rd.error("name", "must match [A-Za-z0-9_.-]+");
    else cfg.name = *n;
  }
  if (const auto* w = rd.child(root, "", "workers", false)) {
    if (!detail::is_count(*w) || w->get<std::uint64_t>() == 0 || w->get<std::uint64_t>() > 1024) {
      rd.error("workers", "expected an integer in [1, 1024]");
    } else {
      cfg.workers = w->get<unsigned>();
    }
  }
  if (!have_kind) return {std::nullopt, rd.diags};

  switch (cfg.kind) {
    case ExperimentKind::hom_scan:
      detail::parse_coupler(rd, root, cfg);
      detail::parse_source(rd, root, cfg, true);
      detail::parse_grid(rd, root, cfg);
      detail::parse_delay(rd, root, cfg);
      detail::parse_noise(rd, root, cfg);
      detail::parse_fit(rd, root, cfg);
      rd.reject_unknown(root, "", {"experiment", "name", "coupler", "source", "scan", "delay", "noise", "fit",
                                   "workers", "description"});
      break;
    case ExperimentKind::hwp_fringe:
    case ExperimentKind::qwp_fringe:
      detail::parse_coupler(rd, root, cfg);
      cfg.source.kind = cfg.kind == ExperimentKind::hwp_fringe ? SourceKind::psi_plus : SourceKind::psi_i;
      detail::parse_source(rd, root, cfg, false);
      detail::parse_grid(rd, root, cfg);
      detail::parse_noise(rd, root, cfg);
      detail::parse_fit(rd, root, cfg);
      rd.reject_unknown(root, "", {"experiment", "name", "coupler", "source", "scan", "noise", "fit", "workers",
                                   "description"});
      if (cfg.kind == ExperimentKind::hwp_fringe && cfg.source.kind != SourceKind::psi_plus) {
        rd.error("source.preset", "hwp_fringe runs on the psi_plus source");
      }
      if (cfg.kind == ExperimentKind::qwp_fringe && cfg.source.kind != SourceKind::psi_i) {
        rd.error("source.preset", "qwp_fringe runs on the psi_i source");
      }
      break;
    case ExperimentKind::singlet_filter:
      detail::parse_coupler(rd, root, cfg);
      detail::parse_source(rd, root, cfg, true);
      detail::parse_tomography(rd, root, cfg);
      rd.reject_unknown(root, "", {"experiment", "name", "coupler", "source", "tomography", "workers", "description"});
      break;
    case ExperimentKind::birefringence_fit:
      detail::parse_birefringence(rd, root, cfg, base_dir);
      rd.reject_unknown(root, "", {"experiment", "name", "birefringence", "workers", "description"});
      break;
  }
  // The fringe experiments fix their own source and preparation plate.
  const bool fringe = cfg.kind == ExperimentKind::hwp_fringe || cfg.kind == ExperimentKind::qwp_fringe;
  if (fringe && !cfg.waveplates.empty()) {
    rd.error("source.waveplates", "the fringe experiments insert their own scanned waveplate");
  }
  if (fringe && cfg.source.waveplate_error != 0.0) {
    rd.error("source.waveplate_error_deg", "not supported for the fringe experiments");
  }
  if (cfg.target_visibility && cfg.kind != ExperimentKind::hom_scan) {
    rd.error("source.visibility", "only meaningful for hom_scan");
  }
  if (!rd.diags.empty()) return {std::nullopt, rd.diags};
  return {cfg, {}};
}

/// Reads and parses a config file. JSON syntax errors become diagnostics; an unreadable file is
/// an IoError.
inline ParseResult load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(ss.str(), nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    return {std::nullopt, {{"", std::string("JSON syntax error: ") + e.what()}}};
  }
  return parse_config(root, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

}  // namespace polchip::cli
