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

// Sampled curves and their CSV / JSON forms.

#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "polchip/errors.hpp"

namespace polchip {

/// Fringe/dip models understood by fit_visibility.
///   dip:        N0 [1 - V exp(-((x - x0)/w)^2)]   (V < 0 is a peak)
///   cos4:       N0 [1 + V cos 4x]
///   cos4_power: N0 [1 - V + 2 V cos^4 x]
enum class FitModel { dip, cos4, cos4_power };

inline std::string_view to_string(FitModel m) {
  switch (m) {
    case FitModel::dip: return "dip";
    case FitModel::cos4: return "cos4";
    case FitModel::cos4_power: return "cos4_power";
  }
  return "?";
}

inline FitModel fit_model_from_string(std::string_view s) {
  if (s == "dip") return FitModel::dip;
  if (s == "cos4") return FitModel::cos4;
  if (s == "cos4_power") return FitModel::cos4_power;
  throw ValidationError("unknown fit model '" + std::string(s) + "'");
}

struct VisibilityFit {
  FitModel model = FitModel::dip;
  double n0 = 0.0;
  /// |C0 - C_int| / C0, always non-negative.
  double visibility = 0.0;
  /// Model parameter V with its sign (negative for a peak in the dip model).
  double signed_visibility = 0.0;
  double stderr_visibility = 0.0;
  double stderr_n0 = 0.0;
  /// dip model only
  double center = 0.0;
  double width = 0.0;
  double rms_residual = 0.0;
};

struct ScanResult {
  std::string kind;
  std::string param_name = "param";
  std::vector<double> param;
  std::vector<double> rate;
  std::vector<double> rate_closed_form;
  /// Named scalar results (closed-form visibilities, deviations, ...). Ordered for stable output.
  std::map<std::string, double> summary;
  std::optional<VisibilityFit> fit;

  std::size_t size() const { return param.size(); }
};

/// %.9g formatting; identical inputs give identical bytes.
inline std::string format_g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline void write_csv(std::ostream& os, const ScanResult& scan) {
  os << "param,rate,rate_closed_form\n";
  for (std::size_t i = 0; i < scan.size(); ++i) {
    os << format_g9(scan.param[i]) << ',' << format_g9(scan.rate[i]) << ','
       << format_g9(i < scan.rate_closed_form.size() ? scan.rate_closed_form[i] : std::nan("")) << '\n';
  }
}

inline std::string to_csv(const ScanResult& scan) {
  std::ostringstream os;
  write_csv(os, scan);
  return os.str();
}

/// Parses the three-column CSV written by write_csv.
inline ScanResult scan_from_csv(std::string_view text) {
  ScanResult out;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line.rfind("param,rate", 0) != 0) throw IoError("scan CSV: missing header");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string a, b, c;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',')) {
      throw IoError("scan CSV: malformed line " + std::to_string(lineno));
    }
    std::getline(ls, c, ',');
    try {
      out.param.push_back(std::stod(a));
      out.rate.push_back(std::stod(b));
      out.rate_closed_form.push_back(c.empty() ? std::nan("") : std::stod(c));
    } catch (const std::exception&) {
      throw IoError("scan CSV: bad number on line " + std::to_string(lineno));
    }
  }
  return out;
}

inline nlohmann::ordered_json to_json(const VisibilityFit& f) {
  nlohmann::ordered_json j;
  j["model"] = std::string(to_string(f.model));
  j["N0"] = f.n0;
  j["V"] = f.visibility;
  j["V_signed"] = f.signed_visibility;
  j["stderr"] = f.stderr_visibility;
  j["stderr_N0"] = f.stderr_n0;
  if (f.model == FitModel::dip) {
    j["center"] = f.center;
    j["width"] = f.width;
  }
  j["rms_residual"] = f.rms_residual;
  return j;
}

inline nlohmann::ordered_json to_json(const ScanResult& scan) {
  nlohmann::ordered_json j;
  j["kind"] = scan.kind;
  j["param_name"] = scan.param_name;
  j["param"] = scan.param;
  j["rate"] = scan.rate;
  j["rate_closed_form"] = scan.rate_closed_form;
  nlohmann::ordered_json s = nlohmann::ordered_json::object();
  for (const auto& [k, v] : scan.summary) s[k] = v;
  j["summary"] = s;
  j["fit"] = scan.fit ? to_json(*scan.fit) : nlohmann::ordered_json(nullptr);
  return j;
}

}  // namespace polchip
