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

// polchip: run experiment configs.
//
//   polchip run CONFIG [-o DIR] [--workers N]
//   polchip validate CONFIG
//   polchip presets list
//
// Exit codes: 0 ok, 2 invalid config, 3 numerical failure, 4 I/O failure. Failures print one JSON
// record to stderr.

#include <CLI11.hpp>

#include <iostream>

#include "polchip/cli/config.hpp"
#include "polchip/cli/runner.hpp"

namespace {

using polchip::cli::Diagnostic;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

int fail(int code, std::string_view kind, const std::string& message,
         const std::vector<Diagnostic>& diagnostics = {}) {
  nlohmann::ordered_json j;
  j["error"] = std::string(kind);
  j["message"] = message;
  if (!diagnostics.empty()) j["diagnostics"] = polchip::cli::to_json(diagnostics);
  std::cerr << j.dump() << '\n';
  return code;
}

int cmd_validate(const std::string& path) {
  std::vector<Diagnostic> diagnostics;
  try {
    diagnostics = polchip::cli::load_config(path).diagnostics;
  } catch (const polchip::IoError& e) {
    diagnostics.push_back({"", e.what()});
  }
  std::cout << polchip::cli::to_json(diagnostics).dump(2) << '\n';
  return diagnostics.empty() ? 0 : kExitConfig;
}

int cmd_run(const std::string& path, const std::string& out_dir, unsigned workers_flag) {
  const auto parsed = polchip::cli::load_config(path);
  if (!parsed.config) return fail(kExitConfig, "config", "invalid config " + path, parsed.diagnostics);
  const auto& cfg = *parsed.config;
  unsigned workers = polchip::default_workers();
  if (cfg.workers) workers = std::min(workers, *cfg.workers);
  if (workers_flag > 0) workers = workers_flag;
  const auto out = polchip::cli::run_experiment(cfg, workers);
  polchip::cli::write_outputs(out, out_dir);
  nlohmann::ordered_json report = out.summary;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& f : out.files) files.push_back((std::filesystem::path(out_dir) / f.name).string());
  report["files"] = files;
  std::cout << report.dump(2) << '\n';
  return 0;
}

int cmd_presets() {
  for (const auto& p : polchip::kPresets) std::cout << p.name << "\t" << p.description << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Integrated-photonics polarization-entanglement simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  unsigned workers = 0;
  auto* run = app.add_subcommand("run", "Run an experiment config and write its CSV/JSON outputs");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_option("-o,--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--workers", workers, "Worker threads (default: POLCHIP_WORKERS or all cores)")
      ->check(CLI::Range(1u, 1024u));

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a config and print diagnostics as JSON");
  validate->add_option("config", validate_path, "Experiment config (JSON)")->required();

  auto* presets = app.add_subcommand("presets", "Source presets");
  auto* presets_list = presets->add_subcommand("list", "List the source presets");
  presets->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, out_dir, workers);
    if (*validate) return cmd_validate(validate_path);
    if (*presets_list) return cmd_presets();
  } catch (const polchip::ValidationError& e) {
    return fail(kExitConfig, "validation", e.what());
  } catch (const polchip::NumericalError& e) {
    return fail(kExitNumerical, "numerical", e.what());
  } catch (const polchip::IoError& e) {
    return fail(kExitIo, "io", e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(kExitIo, "io", e.what());
  }
  return kExitConfig;
}
