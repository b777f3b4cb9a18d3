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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "polchip/cli/config.hpp"
#include "polchip/cli/runner.hpp"

using namespace polchip;
using namespace polchip::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigDir = POLCHIP_CONFIG_DIR;
const std::string kCli = POLCHIP_CLI_PATH;

fs::path temp_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("polchip_test_cli_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& name, const nlohmann::json& j) {
  const fs::path p = dir / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

std::vector<fs::path> bundled_configs() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(kConfigDir))
    if (e.path().extension() == ".json") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

bool mentions(const std::vector<Diagnostic>& ds, const std::string& path, const std::string& fragment = "") {
  for (const auto& d : ds)
    if (d.path == path && d.message.find(fragment) != std::string::npos) return true;
  return false;
}

nlohmann::json hwp_config() {
  return {{"experiment", "hwp_fringe"},
          {"coupler", {{"r_h", 0.492}, {"r_v", 0.581}}},
          {"scan", {{"start", 0}, {"stop", 180}, {"points", 100}, {"unit", "deg"}}}};
}

struct Exec {
  int code;
  std::string err;
};

Exec run_cli(const std::string& args, const fs::path& scratch) {
  const fs::path err = scratch / "stderr.txt";
  const std::string cmd = kCli + " " + args + " > " + (scratch / "stdout.txt").string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  std::ifstream in(err);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, text};
}

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {(std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Validate, BundledConfigsAreValid) {
  const auto configs = bundled_configs();
  ASSERT_GE(configs.size(), 9u);
  for (const auto& p : configs) {
    const auto r = load_config(p);
    EXPECT_TRUE(r.diagnostics.empty()) << p << ": " << to_json(r.diagnostics).dump();
    EXPECT_TRUE(r.config.has_value()) << p;
  }
}

TEST(Validate, ReflectivityOutOfRangeNamesFieldAndBound) {
  auto j = hwp_config();
  j["coupler"]["r_h"] = 1.3;
  const auto r = parse_config(j);
  EXPECT_FALSE(r.config);
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].path, "coupler.r_h");
  EXPECT_NE(r.diagnostics[0].message.find("[0, 1]"), std::string::npos);
}

TEST(Validate, MissingOrEmptyGrid) {
  auto j = hwp_config();
  j.erase("scan");
  EXPECT_TRUE(mentions(parse_config(j).diagnostics, "scan", "missing"));
  j["scan"] = {{"values", nlohmann::json::array()}, {"unit", "deg"}};
  EXPECT_TRUE(mentions(parse_config(j).diagnostics, "scan.values", "empty"));
  j["scan"] = {{"start", 0}, {"stop", 1}, {"points", 0}, {"unit", "deg"}};
  EXPECT_TRUE(mentions(parse_config(j).diagnostics, "scan.points", "empty"));
}

TEST(Validate, SchemaProblems) {
  auto j = hwp_config();
  j["colour"] = "blue";
  EXPECT_TRUE(mentions(parse_config(j).diagnostics, "colour", "unknown"));

  j = hwp_config();
  j["experiment"] = "laser_show";
  EXPECT_TRUE(mentions(parse_config(j).diagnostics, "experiment"));

  j = hwp_config();
  j["scan"]["unit"] = "um";
  EXPECT_TRUE(mentions(parse_config(j).diagnostics, "scan.unit"));

  nlohmann::json hom = {{"experiment", "hom_scan"},
                        {"coupler", {{"r_h", 0.5}, {"r_v", 0.5}}},
                        {"source", {{"preset", "custom"}}},
                        {"scan", {{"values", {0.0}}, {"unit", "um"}}},
                        {"delay", {{"coherence_length_um", 30}}}};
  EXPECT_TRUE(mentions(parse_config(hom).diagnostics, "source.amplitudes", "custom"));
  hom["source"] = {{"preset", "hh"}, {"mu", 0.9}, {"visibility", 0.9}};
  EXPECT_TRUE(mentions(parse_config(hom).diagnostics, "source.visibility"));
  hom["source"] = {{"preset", "nope"}};
  EXPECT_TRUE(mentions(parse_config(hom).diagnostics, "source.preset"));
  hom["source"] = {{"preset", "hh"}};
  hom["delay"] = {{"coherence_length_um", -1}};
  EXPECT_TRUE(mentions(parse_config(hom).diagnostics, "delay.coherence_length_um"));
  hom["delay"] = {{"coherence_length_um", 30}};
  EXPECT_TRUE(parse_config(hom).diagnostics.empty());

  j = hwp_config();
  j["source"] = {{"preset", "hh"}};
  EXPECT_TRUE(mentions(parse_config(j).diagnostics, "source.preset", "psi_plus"));

  EXPECT_TRUE(mentions(parse_config(nlohmann::json::array()).diagnostics, ""));
}

TEST(Validate, ReferencedFilesMustExist) {
  const fs::path dir = temp_dir("files");
  const nlohmann::json j = {{"experiment", "birefringence_fit"},
                            {"birefringence",
                             {{"wavelength_nm", 806},
                              {"samples", {{{"length_mm", 6}, {"measurement", "missing_a.csv"}},
                                           {{"length_mm", 12}, {"measurement", "missing_b.csv"}}}}}}};
  const auto r = load_config(write_config(dir, "b.json", j));
  EXPECT_TRUE(mentions(r.diagnostics, "birefringence.samples[0].measurement", "not found"));
  EXPECT_TRUE(mentions(r.diagnostics, "birefringence.samples[1].measurement", "not found"));
  fs::remove_all(dir);
}

TEST(Run, HwpFringeFitMatchesOracleVisibility) {
  const auto cfg = parse_config(hwp_config()).config;
  ASSERT_TRUE(cfg);
  const RunOutput out = run_experiment(*cfg, 2);
  // V = (P_psi- - P_phi+) / (P_psi- + P_phi+) from the Fock-space oracle.
  const oracle::M4 u = oracle::coupler(0.492, 0.581);
  const double p_psi = oracle::quantum(oracle::V4(0, oracle::kRt2, -oracle::kRt2, 0), u).coinc;
  const double p_phi = oracle::quantum(oracle::V4(oracle::kRt2, 0, 0, oracle::kRt2), u).coinc;
  const double expected = (p_psi - p_phi) / (p_psi + p_phi);
  EXPECT_NEAR(out.summary["fit_V"].get<double>(), expected, 1e-6);
  ASSERT_EQ(out.files.size(), 3u);
  EXPECT_EQ(out.files[0].name, "hwp_fringe.csv");
  EXPECT_EQ(out.files[2].name, "hwp_fringe_fit.json");
}

TEST(Run, BalancedSingletPeakRatioTwo) {
  const nlohmann::json j = {
      {"experiment", "hom_scan"},
      {"coupler", {{"r_h", 0.5}, {"r_v", 0.5}}},
      {"source", {{"preset", "custom"}, {"amplitudes", {{0, 0}, {1, 0}, {-1, 0}, {0, 0}}}}},
      {"scan", {{"values", {-400.0, -20.0, 0.0, 20.0, 400.0}}, {"unit", "um"}}},
      {"delay", {{"coherence_length_um", 34.5}}},
      {"fit", false}};
  const auto cfg = parse_config(j).config;
  ASSERT_TRUE(cfg);
  const RunOutput out = run_experiment(*cfg, 1);
  const ScanResult scan = scan_from_csv(out.files[0].contents);
  ASSERT_EQ(scan.size(), 5u);
  EXPECT_NEAR(scan.rate[2], 2.0, 1e-8);
  EXPECT_NEAR(scan.rate[0], 1.0, 1e-8);
  EXPECT_NEAR(scan.rate[4], 1.0, 1e-8);
  EXPECT_GT(scan.rate[1], 1.0);
  EXPECT_EQ(out.files.size(), 2u);  // no fit report
}

TEST(Run, BundledBirefringenceRecoversB) {
  const auto r = load_config(kConfigDir / "birefringence.json");
  ASSERT_TRUE(r.config);
  const RunOutput out = run_experiment(*r.config, 1);
  const auto doc = nlohmann::json::parse(out.files[1].contents);
  EXPECT_NEAR(doc["B"].get<double>(), 7e-5, 7e-5 * 1e-9);
  EXPECT_EQ(doc["orders"].get<std::vector<int>>(), (std::vector<int>{0, 1, 1, 2}));
  EXPECT_LT(doc["rms_residual"].get<double>(), 1e-9);
  EXPECT_NE(out.files[0].contents.find("length_mm,delta_rad,theta_rad,delta_unwrapped_rad"), std::string::npos);
}

TEST(Run, BundledConfigsByteIdenticalAcrossRunsAndWorkers) {
  for (const auto& p : bundled_configs()) {
    const auto cfg = load_config(p).config;
    ASSERT_TRUE(cfg) << p;
    const RunOutput a = run_experiment(*cfg, 1);
    const RunOutput b = run_experiment(*cfg, 5);
    ASSERT_EQ(a.files.size(), b.files.size()) << p;
    for (std::size_t i = 0; i < a.files.size(); ++i) {
      EXPECT_EQ(a.files[i].name, b.files[i].name);
      EXPECT_EQ(a.files[i].contents, b.files[i].contents) << p << " " << a.files[i].name;
    }
  }
}

TEST(Run, NoiseSeedControlsOutput) {
  auto j = hwp_config();
  j["noise"] = {{"counts", 1e4}, {"seed", 1}};
  const auto first = run_experiment(*parse_config(j).config, 1).files[0].contents;
  EXPECT_EQ(first, run_experiment(*parse_config(j).config, 3).files[0].contents);
  j["noise"]["seed"] = 2;
  EXPECT_NE(first, run_experiment(*parse_config(j).config, 1).files[0].contents);
}

TEST(Cli, ExitCodesAndErrorRecords) {
  const fs::path dir = temp_dir("exit");
  const auto ok = run_cli("run " + (kConfigDir / "fig3c_hwp.json").string() + " -o " + (dir / "out").string(), dir);
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_TRUE(fs::exists(dir / "out" / "fig3c_hwp.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "fig3c_hwp_fit.json"));

  auto bad = hwp_config();
  bad["coupler"]["r_v"] = -0.1;
  const auto invalid = run_cli("run " + write_config(dir, "bad.json", bad).string() + " -o " + dir.string(), dir);
  EXPECT_EQ(invalid.code, 2);
  const auto rec = nlohmann::json::parse(invalid.err);
  EXPECT_EQ(rec["error"], "config");
  EXPECT_EQ(rec["diagnostics"][0]["path"], "coupler.r_v");

  std::ofstream(dir / "syntax.json") << "{\"experiment\": ";
  EXPECT_EQ(run_cli("run " + (dir / "syntax.json").string(), dir).code, 2);

  auto flat = hwp_config();
  flat["coupler"] = {{"r_h", 0.0}, {"r_v", 0.0}};
  const auto numerical = run_cli("run " + write_config(dir, "flat.json", flat).string() + " -o " + dir.string(), dir);
  EXPECT_EQ(numerical.code, 3);
  EXPECT_EQ(nlohmann::json::parse(numerical.err)["error"], "numerical");

  const auto io = run_cli("run " + (dir / "does_not_exist.json").string(), dir);
  EXPECT_EQ(io.code, 4);
  EXPECT_EQ(nlohmann::json::parse(io.err)["error"], "io");

  std::ofstream(dir / "blocker") << "x";
  const auto io2 = run_cli("run " + (kConfigDir / "fig3c_hwp.json").string() + " -o " + (dir / "blocker").string(), dir);
  EXPECT_EQ(io2.code, 4);

  EXPECT_EQ(run_cli("frobnicate", dir).code, 2);
  fs::remove_all(dir);
}

TEST(Cli, ValidateAndPresets) {
  const fs::path dir = temp_dir("validate");
  EXPECT_EQ(run_cli("validate " + (kConfigDir / "fig3a_hh.json").string(), dir).code, 0);
  EXPECT_EQ(nlohmann::json::parse(file_bytes(dir / "stdout.txt")), nlohmann::json::array());
  auto bad = hwp_config();
  bad.erase("scan");
  EXPECT_EQ(run_cli("validate " + write_config(dir, "noscan.json", bad).string(), dir).code, 2);
  const auto diags = nlohmann::json::parse(file_bytes(dir / "stdout.txt"));
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0]["path"], "scan");

  EXPECT_EQ(run_cli("presets list", dir).code, 0);
  const std::string listing = file_bytes(dir / "stdout.txt");
  for (const auto& p : kPresets) EXPECT_NE(listing.find(std::string(p.name)), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, RerunIsByteIdenticalOnDisk) {
  const fs::path dir = temp_dir("rerun");
  const std::string cfg = (kConfigDir / "fig4_singlet_filter.json").string();
  ASSERT_EQ(run_cli("run " + cfg + " -o " + (dir / "a").string() + " --workers 1", dir).code, 0);
  ASSERT_EQ(run_cli("run " + cfg + " -o " + (dir / "b").string() + " --workers 4", dir).code, 0);
  for (const char* f : {"fig4_singlet_filter.json", "fig4_singlet_filter_counts.csv"}) {
    EXPECT_FALSE(file_bytes(dir / "a" / f).empty());
    EXPECT_EQ(file_bytes(dir / "a" / f), file_bytes(dir / "b" / f)) << f;
  }
  fs::remove_all(dir);
}
