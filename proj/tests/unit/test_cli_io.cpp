#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fvwigner/free_particle.hpp"
#include "fvwigner/io/config.hpp"
#include "fvwigner/io/gridfile.hpp"
#include "fvwigner/io/run.hpp"

using namespace fvw;
using namespace fvw::io;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("fvwigner_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string first_violation(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

int cli(const std::string& args) {
  const std::string cmd = std::string(FVW_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Config, DefaultsAreFilled) {
  const auto set = parse_config(R"({"experiment": "free-evolve"})");
  ASSERT_EQ(set.children.size(), 1u);
  const auto& c = set.children.front();
  EXPECT_EQ(c.experiment, Experiment::free_evolve);
  EXPECT_EQ(c.grid.n, 128u);
  EXPECT_GT(c.grid.p_extent, 0.0);
  EXPECT_EQ(c.state.packets.size(), 1u);
  EXPECT_EQ(c.b, 0.0);
  EXPECT_FALSE(set.swept);
}

TEST(Config, FieldExperimentsGetDefaultField) {
  const auto c = parse_config(R"({"experiment": "rotator-evolve"})").children.front();
  EXPECT_DOUBLE_EQ(c.b, 0.1);
  EXPECT_DOUBLE_EQ(c.scales.omega_c, 0.1);
  EXPECT_EQ(c.state.kind, StateSpec::Kind::fock);
  EXPECT_EQ(c.truncation, 16u);
}

TEST(Config, NegativeFieldIsRejected) {
  EXPECT_NE(first_violation(R"({"experiment": "nlcs-scan", "b": -0.1})").find("omega_c must be >= 0"),
            std::string::npos);
}

TEST(Config, UnknownKeysAreRejected) {
  const auto msg = first_violation(R"({"experiment": "free-evolve", "grid": {"n": 64, "nn": 3}})");
  EXPECT_NE(msg.find("grid.nn"), std::string::npos) << msg;
  EXPECT_NE(first_violation(R"({"experiment": "warp"})").find("unknown experiment"), std::string::npos);
  EXPECT_NE(first_violation(R"({"b": 0.1})").find("experiment"), std::string::npos);
  EXPECT_NE(first_violation("{not json").size(), 0u);
}

TEST(Config, FieldAndOmegaConflict) {
  EXPECT_NE(first_violation(R"({"experiment": "nlcs-scan", "b": 0.1, "scales": {"omega_c": 2}})").size(), 0u);
  const auto c = parse_config(R"({"experiment": "nlcs-scan", "b": 0, "scales": {"omega_c": 2}})").children.front();
  EXPECT_EQ(c.b, 0.0);
  EXPECT_EQ(c.scales.omega_c, 2.0);
}

TEST(Config, CrossFieldGuards) {
  EXPECT_NE(first_violation(R"({"experiment": "free-evolve", "grid": {"n": 100}})").size(), 0u);
  EXPECT_NE(first_violation(R"({"experiment": "free-evolve", "state": {"packets": [{"p0": 0.5}]}})").size(), 0u);
  EXPECT_NE(first_violation(R"({"experiment": "modulation", "modulation": {"periods": 2}})").size(), 0u);
  EXPECT_NE(first_violation(R"({"experiment": "spectrum", "spectrum": {"grid": 128, "star_levels": 44}})").size(), 0u);
}

TEST(Config, SweepExpandsInOrder) {
  const auto set = parse_config(
      R"({"experiment": "nlcs-scan", "b": 0.1, "sweep": {"audit.tolerance": [1e-8, 1e-9, 1e-10]}})");
  ASSERT_TRUE(set.swept);
  ASSERT_EQ(set.children.size(), 3u);
  EXPECT_EQ(set.children[1].audit.tolerance, 1e-9);
  EXPECT_EQ(set.labels[0], "audit.tolerance=1e-08");
}

TEST(Config, SweepChildErrorsCarryLabel) {
  const auto msg = first_violation(R"({"experiment": "nlcs-scan", "sweep": {"b": [0.1, -1]}})");
  EXPECT_NE(msg.find("[b=-1]"), std::string::npos) << msg;
}

TEST(Config, SampleConfigsParse) {
  for (const auto& e : fs::directory_iterator(FVW_CONFIG_DIR)) {
    if (e.path().extension() != ".json") continue;
    EXPECT_NO_THROW(parse_config(slurp(e.path()))) << e.path();
  }
}

TEST(GridFile, RoundTripIsBitExact) {
  const auto f = PhysicalScales::canonical(0.0);
  const auto g = make_wigner_grid(32, 64, 0.6, f);
  FVState st(g);
  st.psi_plus = gaussian_packet(g, 0.05, 0.05, 0.0, f);
  st.psi_minus = gaussian_packet(g, -0.05, 0.05, 1.0, f, 0.5);
  const auto W = wigner_components(st, f);
  const std::string bytes = encode_grid(W);
  EXPECT_EQ(bytes.size(), grid_file_size(32, 64));
  EXPECT_EQ(bytes.substr(0, 4), "FVWG");
  const auto back = decode_grid(bytes);
  EXPECT_TRUE(back.grid() == g);
  EXPECT_EQ(max_abs_diff(back, W), 0.0);
  const auto dir = scratch("grid");
  write_grid_file((dir / "w.fvwg").string(), W);
  EXPECT_EQ(slurp(dir / "w.fvwg"), bytes);
  EXPECT_EQ(max_abs_diff(read_grid_file((dir / "w.fvwg").string()), W), 0.0);
}

TEST(GridFile, RejectsCorruptHeaders) {
  const auto g = make_grid(8, 8, 1.0, 1.0);
  std::string bytes = encode_grid(WignerComponents(g));
  std::string bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(decode_grid(bad), FormatError);
  EXPECT_THROW(decode_grid(bytes.substr(0, bytes.size() - 1)), FormatError);
  bad = bytes;
  bad[4] = 2;
  EXPECT_THROW(decode_grid(bad), FormatError);
}

TEST(Run, ManifestRecordsEveryCheck) {
  const auto cfg = parse_config(R"({"experiment": "nlcs-scan", "b": 0.1})").children.front();
  const auto dir = scratch("manifest");
  const auto out = run(cfg, dir);
  EXPECT_EQ(out.exit_code, kExitPass);
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(m["status"], "pass");
  ASSERT_FALSE(m["checks"].empty());
  for (const auto& c : m["checks"]) {
    EXPECT_TRUE(c.contains("measured"));
    EXPECT_TRUE(c.contains("tolerance"));
  }
  EXPECT_TRUE(fs::exists(dir / "nlcs_scan.csv"));
}

TEST(Run, RepeatedRunsAreByteIdentical) {
  const auto cfg = parse_config(slurp(fs::path(FVW_CONFIG_DIR) / "free_two_packet.json")).children.front();
  const auto d1 = scratch("det1"), d2 = scratch("det2");
  ASSERT_EQ(run(cfg, d1).exit_code, kExitPass);
  ASSERT_EQ(run(cfg, d2).exit_code, kExitPass);
  EXPECT_EQ(slurp(d1 / "free_evolve.csv"), slurp(d2 / "free_evolve.csv"));
  EXPECT_EQ(slurp(d1 / "manifest.json"), slurp(d2 / "manifest.json"));
}

TEST(Run, SweepUsesChildDirectories) {
  const auto set = parse_config(R"({"experiment": "nlcs-scan", "b": 0.1, "sweep": {"b": [0.05, 0.1]}})");
  const auto dir = scratch("sweep");
  EXPECT_EQ(run_all(set, dir, 2).exit_code, kExitPass);
  EXPECT_TRUE(fs::exists(dir / "child_000" / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir / "child_001" / "manifest.json"));
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(m["children"].size(), 2u);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("cli");
  EXPECT_EQ(cli("nlcs-scan --out " + (dir / "ok").string()), 0);
  const auto bad = dir / "bad.json";
  std::ofstream(bad) << R"({"experiment": "nlcs-scan", "b": -0.1})";
  EXPECT_EQ(cli("run --config " + bad.string() + " --out " + (dir / "bad").string()), 2);
  EXPECT_TRUE(fs::exists(dir / "bad" / "manifest.json"));
  EXPECT_EQ(cli("run --out " + (dir / "none").string()), 2);
  EXPECT_EQ(cli("spectrum --config " + (fs::path(FVW_CONFIG_DIR) / "free_gaussian.json").string() + " --out " +
                (dir / "mismatch").string()),
            2);
}

TEST(Cli, NumericalFailureExitsThree) {
  const auto dir = scratch("cli3");
  const auto cfg = dir / "strict.json";
  std::ofstream(cfg) << R"({"experiment": "spectrum", "b": 0.1, "spectrum": {"tolerance": 1e-20}})";
  EXPECT_EQ(cli("run --config " + cfg.string() + " --out " + (dir / "o").string()), 3);
}
