#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cslab/config.hpp"
#include "cslab/errors.hpp"
#include "cslab/runner.hpp"
#include "json.hpp"

using namespace cslab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

config::RunConfig load(const std::string& name, const fs::path& out) {
  auto c = config::parse_config(slurp(fs::path(CSLAB_FIXTURE_DIR) / name));
  c.output_dir = out.string();
  return c;
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("cslab_runner_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(cli::exit_code(ConfigError("x")), cli::kExitConfig);
  EXPECT_EQ(cli::exit_code(InvalidInput("x")), cli::kExitInvalidInput);
  EXPECT_EQ(cli::exit_code(InvalidBoost("x")), cli::kExitInvalidInput);
  EXPECT_EQ(cli::exit_code(ContractViolation("x")), cli::kExitInvalidInput);
  EXPECT_EQ(cli::exit_code(CapacityError("x")), cli::kExitInvalidInput);
  EXPECT_EQ(cli::exit_code(UnsupportedQuery("x")), cli::kExitInvalidInput);
  EXPECT_EQ(cli::exit_code(StepSizeError("x")), cli::kExitNumerical);
  EXPECT_EQ(cli::exit_code(QuadratureError("x")), cli::kExitNumerical);
  EXPECT_EQ(cli::exit_code(IoError("x")), cli::kExitIo);
  EXPECT_EQ(cli::exit_code(std::runtime_error("x")), cli::kExitOther);
}

TEST(Runner, OrderingFixtureReportsInversion) {
  const auto dir = scratch("ordering");
  const auto report = cli::run(load("ordering_inverted.json", dir));
  const auto j = nlohmann::json::parse(slurp(dir / "ordering.json"));
  EXPECT_EQ(j["ordering"], "Inverted");
  EXPECT_NEAR(j["delta_t_boosted"].get<double>(), -0.25, 1e-12);
  EXPECT_NEAR(j["v_MIN"].get<double>(), 0.5 * 299792458.0, 1e-3);
  EXPECT_NE(report.summary.find("Inverted"), std::string::npos);
}

TEST(Runner, ManifestAndConfigEcho) {
  const auto dir = scratch("manifest");
  const auto cfg = load("collapse_minimal.json", dir);
  auto c = cfg;
  auto& p = std::get<config::CollapseParams>(c.params);
  p.trajectories = 20;
  p.gamma = 1.0;
  p.dt = 2.5e-4;
  const auto report = cli::run(c);
  const auto manifest = slurp(dir / "manifest.txt");
  for (auto key : {"cslab_version", "subcommand", "seed", "config_hash", "timestamp"})
    EXPECT_NE(manifest.find(key), std::string::npos) << key;
  EXPECT_NE(manifest.find(cli::version()), std::string::npos);
  for (const auto& f : report.data_files) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
    EXPECT_NE(manifest.find(f), std::string::npos) << f;
  }
  EXPECT_EQ(config::parse_config(slurp(dir / "config.json")), c);
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_EQ(summary["n_traj"], 20);
  EXPECT_EQ(slurp(dir / "outcomes.csv").substr(0, 10), "trajectory");
}

TEST(Runner, RerunsAreByteIdentical) {
  for (auto name : {"collapse_minimal.json", "noise_colored.json", "heating.json"}) {
    const auto d1 = scratch("rerun1"), d2 = scratch("rerun2");
    auto c1 = load(name, d1), c2 = load(name, d2);
    if (auto* p = std::get_if<config::CollapseParams>(&c1.params)) {
      p->trajectories = 16;
      p->gamma = 1.0;
      p->dt = 2.5e-4;
      std::get<config::CollapseParams>(c2.params) = *p;
    }
    const auto r1 = cli::run(c1), r2 = cli::run(c2);
    ASSERT_EQ(r1.data_files, r2.data_files);
    for (const auto& f : r1.data_files) {
      if (f == "config.json") continue;  // echoes output_dir
      EXPECT_EQ(slurp(d1 / f), slurp(d2 / f)) << name << ": " << f;
    }
  }
}

TEST(Runner, InvalidParametersSurfaceAsLibraryErrors) {
  auto c = load("ordering_inverted.json", scratch("bad"));
  std::get<config::OrderingParams>(c.params).boost_v = 2 * 299792458.0;
  try {
    cli::run(c);
    FAIL();
  } catch (const std::exception& e) {
    EXPECT_EQ(cli::exit_code(e), cli::kExitInvalidInput);
  }
}
