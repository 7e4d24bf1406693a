#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "cslab/config.hpp"
#include "cslab/errors.hpp"
#include "cslab/runner.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> trajectories;
  bool quiet = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cslab::IoError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

cslab::config::RunConfig load(const std::string& subcommand, const Flags& flags) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  if (!flags.config_path.empty()) {
    try {
      doc = nlohmann::ordered_json::parse(read_file(flags.config_path));
    } catch (const nlohmann::json::parse_error& e) {
      throw cslab::ConfigError(flags.config_path + ": " + e.what());
    }
    if (!doc.is_object()) throw cslab::ConfigError(flags.config_path + ": top level must be an object");
  }
  if (doc.contains("subcommand") && doc["subcommand"] != subcommand) {
    throw cslab::ConfigError("config is for subcommand " + doc["subcommand"].dump() + ", not \"" + subcommand + "\"");
  }
  doc["subcommand"] = subcommand;
  if (flags.seed) doc["seed"] = *flags.seed;
  if (flags.out) doc["output_dir"] = *flags.out;

  auto cfg = cslab::config::parse_config(doc.dump());
  if (flags.trajectories) {
    const std::size_t n = *flags.trajectories;
    std::visit(
        [n](auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, cslab::config::CollapseParams>) p.trajectories = n;
          else if constexpr (std::is_same_v<T, cslab::config::EprParams>) p.runs = n;
          else if constexpr (std::is_same_v<T, cslab::config::FrameParams>) p.n_pairs = n;
          else if constexpr (std::is_same_v<T, cslab::config::NoiseRunParams>) p.n_channels = n;
          else throw cslab::ConfigError("--trajectories does not apply to this subcommand");
        },
        cfg.params);
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for continuous spontaneous localization"};
  app.set_version_flag("--version", cslab::cli::version());
  app.require_subcommand(1);

  Flags flags;
  const char* names[][2] = {
      {"collapse", "Collapse ensemble for a diagonal collapse operator"},
      {"epr", "EPR pair measured by a massive pointer"},
      {"frame", "Rest vs boosted apparatus driven by the same colored noise"},
      {"mott", "Angular profile of the emission amplitude"},
      {"heating", "lambda_eff sweep and bulk-heating bound report"},
      {"ordering", "Event ordering under a Lorentz boost"},
      {"noise", "Sample white or colored noise increments"},
  };
  for (const auto& [name, desc] : names) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", flags.config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "64-bit seed (overrides the config)");
    sub->add_option("--out", flags.out, "output directory (overrides the config)");
    sub->add_option("--trajectories", flags.trajectories, "trajectories / runs / pairs / channels");
    sub->add_flag("--quiet", flags.quiet, "print nothing on success");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cslab::cli::kExitConfig;
  }

  try {
    const std::string subcommand = app.get_subcommands().front()->get_name();
    const auto cfg = load(subcommand, flags);
    const auto report = cslab::cli::run(cfg);
    if (!flags.quiet) {
      std::cout << report.summary << '\n';
      std::cout << "wrote " << report.data_files.size() << " data files and manifest.txt to " << cfg.output_dir << '\n';
    }
    return cslab::cli::kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cslab::cli::exit_code(e);
  }
}
