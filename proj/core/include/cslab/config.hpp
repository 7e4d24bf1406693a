#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cslab::config {

enum class Subcommand { Collapse, Epr, Frame, Mott, Heating, Ordering, Noise };

const char* to_string(Subcommand s) noexcept;
Subcommand subcommand_from_string(std::string_view name);

/// Physical dimensions accepted in config files, each with its unit table.
enum class Dimension { Length, Time, Rate, Speed, Wavenumber, Volume };

/// Parses "<number> <unit>" into SI. Throws ConfigError naming `key` and the
/// expected dimension when the unit is missing or wrong.
double parse_quantity(std::string_view text, Dimension dim, std::string_view key);

/// "<%.17g> <SI unit>"; parse_quantity inverts it exactly.
std::string format_quantity(double value_si, Dimension dim);

struct NoiseParams {
  std::string kind = "white";  // white | gaussian
  double t_c = 0.0;            // s
  bool operator==(const NoiseParams&) const = default;
};

struct CollapseParams {
  std::vector<double> amplitudes;   // real initial amplitudes, normalized on use
  std::vector<double> eigenvalues;  // diagonal collapse operator, nucleon-number units
  std::vector<double> hamiltonian_diagonal;  // s^-1, empty for H = 0
  double lambda = 0.0;              // s^-1
  double r_c = 0.0;                 // m
  std::optional<double> cell_volume;  // m^3
  std::optional<double> gamma;        // s^-1, overrides the lambda-derived coupling
  double dt = 1e-4;                   // s
  std::size_t n_steps_max = 100000;
  std::size_t trajectories = 1000;
  std::size_t traces = 1;  // trajectories written as full trace CSVs
  NoiseParams noise;
  bool operator==(const CollapseParams&) const = default;
};

struct ApparatusParams {
  double apparatus_mass_gap = 100.0;
  double gamma = 1.0;  // s^-1
  double dt = 0.0;     // s; 0 = automatic
  std::size_t n_steps_max = 200000;
  bool operator==(const ApparatusParams&) const = default;
};

struct EprParams {
  ApparatusParams apparatus;
  std::size_t runs = 1000;
  bool operator==(const EprParams&) const = default;
};

struct FrameParams {
  ApparatusParams apparatus;
  double boost_v = 0.0;  // m/s
  double t_c = 0.0;      // s
  std::size_t n_pairs = 100;
  bool operator==(const FrameParams&) const = default;
};

struct MottParams {
  double k = 20.0;                 // 1/m
  std::array<double, 3> a{0, 0, 20};  // m
  double sigma = 1.0;              // m
  std::size_t n_angles = 32;
  std::optional<double> cos_min;
  std::size_t radial_points = 32;
  std::size_t angular_points = 32;
  double r_max_multiplier = 1.5;
  std::string form = "exact";  // exact | far_field | both
  bool operator==(const MottParams&) const = default;
};

struct HeatingParams {
  double lambda0 = 0.0;  // s^-1
  double v_s = 0.0;      // m/s
  double r_c = 0.0;      // m
  double t_c = 0.0;      // s; 0 = white
  double beta_min = 0.0;
  double beta_max = 10.0;
  std::size_t beta_points = 101;
  bool operator==(const HeatingParams&) const = default;
};

struct EventParams {
  double x = 0.0;  // m
  double t = 0.0;  // s
  bool operator==(const EventParams&) const = default;
};

struct OrderingParams {
  EventParams a, b;
  double boost_v = 0.0;  // m/s
  bool operator==(const OrderingParams&) const = default;
};

struct NoiseRunParams {
  std::string kind = "gaussian";
  double lambda0 = 1.0;  // s^-1
  double t_c = 0.0;      // s
  double r_c = 0.0;      // m
  double dt = 0.0;       // s
  std::size_t n_steps = 4096;
  std::size_t n_channels = 1;
  bool operator==(const NoiseRunParams&) const = default;
};

using Params = std::variant<CollapseParams, EprParams, FrameParams, MottParams, HeatingParams,
                            OrderingParams, NoiseRunParams>;

struct RunConfig {
  Subcommand subcommand = Subcommand::Collapse;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  Params params;
  bool operator==(const RunConfig&) const = default;
};

/// Defaults for a subcommand, filled from the stored physical constants.
Params default_params(Subcommand s);

/// JSON document:
///   { "subcommand": "collapse", "seed": 42, "output_dir": "out",
///     "collapse": { "lambda": "2e-9 1/s", "r_c": "10 cm", ... } }
/// Unknown keys, unitless physical quantities and a missing seed throw
/// ConfigError.
RunConfig parse_config(std::string_view text);

/// Canonical JSON; parse_config(serialize(c)) == c.
std::string serialize(const RunConfig& config);

}  // namespace cslab::config
