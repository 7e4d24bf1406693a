#include "cslab/config.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cctype>
#include <set>
#include <span>
#include <utility>

#include "cslab/errors.hpp"
#include "cslab/format.hpp"
#include "cslab/physconst.hpp"

namespace cslab::config {
namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

struct UnitEntry {
  std::string_view name;
  double factor;
};

std::span<const UnitEntry> units_for(Dimension dim) {
  static constexpr UnitEntry length[] = {{"m", 1.0}, {"km", 1e3}, {"cm", 1e-2}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}};
  static constexpr UnitEntry time[] = {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12}, {"fs", 1e-15}};
  static constexpr UnitEntry rate[] = {{"1/s", 1.0}, {"s^-1", 1.0}, {"Hz", 1.0}, {"1/ms", 1e3}, {"1/us", 1e6}, {"1/ns", 1e9}};
  static constexpr UnitEntry speed[] = {{"m/s", 1.0}, {"km/s", 1e3}, {"c", 299792458.0}};
  static constexpr UnitEntry wavenumber[] = {{"1/m", 1.0}, {"m^-1", 1.0}, {"1/cm", 1e2}, {"1/mm", 1e3}, {"1/um", 1e6}, {"1/nm", 1e9}};
  static constexpr UnitEntry volume[] = {{"m^3", 1.0}, {"cm^3", 1e-6}, {"mm^3", 1e-9}, {"um^3", 1e-18}, {"nm^3", 1e-27}};
  switch (dim) {
    case Dimension::Length: return length;
    case Dimension::Time: return time;
    case Dimension::Rate: return rate;
    case Dimension::Speed: return speed;
    case Dimension::Wavenumber: return wavenumber;
    case Dimension::Volume: return volume;
  }
  return {};
}

const char* dimension_name(Dimension dim) {
  switch (dim) {
    case Dimension::Length: return "length (m, cm, ...)";
    case Dimension::Time: return "time (s, ms, ...)";
    case Dimension::Rate: return "rate (1/s, Hz, ...)";
    case Dimension::Speed: return "speed (m/s, km/s, c)";
    case Dimension::Wavenumber: return "wavenumber (1/m, 1/cm, ...)";
    case Dimension::Volume: return "volume (m^3, cm^3, ...)";
  }
  return "?";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Strict reader for one JSON object; remembers which keys were consumed.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  double quantity(const std::string& key, Dimension dim, double fallback) {
    if (!has(key)) return fallback;
    return quantity_of(raw(key), dim, key_path(key));
  }

  std::optional<double> optional_quantity(const std::string& key, Dimension dim) {
    if (!has(key)) return std::nullopt;
    return quantity_of(raw(key), dim, key_path(key));
  }

  std::vector<double> quantity_list(const std::string& key, Dimension dim, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(key_path(key) + ": expected an array of " + dimension_name(dim) + " quantities");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(quantity_of(v[i], dim, key_path(key) + "[" + std::to_string(i) + "]"));
    return out;
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(key_path(key) + ": expected a dimensionless number");
    return v.get<double>();
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key, 0.0);
  }

  std::vector<double> number_list(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(key_path(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(key_path(key) + ": expected an array of dimensionless numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_unsigned()) throw ConfigError(key_path(key) + ": expected a non-negative integer");
    return v.get<std::size_t>();
  }

  std::string choice(const std::string& key, std::string fallback, std::initializer_list<std::string_view> allowed) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(key_path(key) + ": expected a string");
    std::string s = v.get<std::string>();
    if (std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
      std::string list;
      for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
      throw ConfigError(key_path(key) + ": \"" + s + "\" is not one of " + list);
    }
    return s;
  }

  Section child(const std::string& key) { return Section(raw(key), key_path(key)); }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.contains(key)) throw ConfigError(key_path(key) + ": unknown key");
    }
  }

 private:
  static double quantity_of(const json& v, Dimension dim, const std::string& path) {
    if (!v.is_string()) {
      throw ConfigError(path + ": physical quantity needs an explicit unit, expected " + dimension_name(dim) +
                        ", e.g. \"1.5 " + std::string(units_for(dim)[0].name) + "\"");
    }
    return parse_quantity(v.get<std::string>(), dim, path);
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

ApparatusParams read_apparatus(Section s, ApparatusParams d) {
  d.apparatus_mass_gap = s.number("apparatus_mass_gap", d.apparatus_mass_gap);
  d.gamma = s.quantity("gamma", Dimension::Rate, d.gamma);
  d.dt = s.quantity("dt", Dimension::Time, d.dt);
  d.n_steps_max = s.count("n_steps_max", d.n_steps_max);
  s.finish();
  return d;
}

EventParams read_event(Section s) {
  EventParams e;
  e.x = s.quantity("x", Dimension::Length, 0.0);
  e.t = s.quantity("t", Dimension::Time, 0.0);
  s.finish();
  return e;
}

Params read_params(Subcommand sub, Section s) {
  Params params = default_params(sub);
  std::visit(
      [&](auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CollapseParams>) {
          p.amplitudes = s.number_list("amplitudes", p.amplitudes);
          p.eigenvalues = s.number_list("eigenvalues", p.eigenvalues);
          p.hamiltonian_diagonal = s.quantity_list("hamiltonian_diagonal", Dimension::Rate, p.hamiltonian_diagonal);
          p.lambda = s.quantity("lambda", Dimension::Rate, p.lambda);
          p.r_c = s.quantity("r_c", Dimension::Length, p.r_c);
          p.cell_volume = s.optional_quantity("cell_volume", Dimension::Volume);
          p.gamma = s.optional_quantity("gamma", Dimension::Rate);
          p.dt = s.quantity("dt", Dimension::Time, p.dt);
          p.n_steps_max = s.count("n_steps_max", p.n_steps_max);
          p.trajectories = s.count("trajectories", p.trajectories);
          p.traces = s.count("traces", p.traces);
          if (s.has("noise")) {
            Section n = s.child("noise");
            p.noise.kind = n.choice("kind", p.noise.kind, {"white", "gaussian"});
            p.noise.t_c = n.quantity("t_c", Dimension::Time, p.noise.t_c);
            n.finish();
          }
        } else if constexpr (std::is_same_v<T, EprParams>) {
          if (s.has("apparatus")) p.apparatus = read_apparatus(s.child("apparatus"), p.apparatus);
          p.runs = s.count("runs", p.runs);
        } else if constexpr (std::is_same_v<T, FrameParams>) {
          if (s.has("apparatus")) p.apparatus = read_apparatus(s.child("apparatus"), p.apparatus);
          p.boost_v = s.quantity("boost_v", Dimension::Speed, p.boost_v);
          p.t_c = s.quantity("t_c", Dimension::Time, p.t_c);
          p.n_pairs = s.count("n_pairs", p.n_pairs);
        } else if constexpr (std::is_same_v<T, MottParams>) {
          p.k = s.quantity("k", Dimension::Wavenumber, p.k);
          if (s.has("a")) {
            const auto a = s.quantity_list("a", Dimension::Length, {});
            if (a.size() != 3) throw ConfigError(s.key_path("a") + ": expected three length components");
            std::copy(a.begin(), a.end(), p.a.begin());
          }
          p.sigma = s.quantity("sigma", Dimension::Length, p.sigma);
          p.n_angles = s.count("n_angles", p.n_angles);
          p.cos_min = s.optional_number("cos_min");
          p.radial_points = s.count("radial_points", p.radial_points);
          p.angular_points = s.count("angular_points", p.angular_points);
          p.r_max_multiplier = s.number("r_max_multiplier", p.r_max_multiplier);
          p.form = s.choice("form", p.form, {"exact", "far_field", "both"});
        } else if constexpr (std::is_same_v<T, HeatingParams>) {
          p.lambda0 = s.quantity("lambda0", Dimension::Rate, p.lambda0);
          p.v_s = s.quantity("v_s", Dimension::Speed, p.v_s);
          p.r_c = s.quantity("r_c", Dimension::Length, p.r_c);
          p.t_c = s.quantity("t_c", Dimension::Time, p.t_c);
          p.beta_min = s.number("beta_min", p.beta_min);
          p.beta_max = s.number("beta_max", p.beta_max);
          p.beta_points = s.count("beta_points", p.beta_points);
        } else if constexpr (std::is_same_v<T, OrderingParams>) {
          if (s.has("event_a")) p.a = read_event(s.child("event_a"));
          if (s.has("event_b")) p.b = read_event(s.child("event_b"));
          p.boost_v = s.quantity("boost_v", Dimension::Speed, p.boost_v);
        } else if constexpr (std::is_same_v<T, NoiseRunParams>) {
          p.kind = s.choice("kind", p.kind, {"white", "gaussian"});
          p.lambda0 = s.quantity("lambda0", Dimension::Rate, p.lambda0);
          p.t_c = s.quantity("t_c", Dimension::Time, p.t_c);
          p.r_c = s.quantity("r_c", Dimension::Length, p.r_c);
          p.dt = s.quantity("dt", Dimension::Time, p.dt);
          p.n_steps = s.count("n_steps", p.n_steps);
          p.n_channels = s.count("n_channels", p.n_channels);
        }
      },
      params);
  s.finish();
  return params;
}

ordered write_apparatus(const ApparatusParams& a) {
  ordered j;
  j["apparatus_mass_gap"] = a.apparatus_mass_gap;
  j["gamma"] = format_quantity(a.gamma, Dimension::Rate);
  j["dt"] = format_quantity(a.dt, Dimension::Time);
  j["n_steps_max"] = a.n_steps_max;
  return j;
}

ordered write_event(const EventParams& e) {
  ordered j;
  j["x"] = format_quantity(e.x, Dimension::Length);
  j["t"] = format_quantity(e.t, Dimension::Time);
  return j;
}

ordered write_params(const Params& params) {
  ordered j = ordered::object();
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        auto quantities = [](const std::vector<double>& v, Dimension d) {
          ordered a = ordered::array();
          for (double x : v) a.push_back(format_quantity(x, d));
          return a;
        };
        if constexpr (std::is_same_v<T, CollapseParams>) {
          j["amplitudes"] = p.amplitudes;
          j["eigenvalues"] = p.eigenvalues;
          j["hamiltonian_diagonal"] = quantities(p.hamiltonian_diagonal, Dimension::Rate);
          j["lambda"] = format_quantity(p.lambda, Dimension::Rate);
          j["r_c"] = format_quantity(p.r_c, Dimension::Length);
          if (p.cell_volume) j["cell_volume"] = format_quantity(*p.cell_volume, Dimension::Volume);
          if (p.gamma) j["gamma"] = format_quantity(*p.gamma, Dimension::Rate);
          j["dt"] = format_quantity(p.dt, Dimension::Time);
          j["n_steps_max"] = p.n_steps_max;
          j["trajectories"] = p.trajectories;
          j["traces"] = p.traces;
          j["noise"] = ordered{{"kind", p.noise.kind}, {"t_c", format_quantity(p.noise.t_c, Dimension::Time)}};
        } else if constexpr (std::is_same_v<T, EprParams>) {
          j["apparatus"] = write_apparatus(p.apparatus);
          j["runs"] = p.runs;
        } else if constexpr (std::is_same_v<T, FrameParams>) {
          j["apparatus"] = write_apparatus(p.apparatus);
          j["boost_v"] = format_quantity(p.boost_v, Dimension::Speed);
          j["t_c"] = format_quantity(p.t_c, Dimension::Time);
          j["n_pairs"] = p.n_pairs;
        } else if constexpr (std::is_same_v<T, MottParams>) {
          j["k"] = format_quantity(p.k, Dimension::Wavenumber);
          j["a"] = quantities({p.a.begin(), p.a.end()}, Dimension::Length);
          j["sigma"] = format_quantity(p.sigma, Dimension::Length);
          j["n_angles"] = p.n_angles;
          if (p.cos_min) j["cos_min"] = *p.cos_min;
          j["radial_points"] = p.radial_points;
          j["angular_points"] = p.angular_points;
          j["r_max_multiplier"] = p.r_max_multiplier;
          j["form"] = p.form;
        } else if constexpr (std::is_same_v<T, HeatingParams>) {
          j["lambda0"] = format_quantity(p.lambda0, Dimension::Rate);
          j["v_s"] = format_quantity(p.v_s, Dimension::Speed);
          j["r_c"] = format_quantity(p.r_c, Dimension::Length);
          j["t_c"] = format_quantity(p.t_c, Dimension::Time);
          j["beta_min"] = p.beta_min;
          j["beta_max"] = p.beta_max;
          j["beta_points"] = p.beta_points;
        } else if constexpr (std::is_same_v<T, OrderingParams>) {
          j["event_a"] = write_event(p.a);
          j["event_b"] = write_event(p.b);
          j["boost_v"] = format_quantity(p.boost_v, Dimension::Speed);
        } else if constexpr (std::is_same_v<T, NoiseRunParams>) {
          j["kind"] = p.kind;
          j["lambda0"] = format_quantity(p.lambda0, Dimension::Rate);
          j["t_c"] = format_quantity(p.t_c, Dimension::Time);
          j["r_c"] = format_quantity(p.r_c, Dimension::Length);
          j["dt"] = format_quantity(p.dt, Dimension::Time);
          j["n_steps"] = p.n_steps;
          j["n_channels"] = p.n_channels;
        }
      },
      params);
  return j;
}

}  // namespace

const char* to_string(Subcommand s) noexcept {
  switch (s) {
    case Subcommand::Collapse: return "collapse";
    case Subcommand::Epr: return "epr";
    case Subcommand::Frame: return "frame";
    case Subcommand::Mott: return "mott";
    case Subcommand::Heating: return "heating";
    case Subcommand::Ordering: return "ordering";
    case Subcommand::Noise: return "noise";
  }
  return "?";
}

Subcommand subcommand_from_string(std::string_view name) {
  for (auto s : {Subcommand::Collapse, Subcommand::Epr, Subcommand::Frame, Subcommand::Mott, Subcommand::Heating,
                 Subcommand::Ordering, Subcommand::Noise}) {
    if (name == to_string(s)) return s;
  }
  throw ConfigError("unknown subcommand \"" + std::string(name) + "\"");
}

double parse_quantity(std::string_view text, Dimension dim, std::string_view key) {
  const std::string where(key);
  const std::string_view t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || !std::isfinite(value)) {
    throw ConfigError(where + ": cannot read a number from \"" + std::string(text) + "\"");
  }
  const std::string_view unit = trim(t.substr(static_cast<std::size_t>(ptr - t.data())));
  if (unit.empty()) {
    throw ConfigError(where + ": missing unit, expected " + dimension_name(dim));
  }
  for (const auto& u : units_for(dim)) {
    if (u.name == unit) return value * u.factor;
  }
  throw ConfigError(where + ": unit \"" + std::string(unit) + "\" is not a " + dimension_name(dim));
}

std::string format_quantity(double value_si, Dimension dim) {
  return fmt17(value_si) + " " + std::string(units_for(dim)[0].name);
}

Params default_params(Subcommand s) {
  const auto& k = constants();
  switch (s) {
    case Subcommand::Collapse: {
      CollapseParams p;
      p.amplitudes = {std::sqrt(0.3), std::sqrt(0.7)};
      p.eigenvalues = {1.0, -1.0};
      p.lambda = k.lambda_csl_central;
      p.r_c = k.r_c_standard;
      return p;
    }
    case Subcommand::Epr: return EprParams{};
    case Subcommand::Frame: {
      FrameParams p;
      p.apparatus.apparatus_mass_gap = 10.0;
      p.apparatus.n_steps_max = 100000;
      p.boost_v = 0.9 * k.c;
      p.t_c = 0.02;
      return p;
    }
    case Subcommand::Mott: return MottParams{};
    case Subcommand::Heating: {
      HeatingParams p;
      p.lambda0 = k.lambda_csl_central;
      p.v_s = k.v_sound_default;
      p.r_c = k.r_c_standard;
      return p;
    }
    case Subcommand::Ordering: {
      OrderingParams p;
      p.b = {2.0 * k.c, 1.0};
      p.boost_v = 0.6 * k.c;
      return p;
    }
    case Subcommand::Noise: {
      NoiseRunParams p;
      p.t_c = 0.01;
      p.dt = 1e-3;
      p.r_c = k.r_c_standard;
      return p;
    }
  }
  throw ConfigError("unknown subcommand");
}

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  Section top(doc, "");
  RunConfig cfg;
  if (!top.has("subcommand")) throw ConfigError("subcommand: required key missing");
  const json& sub = top.raw("subcommand");
  if (!sub.is_string()) throw ConfigError("subcommand: expected a string");
  cfg.subcommand = subcommand_from_string(sub.get<std::string>());

  if (!top.has("seed")) throw ConfigError("seed: required key missing (seeds are never auto-generated)");
  const json& seed = top.raw("seed");
  if (!seed.is_number_unsigned()) throw ConfigError("seed: expected an unsigned 64-bit integer");
  cfg.seed = seed.get<std::uint64_t>();

  if (top.has("output_dir")) {
    const json& out = top.raw("output_dir");
    if (!out.is_string() || out.get<std::string>().empty()) throw ConfigError("output_dir: expected a non-empty path");
    cfg.output_dir = out.get<std::string>();
  }

  const std::string section = to_string(cfg.subcommand);
  if (top.has(section)) {
    cfg.params = read_params(cfg.subcommand, top.child(section));
  } else {
    cfg.params = default_params(cfg.subcommand);
  }
  top.finish();
  return cfg;
}

std::string serialize(const RunConfig& cfg) {
  ordered j;
  j["subcommand"] = to_string(cfg.subcommand);
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  j[to_string(cfg.subcommand)] = write_params(cfg.params);
  return j.dump(2) + "\n";
}

}  // namespace cslab::config
