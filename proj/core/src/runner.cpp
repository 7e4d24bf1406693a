#include "cslab/runner.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "cslab/csl_dynamics.hpp"
#include "cslab/errors.hpp"
#include "cslab/format.hpp"
#include "cslab/heating.hpp"
#include "cslab/mott.hpp"
#include "cslab/noise.hpp"
#include "cslab/physconst.hpp"
#include "cslab/relativity.hpp"
#include "cslab/rng.hpp"
#include "cslab/scenarios.hpp"

#ifndef CSLAB_VERSION
#define CSLAB_VERSION "unknown"
#endif

namespace cslab::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// nlohmann prints shortest round-trip doubles; data files use %.17g.
void emit(const Json& j, std::ostream& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out << ",\n";
        first = false;
        out << pad << Json(key).dump() << ": ";
        emit(value, out, indent + 2);
      }
      out << '\n' << close << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << ",\n";
        out << pad;
        emit(j[i], out, indent + 2);
      }
      out << '\n' << close << ']';
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out << (std::isfinite(v) ? fmt17(v) : "null");
      return;
    }
    default:
      out << j.dump();
  }
}

class OutputDir {
 public:
  explicit OutputDir(const std::string& path) : root_(path) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec || !fs::is_directory(root_)) throw IoError("cannot create output directory " + path + ": " + ec.message());
  }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    const fs::path p = root_ / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + p.string() + " for writing");
    body(out);
    out.flush();
    if (!out) throw IoError("write failed for " + p.string());
    files_.push_back(name);
  }

  void write_json(const std::string& name, const Json& j) {
    write(name, [&](std::ostream& out) {
      emit(j, out, 0);
      out << '\n';
    });
  }

  const fs::path& root() const { return root_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path root_;
  std::vector<std::string> files_;
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string run_collapse(const config::RunConfig& rc, const config::CollapseParams& p, OutputDir& out) {
  const std::size_t dim = p.eigenvalues.size();
  if (dim < 2) throw InvalidInput("collapse: need at least two eigenvalues");
  if (p.amplitudes.size() != dim) throw InvalidInput("collapse: amplitudes and eigenvalues differ in length");
  if (!p.hamiltonian_diagonal.empty() && p.hamiltonian_diagonal.size() != dim) {
    throw InvalidInput("collapse: hamiltonian_diagonal must match the eigenvalue count");
  }

  dynamics::CSLConfig cfg;
  cfg.hamiltonian = p.hamiltonian_diagonal.empty() ? DenseOperator::zero(dim)
                                                   : DenseOperator::diagonal(std::span<const double>(p.hamiltonian_diagonal));
  cfg.collapse_ops = {DenseOperator::diagonal(std::span<const double>(p.eigenvalues))};
  cfg.gamma_csl = p.gamma ? *p.gamma : dynamics::effective_coupling(p.lambda, p.r_c, p.cell_volume);
  cfg.dt = p.dt;
  cfg.n_steps_max = p.n_steps_max;

  std::vector<Complex> amps(p.amplitudes.begin(), p.amplitudes.end());
  const ComplexStateVector psi0 = ComplexStateVector(std::move(amps)).normalized();
  const dynamics::NoiseModel noise =
      p.noise.kind == "white" ? dynamics::NoiseModel::white() : dynamics::NoiseModel::colored(p.noise.t_c);

  const auto stats = dynamics::run_ensemble(cfg, psi0, noise, p.trajectories, rc.seed);
  out.write("outcomes.csv", [&](std::ostream& os) { dynamics::write_outcomes_csv(stats, os); });

  const std::size_t n_traces = std::min(p.traces, p.trajectories);
  for (std::size_t i = 0; i < n_traces; ++i) {
    const auto rec = dynamics::run_trajectory(cfg, psi0, noise, derive_seed(rc.seed, i));
    out.write("trace_" + std::to_string(i) + ".csv", [&](std::ostream& os) { dynamics::write_trace_csv(rec, os); });
  }

  Json counts = Json::object(), freqs = Json::object(), born = Json::object();
  for (const auto& [k, n] : stats.outcome_counts) {
    const std::string key = k == dynamics::kUndecided ? "undecided" : std::to_string(k);
    counts[key] = n;
    freqs[key] = stats.frequency(k);
  }
  for (const auto& [k, prob] : stats.born_probabilities) born[std::to_string(k)] = prob;
  Json s;
  s["n_traj"] = stats.n_traj;
  s["gamma_csl"] = cfg.gamma_csl;
  s["dt"] = cfg.dt;
  s["noise"] = p.noise.kind;
  s["outcome_counts"] = counts;
  s["frequencies"] = freqs;
  s["born_probabilities"] = born;
  s["mean_collapse_time"] = stats.mean_collapse_time;
  s["max_norm_drift"] = stats.max_norm_drift;
  out.write_json("summary.json", s);

  std::ostringstream line;
  line << "collapse: " << stats.n_traj << " trajectories, P(0) = " << fmt17(stats.frequency(0))
       << " (Born " << fmt17(stats.born_probabilities.count(0) ? stats.born_probabilities.at(0) : 0.0) << ")";
  return line.str();
}

scenarios::EPRSetup setup_from(const config::ApparatusParams& a) {
  scenarios::EPRSetup s;
  s.apparatus_mass_gap = a.apparatus_mass_gap;
  s.gamma = a.gamma;
  s.dt = a.dt;
  s.n_steps_max = a.n_steps_max;
  return s;
}

std::string run_epr(const config::RunConfig& rc, const config::EprParams& p, OutputDir& out) {
  const auto runs = scenarios::run_epr_ensemble(setup_from(p.apparatus), p.runs, rc.seed);
  out.write("epr_runs.csv", [&](std::ostream& os) { scenarios::write_epr_csv(runs, os); });

  std::size_t completed = 0, anti = 0, up = 0;
  double t_sum = 0.0;
  for (const auto& r : runs) {
    if (r.outcome == scenarios::Outcome::Undecided) continue;
    ++completed;
    if (r.a_spin != 0 && r.a_spin == -r.b_spin) ++anti;
    if (r.outcome == scenarios::Outcome::Up) ++up;
    t_sum += r.collapse_time;
  }
  Json s;
  s["runs"] = runs.size();
  s["completed"] = completed;
  s["anticorrelated"] = anti;
  s["anticorrelated_fraction"] = completed ? static_cast<double>(anti) / static_cast<double>(completed) : 0.0;
  s["up_fraction"] = completed ? static_cast<double>(up) / static_cast<double>(completed) : 0.0;
  s["mean_collapse_time"] = completed ? t_sum / static_cast<double>(completed) : 0.0;
  out.write_json("summary.json", s);
  return "epr: " + std::to_string(anti) + "/" + std::to_string(completed) + " completed runs anti-correlated";
}

Json outcome_stats(const std::map<scenarios::Outcome, std::size_t>& m) {
  Json j;
  for (auto o : {scenarios::Outcome::Up, scenarios::Outcome::Down, scenarios::Outcome::Undecided}) {
    j[scenarios::to_string(o)] = m.count(o) ? m.at(o) : 0;
  }
  return j;
}

std::string run_frame(const config::RunConfig& rc, const config::FrameParams& p, OutputDir& out) {
  scenarios::FrameComparison cmp;
  cmp.boost_v = p.boost_v;
  cmp.base_seed = rc.seed;
  cmp.n_pairs = p.n_pairs;
  cmp.spectrum = noise::NoiseSpectrum::gaussian_cutoff(1.0, p.t_c);
  cmp.apparatus = setup_from(p.apparatus);
  const auto res = scenarios::frame_experiment(cmp);
  out.write("pairs.csv", [&](std::ostream& os) { scenarios::write_pairs_csv(res, os); });

  const auto up = [](const auto& m) {
    return static_cast<double>(m.count(scenarios::Outcome::Up) ? m.at(scenarios::Outcome::Up) : 0);
  };
  const auto decided = [](const auto& m) {
    std::size_t n = 0;
    for (const auto& [o, c] : m) n += o == scenarios::Outcome::Undecided ? 0 : c;
    return static_cast<double>(n);
  };
  const double n1 = decided(res.stats_rest), n2 = decided(res.stats_boosted);
  double z = 0.0;
  if (n1 > 0 && n2 > 0) {
    const double p1 = up(res.stats_rest) / n1, p2 = up(res.stats_boosted) / n2;
    const double pool = (up(res.stats_rest) + up(res.stats_boosted)) / (n1 + n2);
    const double se = std::sqrt(pool * (1.0 - pool) * (1.0 / n1 + 1.0 / n2));
    z = se > 0.0 ? (p1 - p2) / se : 0.0;
  }
  Json s;
  s["boost_v"] = p.boost_v;
  s["gamma"] = res.gamma;
  s["t_c"] = p.t_c;
  s["boosted_t_c"] = res.boosted_t_c;
  s["n_pairs"] = res.pairs.size();
  s["n_divergent_outcomes"] = res.n_divergent_outcomes;
  s["n_undecided"] = res.n_undecided;
  s["stats_rest"] = outcome_stats(res.stats_rest);
  s["stats_boosted"] = outcome_stats(res.stats_boosted);
  s["histogram_z"] = z;
  out.write_json("frame_summary.json", s);
  return "frame: " + std::to_string(res.n_divergent_outcomes) + " divergent outcomes in " +
         std::to_string(res.pairs.size()) + " pairs";
}

std::string run_mott(const config::RunConfig&, const config::MottParams& p, OutputDir& out) {
  mott::MottConfig cfg;
  cfg.k = p.k;
  cfg.a = p.a;
  cfg.sigma = p.sigma;
  cfg.quadrature = {p.radial_points, p.angular_points, p.r_max_multiplier};
  cfg.validate();

  Json s;
  s["k_sigma"] = cfg.k * cfg.sigma;
  s["a_over_sigma"] = cfg.a_norm() / cfg.sigma;
  std::string line = "mott:";
  auto profile = [&](mott::PhaseForm form, const std::string& file, const std::string& key) {
    const auto prof = mott::angular_profile(cfg, p.n_angles, p.cos_min, form);
    out.write(file, [&](std::ostream& os) { mott::write_profile_csv(prof, os); });
    Json j;
    j["peak_cos_theta"] = prof.peak_cos_theta;
    j["half_width"] = prof.half_width ? Json(*prof.half_width) : Json(nullptr);
    s[key] = j;
    line += " " + key + " half-width " + (prof.half_width ? fmt17(*prof.half_width) : std::string("n/a"));
  };
  if (p.form != "far_field") profile(mott::PhaseForm::Exact, "profile.csv", "exact");
  if (p.form != "exact") profile(mott::PhaseForm::FarField, "profile_far_field.csv", "far_field");

  const auto axis = cfg.a_hat();
  const Complex fe = mott::amplitude_exact(cfg, axis);
  const Complex fa = mott::amplitude_approx(cfg, axis);
  s["forward_amplitude_exact"] = {fe.real(), fe.imag()};
  s["forward_amplitude_far_field"] = {fa.real(), fa.imag()};
  s["forward_ratio"] = std::abs(fe) / std::abs(fa);
  out.write_json("mott.json", s);
  return line;
}

std::string run_heating(const config::RunConfig&, const config::HeatingParams& p, OutputDir& out) {
  if (p.beta_points < 2) throw InvalidInput("heating: beta_points must be >= 2");
  if (!(p.beta_min >= 0.0 && p.beta_max > p.beta_min)) throw InvalidInput("heating: need 0 <= beta_min < beta_max");
  const heating::PhononDispersion disp{p.v_s};
  std::vector<double> betas(p.beta_points);
  for (std::size_t i = 0; i < betas.size(); ++i) {
    betas[i] = p.beta_min + (p.beta_max - p.beta_min) * static_cast<double>(i) / static_cast<double>(betas.size() - 1);
  }
  const auto points = heating::sweep(p.lambda0, disp, p.r_c, betas);
  out.write("sweep.csv", [&](std::ostream& os) { heating::write_sweep_csv(points, os); });

  const auto spectrum = p.t_c == 0.0 ? noise::NoiseSpectrum::white(p.lambda0, p.r_c)
                                     : noise::NoiseSpectrum::gaussian_cutoff(p.lambda0, p.t_c, p.r_c);
  const auto r = heating::lambda_eff(spectrum, disp);
  const auto bound = heating::bound_check(r, disp, p.r_c);
  const auto& k = constants();
  Json s;
  s["lambda0"] = p.lambda0;
  s["v_s"] = p.v_s;
  s["r_c"] = p.r_c;
  s["t_c"] = p.t_c;
  s["beta"] = r.beta;
  s["lambda_eff"] = r.lambda_eff;
  s["closed_form"] = *r.closed_form;
  s["quadrature_error_estimate"] = r.quadrature_error_estimate;
  s["bulk_heating_bound"] = k.bulk_heating_bound;
  s["bulk_ok"] = bound.bulk_ok;
  s["cutoff_frequency"] = bound.cutoff_frequency;
  s["phonon_cutoff_estimate"] = k.phonon_cutoff_estimate;
  s["threshold_beta"] = heating::threshold_beta(p.lambda0, k.bulk_heating_bound);
  out.write_json("heating.json", s);
  return "heating: lambda_eff = " + fmt17(r.lambda_eff) + " 1/s, bulk_ok = " + (bound.bulk_ok ? "true" : "false");
}

std::string run_ordering(const config::RunConfig&, const config::OrderingParams& p, OutputDir& out) {
  const relativity::Event a{p.a.x, p.a.t}, b{p.b.x, p.b.t};
  const relativity::Boost boost(p.boost_v);
  const auto v_ab = relativity::effective_velocity(a, b);
  const auto order = relativity::time_order(a, b, boost);
  const double c = constants().c;

  Json s;
  if (const double* v = std::get_if<double>(&v_ab)) {
    s["v_AB"] = *v;
    s["v_AB_over_c"] = *v / c;
    s["v_AB_infinite"] = false;
  } else {
    s["v_AB"] = nullptr;
    s["v_AB_over_c"] = nullptr;
    s["v_AB_infinite"] = true;
  }
  s["boost_v"] = boost.v();
  s["gamma"] = boost.gamma();
  s["delta_t_rest"] = b.t - a.t;
  s["delta_t_boosted"] = order.delta_t_boosted;
  s["ordering"] = relativity::to_string(order.ordering);
  try {
    const double vmin = relativity::min_inversion_boost(a, b);
    s["v_MIN"] = vmin;
    s["v_MIN_over_c"] = vmin / c;
  } catch (const NoInversionPossible&) {
    s["v_MIN"] = nullptr;
    s["v_MIN_over_c"] = nullptr;
  }
  out.write_json("ordering.json", s);
  return std::string("ordering: ") + relativity::to_string(order.ordering);
}

std::string run_noise(const config::RunConfig& rc, const config::NoiseRunParams& p, OutputDir& out) {
  if (p.n_channels == 0 || p.n_steps == 0) throw InvalidInput("noise: n_channels and n_steps must be positive");
  noise::NoiseTrajectory traj;
  if (p.kind == "white") {
    traj = noise::sample_white(p.n_channels, p.n_steps, p.dt, rc.seed);
    const double scale = std::sqrt(p.lambda0);
    for (auto& x : traj.increments) x *= scale;
  } else {
    traj = noise::sample_colored(noise::NoiseSpectrum::gaussian_cutoff(p.lambda0, p.t_c, p.r_c), p.n_channels,
                                 p.n_steps, p.dt, rc.seed);
  }
  out.write("noise.csv", [&](std::ostream& os) { noise::write_csv(traj, os); });

  const std::size_t max_lag = std::min<std::size_t>(8, p.n_steps - 1);
  Json lags = Json::array(), empirical = Json::array(), expected = Json::array();
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t c = 0; c < traj.n_channels; ++c) {
      for (std::size_t s = 0; s + lag < traj.n_steps; ++s, ++n) acc += traj.increment(c, s) * traj.increment(c, s + lag);
    }
    lags.push_back(lag);
    empirical.push_back(acc / static_cast<double>(n));
    expected.push_back(p.kind == "white" ? (lag == 0 ? p.lambda0 * p.dt : 0.0)
                                         : noise::increment_covariance(
                                               noise::NoiseSpectrum::gaussian_cutoff(p.lambda0, p.t_c, p.r_c), p.dt, lag));
  }
  Json s;
  s["kind"] = p.kind;
  s["dt"] = p.dt;
  s["n_steps"] = traj.n_steps;
  s["n_channels"] = traj.n_channels;
  s["lags"] = lags;
  s["empirical_covariance"] = empirical;
  s["expected_covariance"] = expected;
  out.write_json("noise_summary.json", s);
  return "noise: " + std::to_string(traj.n_channels) + " x " + std::to_string(traj.n_steps) + " increments";
}

}  // namespace

int exit_code(const std::exception& e) noexcept {
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const InvalidInput*>(&e) || dynamic_cast<const ContractViolation*>(&e) ||
      dynamic_cast<const CapacityError*>(&e) || dynamic_cast<const UnsupportedQuery*>(&e)) {
    return kExitInvalidInput;
  }
  if (dynamic_cast<const NumericalError*>(&e)) return kExitNumerical;
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  return kExitOther;
}

const char* version() noexcept { return CSLAB_VERSION; }

RunReport run(const config::RunConfig& rc) {
  OutputDir out(rc.output_dir);
  const std::string canonical = config::serialize(rc);
  out.write("config.json", [&](std::ostream& os) { os << canonical; });

  RunReport report;
  report.summary = std::visit(
      [&](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, config::CollapseParams>) return run_collapse(rc, p, out);
        else if constexpr (std::is_same_v<T, config::EprParams>) return run_epr(rc, p, out);
        else if constexpr (std::is_same_v<T, config::FrameParams>) return run_frame(rc, p, out);
        else if constexpr (std::is_same_v<T, config::MottParams>) return run_mott(rc, p, out);
        else if constexpr (std::is_same_v<T, config::HeatingParams>) return run_heating(rc, p, out);
        else if constexpr (std::is_same_v<T, config::OrderingParams>) return run_ordering(rc, p, out);
        else return run_noise(rc, p, out);
      },
      rc.params);
  report.data_files = out.files();

  std::ofstream m(out.root() / "manifest.txt", std::ios::binary | std::ios::trunc);
  if (!m) throw IoError("cannot write manifest.txt");
  m << "cslab_version: " << version() << '\n'
    << "subcommand: " << config::to_string(rc.subcommand) << '\n'
    << "seed: " << rc.seed << '\n'
    << "config_hash: fnv1a64:" << hex64(fnv1a64(canonical)) << '\n'
    << "timestamp: " << utc_timestamp() << '\n';
  for (const auto& f : report.data_files) m << "file: " << f << '\n';
  if (!m) throw IoError("write failed for manifest.txt");
  return report;
}

}  // namespace cslab::cli
