#include "cslab/csl_dynamics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "cslab/errors.hpp"
#include "cslab/format.hpp"
#include "cslab/parallel.hpp"
#include "cslab/rng.hpp"

namespace cslab::dynamics {
namespace {

constexpr double kCommuteTol = 1e-10;
constexpr double kNormalizedTol = 1e-9;

bool all_diagonal(std::span<const DenseOperator> ops) {
  return std::all_of(ops.begin(), ops.end(), [](const DenseOperator& m) { return m.is_diagonal(); });
}

double spread(const DenseOperator& op) {
  // Hermitian operators: eigenvalue spread. Diagonal ones are read directly.
  if (op.is_diagonal()) {
    const auto d = op.real_diagonal();
    const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
    return *hi - *lo;
  }
  const std::size_t n = op.dim();
  Eigen::MatrixXcd m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = op(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
}

bool tuple_close(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

void order_eigenspaces(std::vector<Eigenspace>& spaces) {
  auto first_index = [](const Eigenspace& s) {
    const std::size_t n = s.projector.dim();
    for (std::size_t i = 0; i < n; ++i)
      if (s.projector(i, i).real() > 1e-9) return i;
    return n;
  };
  std::stable_sort(spaces.begin(), spaces.end(), [&](const Eigenspace& a, const Eigenspace& b) {
    const auto ia = first_index(a), ib = first_index(b);
    if (ia != ib) return ia < ib;
    return std::lexicographical_compare(b.eigenvalues.begin(), b.eigenvalues.end(),
                                        a.eigenvalues.begin(), a.eigenvalues.end());
  });
}

// Probability of each eigenspace in the state `psi`.
class EigenspaceProbe {
 public:
  explicit EigenspaceProbe(std::vector<Eigenspace> spaces, bool diagonal)
      : spaces_(std::move(spaces)), diagonal_(diagonal) {}

  std::size_t size() const { return spaces_.size(); }
  const std::vector<Eigenspace>& spaces() const { return spaces_; }

  double probability(std::size_t k, std::span<const Complex> psi) const {
    const auto& s = spaces_[k];
    double p = 0.0;
    if (diagonal_) {
      for (auto j : s.basis) p += std::norm(psi[j]);
      return p;
    }
    const std::size_t n = psi.size();
    Complex acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Complex row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += s.projector(i, j) * psi[j];
      acc += std::conj(psi[i]) * row;
    }
    return acc.real();
  }

  // (index, probability) of the most probable eigenspace.
  std::pair<std::size_t, double> dominant(std::span<const Complex> psi) const {
    std::size_t best = 0;
    double best_p = -1.0;
    for (std::size_t k = 0; k < spaces_.size(); ++k) {
      const double p = probability(k, psi);
      if (p > best_p) {
        best_p = p;
        best = k;
      }
    }
    return {best, best_p};
  }

 private:
  std::vector<Eigenspace> spaces_;
  bool diagonal_;
};

void require_normalized(const ComplexStateVector& psi) {
  if (std::abs(psi.norm_squared() - 1.0) > kNormalizedTol) {
    throw InvalidInput("initial state must be normalized (|norm^2 - 1| = " +
                       fmt17(std::abs(psi.norm_squared() - 1.0)) + ")");
  }
}

std::vector<double> expectations_of(const CSLConfig& cfg, std::span<const Complex> psi) {
  std::vector<double> e(cfg.collapse_ops.size());
  const std::size_t n = psi.size();
  for (std::size_t i = 0; i < e.size(); ++i) {
    const auto& m = cfg.collapse_ops[i];
    double s = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      Complex row = 0.0;
      for (std::size_t b = 0; b < n; ++b) row += m(a, b) * psi[b];
      s += (std::conj(psi[a]) * row).real();
    }
    e[i] = s;
  }
  return e;
}

// Shared trajectory loop; `draw(step, span)` fills one increment per op.
template <class Draw>
TrajectoryRecord run_loop(const CSLConfig& cfg, const ComplexStateVector& psi0, std::uint64_t seed,
                          const RunOptions& opts, std::size_t max_steps, Draw&& draw) {
  cfg.validate();
  require_normalized(psi0);
  if (psi0.dim() != cfg.dim()) throw InvalidInput("initial state dimension does not match the model");
  if (opts.trace_stride == 0) throw InvalidInput("trace_stride must be >= 1");

  const bool diagonal = all_diagonal(cfg.collapse_ops);
  const EigenspaceProbe probe(joint_eigenspaces(cfg.collapse_ops), diagonal);
  Integrator integrator(cfg);

  TrajectoryRecord rec;
  rec.seed = seed;
  const std::size_t k = cfg.collapse_ops.size();
  if (opts.record_trace) rec.observable_traces.resize(k);

  std::vector<Complex> psi(psi0.amplitudes().begin(), psi0.amplitudes().end());
  std::vector<double> dB(k);

  auto record = [&](std::size_t n, double norm_change) {
    rec.times.push_back(static_cast<double>(n) * cfg.dt);
    const auto e = expectations_of(cfg, psi);
    for (std::size_t i = 0; i < k; ++i) rec.observable_traces[i].push_back(e[i]);
    rec.norm_trace.push_back(std::abs(norm_change));
  };

  std::size_t streak = 0, streak_space = 0, streak_start = 0;
  bool decided = false;
  auto check = [&](std::size_t n) {
    const auto [space, p] = probe.dominant(psi);
    if (p > cfg.collapse_threshold) {
      if (streak == 0 || space != streak_space) {
        streak = 1;
        streak_space = space;
        streak_start = n;
      } else {
        ++streak;
      }
    } else {
      streak = 0;
    }
    if (!decided && streak >= cfg.hysteresis_steps) {
      decided = true;
      rec.outcome_index = streak_space;
      rec.collapse_time = static_cast<double>(streak_start) * cfg.dt;
    }
    return decided;
  };

  if (opts.record_trace) record(0, 0.0);
  std::size_t n = 0;
  for (; n < max_steps; ++n) {
    if (check(n) && opts.stop_on_collapse) break;
    draw(n, std::span<double>(dB));
    const double change = integrator.advance(psi, dB);
    rec.norm_drift_max = std::max(rec.norm_drift_max, std::abs(change));
    ++rec.steps_executed;
    if (opts.record_trace && (n + 1) % opts.trace_stride == 0) record(n + 1, change);
  }
  if (n == max_steps) check(n);
  rec.final_state = ComplexStateVector(std::move(psi));
  return rec;
}

}  // namespace

double effective_coupling(double lambda, double r_c, std::optional<double> cell_volume) {
  if (!(lambda >= 0.0)) throw InvalidInput("lambda must be >= 0");
  if (!(r_c > 0.0)) throw InvalidInput("r_c must be > 0");
  const double volume = cell_volume.value_or(r_c * r_c * r_c);
  if (!(volume > 0.0)) throw InvalidInput("cell volume must be > 0");
  const double gamma_csl = 8.0 * std::pow(std::numbers::pi, 1.5) * r_c * r_c * r_c * lambda;
  return gamma_csl / volume;
}

void CSLConfig::validate() const {
  const std::size_t n = hamiltonian.dim();
  if (!hamiltonian.is_hermitian()) throw ContractViolation("Hamiltonian must be Hermitian");
  if (collapse_ops.empty()) throw InvalidInput("at least one collapse operator is required");
  for (std::size_t i = 0; i < collapse_ops.size(); ++i) {
    if (collapse_ops[i].dim() != n) throw InvalidInput("collapse operator dimension mismatch");
    if (!collapse_ops[i].is_hermitian()) {
      throw ContractViolation("collapse operator " + std::to_string(i) + " is not Hermitian");
    }
  }
  if (!all_diagonal(collapse_ops)) {
    for (std::size_t i = 0; i < collapse_ops.size(); ++i)
      for (std::size_t j = i + 1; j < collapse_ops.size(); ++j)
        if (commutator_norm(collapse_ops[i], collapse_ops[j]) >= kCommuteTol) {
          throw ContractViolation("collapse operators " + std::to_string(i) + " and " +
                                  std::to_string(j) + " do not commute");
        }
  }
  if (!(gamma_csl >= 0.0) || !std::isfinite(gamma_csl)) throw InvalidInput("gamma_csl must be >= 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("dt must be > 0");
  if (n_steps_max < 1) throw InvalidInput("n_steps_max must be >= 1");
  if (!(collapse_threshold > 0.5 && collapse_threshold < 1.0)) {
    throw InvalidInput("collapse_threshold must lie in (0.5, 1)");
  }
  if (hysteresis_steps < 1) throw InvalidInput("hysteresis_steps must be >= 1");
  if (!(norm_guard > 0.0)) throw InvalidInput("norm_guard must be > 0");
}

double CSLConfig::stiffness() const {
  double s = 0.0;
  for (const auto& m : collapse_ops) s = std::max(s, spread(m));
  return gamma_csl * dt * s * s;
}

std::vector<Eigenspace> joint_eigenspaces(std::span<const DenseOperator> ops) {
  if (ops.empty()) throw InvalidInput("joint_eigenspaces: no operators");
  const std::size_t n = ops.front().dim();
  std::vector<Eigenspace> spaces;

  if (all_diagonal(ops)) {
    std::vector<std::vector<double>> diags;
    for (const auto& m : ops) diags.push_back(m.real_diagonal());
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> tuple(ops.size());
      for (std::size_t i = 0; i < ops.size(); ++i) tuple[i] = diags[i][j];
      auto it = std::find_if(spaces.begin(), spaces.end(),
                             [&](const Eigenspace& s) { return tuple_close(s.eigenvalues, tuple, 1e-12); });
      if (it == spaces.end()) {
        spaces.push_back({tuple, DenseOperator::zero(n), {j}});
      } else {
        it->basis.push_back(j);
      }
    }
    for (auto& s : spaces) {
      std::vector<double> d(n, 0.0);
      for (auto j : s.basis) d[j] = 1.0;
      s.projector = DenseOperator::diagonal(d);
    }
    return spaces;
  }

  // A generic real combination of commuting Hermitian operators has the
  // joint eigenspaces as its eigenspaces.
  Eigen::MatrixXcd combo = Eigen::MatrixXcd::Zero(n, n);
  double scale = 0.0;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const double w = 1.0 + std::fmod(0.6180339887498949 * static_cast<double>(i + 1), 1.0);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        combo(a, b) += w * ops[i](a, b);
        scale = std::max(scale, std::abs(ops[i](a, b)));
      }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(combo);
  const auto& evals = es.eigenvalues();
  const auto& evecs = es.eigenvectors();
  const double tol = 1e-9 * std::max(scale, 1.0);
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && evals(end) - evals(end - 1) < tol) ++end;
    std::vector<Complex> p(n * n);
    for (std::size_t c = start; c < end; ++c)
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) p[a * n + b] += evecs(a, c) * std::conj(evecs(b, c));
    DenseOperator proj(n, std::move(p));
    std::vector<double> tuple(ops.size());
    const double dim_space = static_cast<double>(end - start);
    for (std::size_t i = 0; i < ops.size(); ++i) {
      Complex tr = 0.0;
      const DenseOperator pm = proj * ops[i];
      for (std::size_t a = 0; a < n; ++a) tr += pm(a, a);
      tuple[i] = tr.real() / dim_space;
    }
    spaces.push_back({std::move(tuple), std::move(proj), {}});
    start = end;
  }
  order_eigenspaces(spaces);
  return spaces;
}

Integrator::Integrator(const CSLConfig& config)
    : cfg_(config),
      diagonal_ops_(all_diagonal(config.collapse_ops)),
      has_hamiltonian_(!config.hamiltonian.is_zero()) {
  const std::size_t n = cfg_.dim();
  if (diagonal_ops_) {
    for (const auto& m : cfg_.collapse_ops) diag_.push_back(m.real_diagonal());
  }
  delta_.resize(n);
  scratch_.resize(n);
  mpsi_.resize(n);
  expect_.resize(cfg_.collapse_ops.size());
}

double Integrator::advance(std::vector<Complex>& psi, std::span<const double> increments,
                           std::span<double> expectations) {
  const std::size_t n = psi.size();
  const std::size_t k = cfg_.collapse_ops.size();
  if (n != cfg_.dim()) throw InvalidInput("state dimension does not match the model");
  if (increments.size() != k) throw InvalidInput("need exactly one increment per collapse operator");
  const double sqrt_gamma = std::sqrt(cfg_.gamma_csl);
  const double half_gamma_dt = 0.5 * cfg_.gamma_csl * cfg_.dt;

  // scratch_ accumulates the full update psi + d psi.
  if (diagonal_ops_) {
    for (std::size_t i = 0; i < k; ++i) {
      double e = 0.0;
      const auto& d = diag_[i];
      for (std::size_t j = 0; j < n; ++j) e += d[j] * std::norm(psi[j]);
      expect_[i] = e;
    }
    for (std::size_t j = 0; j < n; ++j) {
      double factor = 1.0;
      for (std::size_t i = 0; i < k; ++i) {
        const double dm = diag_[i][j] - expect_[i];
        factor += sqrt_gamma * dm * increments[i] - half_gamma_dt * dm * dm;
      }
      scratch_[j] = factor * psi[j];
    }
  } else {
    std::copy(psi.begin(), psi.end(), scratch_.begin());
    for (std::size_t i = 0; i < k; ++i) {
      const auto& m = cfg_.collapse_ops[i];
      double e = 0.0;
      for (std::size_t a = 0; a < n; ++a) {
        Complex row = 0.0;
        for (std::size_t b = 0; b < n; ++b) row += m(a, b) * psi[b];
        mpsi_[a] = row;
        e += (std::conj(psi[a]) * row).real();
      }
      expect_[i] = e;
      for (std::size_t a = 0; a < n; ++a) delta_[a] = mpsi_[a] - e * psi[a];
      for (std::size_t a = 0; a < n; ++a) {
        Complex row = 0.0;
        for (std::size_t b = 0; b < n; ++b) row += m(a, b) * delta_[b];
        const Complex d2 = row - e * delta_[a];
        scratch_[a] += sqrt_gamma * increments[i] * delta_[a] - half_gamma_dt * d2;
      }
    }
  }
  if (has_hamiltonian_) {
    const Complex minus_i_dt(0.0, -cfg_.dt);
    const auto& h = cfg_.hamiltonian;
    for (std::size_t a = 0; a < n; ++a) {
      Complex row = 0.0;
      for (std::size_t b = 0; b < n; ++b) row += h(a, b) * psi[b];
      scratch_[a] += minus_i_dt * row;
    }
  }

  double norm2 = 0.0;
  for (const auto& z : scratch_) norm2 += std::norm(z);
  const double change = norm2 - 1.0;
  if (!std::isfinite(change) || std::abs(change) > cfg_.norm_guard) {
    throw StepSizeError("norm changed by " + fmt17(change) +
                        " in one step (guard " + fmt17(cfg_.norm_guard) + "); halve dt");
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (std::size_t j = 0; j < n; ++j) psi[j] = scratch_[j] * inv;
  if (!expectations.empty()) {
    std::copy_n(expect_.begin(), std::min(expectations.size(), expect_.size()), expectations.begin());
  }
  return change;
}

StepOutcome step_with_diagnostics(const ComplexStateVector& psi, const CSLConfig& config,
                                  std::span<const double> increments) {
  config.validate();
  require_normalized(psi);
  Integrator integrator(config);
  std::vector<Complex> v(psi.amplitudes().begin(), psi.amplitudes().end());
  const double change = integrator.advance(v, increments);
  return {ComplexStateVector(std::move(v)), change};
}

ComplexStateVector step(const ComplexStateVector& psi, const CSLConfig& config,
                        std::span<const double> increments) {
  return step_with_diagnostics(psi, config, increments).state;
}

TrajectoryRecord run_trajectory(const CSLConfig& config, const ComplexStateVector& psi0,
                                const NoiseModel& noise_model, std::uint64_t seed,
                                const RunOptions& options) {
  if (noise_model.kind == noise::NoiseKind::GaussianCutoff) {
    config.validate();
    const auto spectrum = noise::NoiseSpectrum::gaussian_cutoff(1.0, noise_model.t_c);
    const auto incr = noise::sample_colored(spectrum, config.collapse_ops.size(), config.n_steps_max,
                                            config.dt, seed, noise_model.colored_options);
    return run_with_increments(config, psi0, incr, options);
  }
  std::vector<CounterRng> streams;
  for (std::size_t i = 0; i < config.collapse_ops.size(); ++i)
    streams.emplace_back(derive_seed(seed, i));
  const double sd = std::sqrt(config.dt);
  return run_loop(config, psi0, seed, options, config.n_steps_max,
                  [&](std::size_t, std::span<double> dB) {
                    for (std::size_t i = 0; i < dB.size(); ++i) dB[i] = sd * streams[i].gaussian();
                  });
}

TrajectoryRecord run_with_increments(const CSLConfig& config, const ComplexStateVector& psi0,
                                     const noise::NoiseTrajectory& incr, const RunOptions& options) {
  if (incr.n_channels != config.collapse_ops.size()) {
    throw InvalidInput("noise trajectory needs one channel per collapse operator");
  }
  if (std::abs(incr.dt - config.dt) > 1e-12 * config.dt) {
    throw InvalidInput("noise trajectory dt does not match the model dt");
  }
  const std::size_t max_steps = std::min(config.n_steps_max, incr.n_steps);
  return run_loop(config, psi0, incr.seed, options, max_steps,
                  [&](std::size_t n, std::span<double> dB) {
                    for (std::size_t i = 0; i < dB.size(); ++i) dB[i] = incr.increment(i, n);
                  });
}

double EnsembleStats::frequency(long outcome) const {
  const auto it = outcome_counts.find(outcome);
  if (it == outcome_counts.end() || n_traj == 0) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(n_traj);
}

EnsembleStats run_ensemble(const CSLConfig& config, const ComplexStateVector& psi0,
                           const NoiseModel& noise_model, std::size_t n_traj,
                           std::uint64_t master_seed) {
  if (n_traj < 1) throw InvalidInput("run_ensemble: n_traj must be >= 1");
  config.validate();
  require_normalized(psi0);

  EnsembleStats stats;
  stats.n_traj = n_traj;
  stats.trajectories.resize(n_traj);
  const RunOptions opts{.record_trace = false, .trace_stride = 1, .stop_on_collapse = true};
  parallel_for(n_traj, [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(master_seed, i);
    const auto rec = run_trajectory(config, psi0, noise_model, seed, opts);
    TrajectorySummary s;
    s.outcome = rec.outcome_index ? static_cast<long>(*rec.outcome_index) : kUndecided;
    s.collapse_time = rec.collapse_time.value_or(0.0);
    s.steps_executed = rec.steps_executed;
    s.norm_drift_max = rec.norm_drift_max;
    s.seed = seed;
    stats.trajectories[i] = s;
  });

  const auto spaces = joint_eigenspaces(config.collapse_ops);
  for (std::size_t k = 0; k < spaces.size(); ++k) {
    const ComplexStateVector projected = apply(spaces[k].projector, psi0);
    stats.born_probabilities[static_cast<long>(k)] = inner_product(psi0, projected).real();
    stats.outcome_counts[static_cast<long>(k)] = 0;
  }
  double time_sum = 0.0;
  std::size_t decided = 0;
  for (const auto& s : stats.trajectories) {
    ++stats.outcome_counts[s.outcome];
    stats.max_norm_drift = std::max(stats.max_norm_drift, s.norm_drift_max);
    if (s.outcome != kUndecided) {
      time_sum += s.collapse_time;
      ++decided;
    }
  }
  stats.mean_collapse_time = decided ? time_sum / static_cast<double>(decided) : 0.0;
  return stats;
}

void write_trace_csv(const TrajectoryRecord& rec, std::ostream& out) {
  out << "time";
  for (std::size_t i = 0; i < rec.observable_traces.size(); ++i) out << ",expect_" << i;
  out << ",norm_drift\n";
  for (std::size_t s = 0; s < rec.times.size(); ++s) {
    out << fmt17(rec.times[s]);
    for (const auto& trace : rec.observable_traces) out << ',' << fmt17(trace[s]);
    out << ',' << fmt17(rec.norm_trace[s]) << '\n';
  }
}

void write_outcomes_csv(const EnsembleStats& stats, std::ostream& out) {
  out << "trajectory,seed,outcome,collapse_time,steps,norm_drift_max\n";
  for (std::size_t i = 0; i < stats.trajectories.size(); ++i) {
    const auto& s = stats.trajectories[i];
    out << i << ',' << s.seed << ',' << s.outcome << ',' << fmt17(s.collapse_time) << ','
        << s.steps_executed << ',' << fmt17(s.norm_drift_max) << '\n';
  }
}

}  // namespace cslab::dynamics
