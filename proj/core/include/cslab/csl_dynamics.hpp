#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "cslab/hilbert.hpp"
#include "cslab/noise.hpp"

namespace cslab::dynamics {

/// Effective per-channel coupling when the smeared mass density is
/// discretized into cells of volume `cell_volume`:
///   gamma_CSL / cell_volume with gamma_CSL = 8 pi^{3/2} r_c^3 lambda.
/// With the default cell volume r_c^3 this is 8 pi^{3/2} lambda (s^-1), the
/// operators being dimensionless mass (nucleon) numbers per cell.
double effective_coupling(double lambda, double r_c, std::optional<double> cell_volume = {});

/// Finite-dimensional CSL model, hbar = 1 (H in s^-1, time in s).
struct CSLConfig {
  DenseOperator hamiltonian = DenseOperator::zero(1);
  std::vector<DenseOperator> collapse_ops;  // Hermitian, mutually commuting
  double gamma_csl = 1.0;                   // s^-1
  double dt = 1e-4;                         // s
  std::size_t n_steps_max = 100000;
  double collapse_threshold = 1.0 - 1e-6;
  std::size_t hysteresis_steps = 10;
  double renorm_tolerance = 1e-8;  // target for the pre-renormalization norm change (reported)
  double norm_guard = 0.05;        // |norm^2 - 1| above this aborts with StepSizeError

  std::size_t dim() const { return hamiltonian.dim(); }

  /// Throws InvalidInput / ContractViolation on inconsistent dimensions,
  /// non-Hermitian or non-commuting operators, gamma < 0 or dt <= 0.
  void validate() const;

  /// gamma * dt * max_i (spread of M_i eigenvalues)^2.
  double stiffness() const;
};

/// One joint eigenspace of the collapse operators.
struct Eigenspace {
  std::vector<double> eigenvalues;  // one per collapse operator
  DenseOperator projector;
  std::vector<std::size_t> basis;   // filled when all operators are diagonal
};

/// Joint eigenspaces, ordered by the first computational-basis index they
/// overlap (projector diagonal > 1e-9), ties by eigenvalue tuple descending.
/// For diagonal operators eigenspace i is the block containing basis state i
/// in order of first appearance.
std::vector<Eigenspace> joint_eigenspaces(std::span<const DenseOperator> ops);

/// Euler-Maruyama integrator for
///   d psi = [-i H dt + sqrt(gamma) sum_i (M_i - <M_i>) dB_i
///            - gamma/2 sum_i (M_i - <M_i>)^2 dt] psi,
/// followed by explicit renormalization. Diagonal collapse operators and a
/// zero Hamiltonian take O(dim) fast paths.
class Integrator {
 public:
  explicit Integrator(const CSLConfig& config);

  /// Advances a normalized `psi` in place by one step. `increments` holds one
  /// dB per collapse operator. Returns the pre-renormalization norm^2 - 1.
  /// `expectations` (if non-empty) receives <M_i> of the input state.
  double advance(std::vector<Complex>& psi, std::span<const double> increments,
                 std::span<double> expectations = {});

  const CSLConfig& config() const noexcept { return cfg_; }

 private:
  CSLConfig cfg_;
  bool diagonal_ops_;
  bool has_hamiltonian_;
  std::vector<std::vector<double>> diag_;  // eigenvalues per op for the fast path
  std::vector<Complex> delta_, scratch_, mpsi_;
  std::vector<double> expect_;
};

struct StepOutcome {
  ComplexStateVector state;
  double norm_change;  // pre-renormalization norm^2 - 1
};

/// One renormalized Euler-Maruyama step.
ComplexStateVector step(const ComplexStateVector& psi, const CSLConfig& config,
                        std::span<const double> increments);
StepOutcome step_with_diagnostics(const ComplexStateVector& psi, const CSLConfig& config,
                                  std::span<const double> increments);

/// Noise driving a trajectory. Colored noise is unit-normalized
/// (Int C = 1, so Var dB -> dt in the white limit); the coupling lives in
/// gamma_csl.
struct NoiseModel {
  noise::NoiseKind kind = noise::NoiseKind::White;
  double t_c = 0.0;  // s
  noise::ColoredOptions colored_options{};

  static NoiseModel white() { return {}; }
  static NoiseModel colored(double t_c, noise::ColoredOptions opts = {}) {
    return {noise::NoiseKind::GaussianCutoff, t_c, opts};
  }
};

struct RunOptions {
  bool record_trace = true;
  std::size_t trace_stride = 1;
  bool stop_on_collapse = true;
};

struct TrajectoryRecord {
  std::vector<double> times;                            // s
  std::vector<std::vector<double>> observable_traces;   // [op][sample] <M_i>
  std::vector<double> norm_trace;                       // |norm^2 - 1| per sample
  ComplexStateVector final_state{Complex(1.0)};
  std::optional<std::size_t> outcome_index;
  std::optional<double> collapse_time;  // s, start of the hysteresis window
  std::size_t steps_executed = 0;
  double norm_drift_max = 0.0;
  std::uint64_t seed = 0;
};

/// Integrates from psi0 until one joint-eigenspace probability stays above
/// the threshold for `hysteresis_steps` consecutive checks, or n_steps_max.
/// White noise: channel i draws from CounterRng(derive_seed(seed, i)), the
/// same stream as noise::sample_white(.., seed).
TrajectoryRecord run_trajectory(const CSLConfig& config, const ComplexStateVector& psi0,
                                const NoiseModel& noise, std::uint64_t seed,
                                const RunOptions& options = {});

/// Same loop driven by precomputed increments (n_channels == number of
/// collapse operators, n_steps >= steps to run, dt must match).
TrajectoryRecord run_with_increments(const CSLConfig& config, const ComplexStateVector& psi0,
                                     const noise::NoiseTrajectory& increments,
                                     const RunOptions& options = {});

inline constexpr long kUndecided = -1;

struct TrajectorySummary {
  long outcome = kUndecided;
  double collapse_time = 0.0;  // s; 0 when undecided
  std::size_t steps_executed = 0;
  double norm_drift_max = 0.0;
  std::uint64_t seed = 0;
};

struct EnsembleStats {
  std::size_t n_traj = 0;
  std::map<long, std::size_t> outcome_counts;  // kUndecided for unfinished runs
  double mean_collapse_time = 0.0;             // over decided trajectories
  std::map<long, double> born_probabilities;   // <psi0|P_i|psi0>
  double max_norm_drift = 0.0;
  std::vector<TrajectorySummary> trajectories;  // indexed by trajectory number

  double frequency(long outcome) const;
};

/// Independent trajectories seeded with derive_seed(master_seed, i); reduced
/// in index order, so the result does not depend on scheduling.
EnsembleStats run_ensemble(const CSLConfig& config, const ComplexStateVector& psi0,
                           const NoiseModel& noise, std::size_t n_traj, std::uint64_t master_seed);

/// CSV: time, expect_0..expect_{k-1}, norm_drift.
void write_trace_csv(const TrajectoryRecord& record, std::ostream& out);

/// CSV: trajectory, seed, outcome, collapse_time, steps, norm_drift_max.
void write_outcomes_csv(const EnsembleStats& stats, std::ostream& out);

}  // namespace cslab::dynamics
