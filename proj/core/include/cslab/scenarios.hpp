#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "cslab/csl_dynamics.hpp"
#include "cslab/hilbert.hpp"
#include "cslab/noise.hpp"

namespace cslab::scenarios {

/// Spin + massive pointer. The pointer's collapse operator has eigenvalues
/// +-apparatus_mass_gap/2; the spin itself carries no collapse coupling.
struct EPRSetup {
  double apparatus_mass_gap = 100.0;  // dimensionless, >= 10
  double gamma = 1.0;                 // s^-1
  double dt = 0.0;                    // s; 0 picks gamma * gap^2 * dt = 1e-3
  std::size_t n_steps_max = 200000;
  double threshold = 1.0 - 1e-6;

  void validate() const;
  double effective_dt() const;
};

/// A (x) B (x) apparatus, row-major, |up> = index 0:
///   2^{-1/2} [ |A up>|B down>|app up> - |A down>|B up>|app down> ].
ComplexStateVector build_epr_state();

/// Collapse configuration acting only on the apparatus factor of the
/// 8-dimensional EPR space.
dynamics::CSLConfig epr_config(const EPRSetup& setup);

enum class Outcome { Up, Down, Undecided };
const char* to_string(Outcome o) noexcept;

struct EPRRecord {
  Outcome outcome = Outcome::Undecided;
  int a_spin = 0;  // sign of <sigma_z^A> in the final state, 0 if undecided
  int b_spin = 0;
  double collapse_time = 0.0;  // s
  double fidelity = 0.0;       // |<branch|psi_final>|^2 for the chosen branch
  double final_norm = 0.0;
  std::uint64_t seed = 0;
};

EPRRecord run_epr(const EPRSetup& setup, std::uint64_t seed);

/// n independent runs, run i seeded with derive_seed(master_seed, i).
std::vector<EPRRecord> run_epr_ensemble(const EPRSetup& setup, std::size_t n, std::uint64_t master_seed);

/// Spin measured along x, entangled with the pointer (4-dimensional,
/// spin (x) pointer): 2^{-1/2} [ |+x>|app up> + |-x>|app down> ].
ComplexStateVector build_stern_gerlach_state();
dynamics::CSLConfig stern_gerlach_config(const EPRSetup& setup);

struct FrameComparison {
  double boost_v = 0.0;  // m/s, 0 <= v < c
  std::uint64_t base_seed = 0;
  std::size_t n_pairs = 100;
  noise::NoiseSpectrum spectrum;  // Gaussian cutoff; only t_c shapes the run
  EPRSetup apparatus;

  void validate() const;
};

struct PairResult {
  Outcome outcome_rest = Outcome::Undecided;
  Outcome outcome_boosted = Outcome::Undecided;
  double collapse_time_rest = 0.0;
  double collapse_time_boosted = 0.0;
};

struct FrameResult {
  std::size_t n_divergent_outcomes = 0;  // both decided, different outcomes
  std::size_t n_undecided = 0;           // pairs with at least one undecided run
  std::map<Outcome, std::size_t> stats_rest;
  std::map<Outcome, std::size_t> stats_boosted;
  double gamma = 1.0;
  double boosted_t_c = 0.0;  // correlation time driving the boosted apparatus
  std::vector<PairResult> pairs;
  std::vector<std::uint8_t> identical_noise;  // 1 if rest and boosted increments were bitwise equal
};

/// For every pair, one frequency-domain draw feeds two syntheses: the rest
/// spectrum and its time-dilated version. The same Stern-Gerlach collapse is
/// run with each and the outcomes compared.
FrameResult frame_experiment(const FrameComparison& cmp);

struct SweepPoint {
  double t_c = 0.0;
  double mean_collapse_time = 0.0;
  std::size_t n_decided = 0;
};

/// Mean Stern-Gerlach collapse time against noise correlation time.
std::vector<SweepPoint> collapse_time_sweep(const EPRSetup& setup, const std::vector<double>& t_c_values,
                                            std::size_t n_traj, std::uint64_t seed);

void write_epr_csv(const std::vector<EPRRecord>& runs, std::ostream& out);
/// pair_index, outcome_rest, outcome_boosted, collapse_time_rest, collapse_time_boosted
void write_pairs_csv(const FrameResult& result, std::ostream& out);

}  // namespace cslab::scenarios
