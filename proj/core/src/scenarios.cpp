#include "cslab/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "cslab/errors.hpp"
#include "cslab/format.hpp"
#include "cslab/parallel.hpp"
#include "cslab/physconst.hpp"
#include "cslab/rng.hpp"

namespace cslab::scenarios {
namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

// Basis indices in A (x) B (x) apparatus, 0 = up.
constexpr std::size_t epr_index(int a, int b, int app) { return 4 * a + 2 * b + app; }

DenseOperator pointer_operator(double gap) { return DenseOperator::diagonal({0.5 * gap, -0.5 * gap}); }

Outcome outcome_of(const dynamics::TrajectoryRecord& rec) {
  if (!rec.outcome_index) return Outcome::Undecided;
  return *rec.outcome_index == 0 ? Outcome::Up : Outcome::Down;
}

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

}  // namespace

const char* to_string(Outcome o) noexcept {
  switch (o) {
    case Outcome::Up: return "up";
    case Outcome::Down: return "down";
    default: return "undecided";
  }
}

void EPRSetup::validate() const {
  if (!(apparatus_mass_gap >= 10.0)) {
    throw InvalidInput("apparatus_mass_gap must be >= 10 so reduction is apparatus-driven");
  }
  if (!(gamma > 0.0)) throw InvalidInput("gamma must be > 0");
  if (!(dt >= 0.0)) throw InvalidInput("dt must be >= 0 (0 selects automatically)");
  if (n_steps_max < 1) throw InvalidInput("n_steps_max must be >= 1");
  if (!(threshold > 0.5 && threshold < 1.0)) throw InvalidInput("threshold must lie in (0.5, 1)");
}

double EPRSetup::effective_dt() const {
  return dt > 0.0 ? dt : 1e-3 / (gamma * apparatus_mass_gap * apparatus_mass_gap);
}

ComplexStateVector build_epr_state() {
  std::vector<Complex> amps(8);
  amps[epr_index(0, 1, 0)] = kInvSqrt2;
  amps[epr_index(1, 0, 1)] = -kInvSqrt2;
  return ComplexStateVector(std::move(amps));
}

dynamics::CSLConfig epr_config(const EPRSetup& setup) {
  setup.validate();
  dynamics::CSLConfig cfg;
  cfg.hamiltonian = DenseOperator::zero(8);
  const auto id2 = DenseOperator::identity(2);
  cfg.collapse_ops = {tensor(tensor(id2, id2), pointer_operator(setup.apparatus_mass_gap))};
  cfg.gamma_csl = setup.gamma;
  cfg.dt = setup.effective_dt();
  cfg.n_steps_max = setup.n_steps_max;
  cfg.collapse_threshold = setup.threshold;
  return cfg;
}

EPRRecord run_epr(const EPRSetup& setup, std::uint64_t seed) {
  const auto cfg = epr_config(setup);
  const auto psi0 = build_epr_state();
  const auto rec = dynamics::run_trajectory(cfg, psi0, dynamics::NoiseModel::white(), seed,
                                            {.record_trace = false});
  EPRRecord out;
  out.seed = seed;
  out.outcome = outcome_of(rec);
  out.final_norm = rec.final_state.norm();
  if (out.outcome == Outcome::Undecided) return out;

  out.collapse_time = rec.collapse_time.value_or(0.0);
  const auto& psi = rec.final_state;
  double sz_a = 0.0, sz_b = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int app = 0; app < 2; ++app) {
        const double p = std::norm(psi[epr_index(a, b, app)]);
        sz_a += (a == 0 ? 1.0 : -1.0) * p;
        sz_b += (b == 0 ? 1.0 : -1.0) * p;
      }
  out.a_spin = sign_of(sz_a);
  out.b_spin = sign_of(sz_b);
  const std::size_t branch = out.outcome == Outcome::Up ? epr_index(0, 1, 0) : epr_index(1, 0, 1);
  out.fidelity = std::norm(psi[branch]);
  return out;
}

std::vector<EPRRecord> run_epr_ensemble(const EPRSetup& setup, std::size_t n, std::uint64_t master_seed) {
  setup.validate();
  std::vector<EPRRecord> runs(n);
  parallel_for(n, [&](std::size_t i) { runs[i] = run_epr(setup, derive_seed(master_seed, i)); });
  return runs;
}

ComplexStateVector build_stern_gerlach_state() {
  // spin (x) pointer, spin basis = sigma_x eigenbasis.
  return ComplexStateVector({kInvSqrt2, 0.0, 0.0, kInvSqrt2});
}

dynamics::CSLConfig stern_gerlach_config(const EPRSetup& setup) {
  setup.validate();
  dynamics::CSLConfig cfg;
  cfg.hamiltonian = DenseOperator::zero(4);
  cfg.collapse_ops = {tensor(DenseOperator::identity(2), pointer_operator(setup.apparatus_mass_gap))};
  cfg.gamma_csl = setup.gamma;
  cfg.dt = setup.effective_dt();
  cfg.n_steps_max = setup.n_steps_max;
  cfg.collapse_threshold = setup.threshold;
  return cfg;
}

void FrameComparison::validate() const {
  if (!(boost_v >= 0.0 && boost_v < constants().c)) throw InvalidBoost("boost_v must satisfy 0 <= v < c");
  spectrum.validate();
  if (spectrum.kind != noise::NoiseKind::GaussianCutoff) {
    throw InvalidInput("frame comparison needs colored noise: white noise is Lorentz invariant, a boost acts trivially");
  }
  if (n_pairs < 1) throw InvalidInput("n_pairs must be >= 1");
  apparatus.validate();
}

FrameResult frame_experiment(const FrameComparison& cmp) {
  cmp.validate();
  const auto cfg = stern_gerlach_config(cmp.apparatus);
  const auto psi0 = build_stern_gerlach_state();
  const std::size_t n_steps = cfg.n_steps_max;

  FrameResult result;
  result.gamma = noise::lorentz_gamma(cmp.boost_v);
  // Unit-normalized spectra: dynamics carries the coupling in gamma_csl.
  const auto rest = noise::NoiseSpectrum::gaussian_cutoff(1.0, cmp.spectrum.t_c, cmp.spectrum.r_c);
  const auto dilated = rest.time_dilated(result.gamma);
  const auto boosted = noise::NoiseSpectrum::gaussian_cutoff(1.0, dilated.t_c, dilated.r_c);
  result.boosted_t_c = boosted.t_c;

  noise::ColoredSynthesizer synth_rest(rest, n_steps, cfg.dt);
  noise::ColoredSynthesizer synth_boost(boosted, n_steps, cfg.dt);
  // Either embedding may grow past the other; sizes only increase, so this ends.
  while (synth_rest.embedding_size() != synth_boost.embedding_size()) {
    const noise::ColoredOptions common{
        .require_resolved = true,
        .min_embedding_size = std::max(synth_rest.embedding_size(), synth_boost.embedding_size())};
    synth_rest = noise::ColoredSynthesizer(rest, n_steps, cfg.dt, common);
    synth_boost = noise::ColoredSynthesizer(boosted, n_steps, cfg.dt, common);
  }

  result.pairs.resize(cmp.n_pairs);
  result.identical_noise.resize(cmp.n_pairs);
  const dynamics::RunOptions opts{.record_trace = false};
  parallel_for(cmp.n_pairs, [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(cmp.base_seed, i);
    const auto z = noise::frequency_domain_draw(synth_rest.embedding_size(), seed);
    noise::NoiseTrajectory a{1, n_steps, cfg.dt, seed, noise::NoiseKind::GaussianCutoff,
                             std::vector<double>(n_steps)};
    noise::NoiseTrajectory b = a;
    synth_rest.synthesize(z, a.increments);
    synth_boost.synthesize(z, b.increments);
    const auto ra = dynamics::run_with_increments(cfg, psi0, a, opts);
    const auto rb = dynamics::run_with_increments(cfg, psi0, b, opts);
    result.pairs[i] = {outcome_of(ra), outcome_of(rb), ra.collapse_time.value_or(0.0),
                       rb.collapse_time.value_or(0.0)};
    result.identical_noise[i] = a.increments == b.increments ? 1 : 0;
  });

  for (const auto o : {Outcome::Up, Outcome::Down, Outcome::Undecided}) {
    result.stats_rest[o] = 0;
    result.stats_boosted[o] = 0;
  }
  for (const auto& p : result.pairs) {
    ++result.stats_rest[p.outcome_rest];
    ++result.stats_boosted[p.outcome_boosted];
    if (p.outcome_rest == Outcome::Undecided || p.outcome_boosted == Outcome::Undecided) {
      ++result.n_undecided;
    } else if (p.outcome_rest != p.outcome_boosted) {
      ++result.n_divergent_outcomes;
    }
  }
  return result;
}

std::vector<SweepPoint> collapse_time_sweep(const EPRSetup& setup, const std::vector<double>& t_c_values,
                                            std::size_t n_traj, std::uint64_t seed) {
  const auto cfg = stern_gerlach_config(setup);
  const auto psi0 = build_stern_gerlach_state();
  std::vector<SweepPoint> out;
  for (std::size_t k = 0; k < t_c_values.size(); ++k) {
    const double tc = t_c_values[k];
    const auto model = tc > 0.0 ? dynamics::NoiseModel::colored(tc) : dynamics::NoiseModel::white();
    const auto stats = dynamics::run_ensemble(cfg, psi0, model, n_traj, derive_seed(seed, k));
    SweepPoint p{tc, stats.mean_collapse_time, 0};
    for (const auto& [outcome, count] : stats.outcome_counts)
      if (outcome != dynamics::kUndecided) p.n_decided += count;
    out.push_back(p);
  }
  return out;
}

void write_epr_csv(const std::vector<EPRRecord>& runs, std::ostream& out) {
  out << "run,seed,outcome,a_spin,b_spin,collapse_time,fidelity\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    out << i << ',' << r.seed << ',' << to_string(r.outcome) << ',' << r.a_spin << ',' << r.b_spin
        << ',' << fmt17(r.collapse_time) << ',' << fmt17(r.fidelity) << '\n';
  }
}

void write_pairs_csv(const FrameResult& result, std::ostream& out) {
  out << "pair_index,outcome_rest,outcome_boosted,collapse_time_rest,collapse_time_boosted\n";
  for (std::size_t i = 0; i < result.pairs.size(); ++i) {
    const auto& p = result.pairs[i];
    out << i << ',' << to_string(p.outcome_rest) << ',' << to_string(p.outcome_boosted) << ','
        << fmt17(p.collapse_time_rest) << ',' << fmt17(p.collapse_time_boosted) << '\n';
  }
}

}  // namespace cslab::scenarios
