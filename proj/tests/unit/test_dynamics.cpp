#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "cslab/csl_dynamics.hpp"
#include "cslab/errors.hpp"
#include "cslab/rng.hpp"

using namespace cslab;
using namespace cslab::dynamics;

namespace {

CSLConfig two_level(double gamma = 1.0, double dt = 2.5e-4, double m1 = 1.0, double m2 = -1.0) {
  CSLConfig c;
  c.hamiltonian = DenseOperator::zero(2);
  c.collapse_ops = {DenseOperator::diagonal({m1, m2})};
  c.gamma_csl = gamma;
  c.dt = dt;
  return c;
}

const ComplexStateVector kBorn{std::sqrt(0.3), std::sqrt(0.7)};
const ComplexStateVector kPlus{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};

double binomial_sigma(double p, std::size_t n) { return std::sqrt(p * (1 - p) / static_cast<double>(n)); }

}  // namespace

TEST(EffectiveCoupling, Formula) {
  const double lambda = 2e-9, rc = 1e-7;
  EXPECT_DOUBLE_EQ(effective_coupling(lambda, rc), 8.0 * std::pow(std::numbers::pi, 1.5) * lambda);
  EXPECT_DOUBLE_EQ(effective_coupling(lambda, rc, 8e-21),
                   8.0 * std::pow(std::numbers::pi, 1.5) * rc * rc * rc * lambda / 8e-21);
  EXPECT_THROW(effective_coupling(-1.0, rc), InvalidInput);
  EXPECT_THROW(effective_coupling(lambda, rc, 0.0), InvalidInput);
}

TEST(CSLConfigValidation, Contracts) {
  auto c = two_level();
  EXPECT_NO_THROW(c.validate());
  c.collapse_ops.push_back(DenseOperator::from_rows({{0, 1}, {1, 0}}));
  EXPECT_THROW(c.validate(), ContractViolation);
  c = two_level();
  c.collapse_ops = {DenseOperator::from_rows({{0, 1}, {0, 0}})};
  EXPECT_THROW(c.validate(), ContractViolation);
  c = two_level(-1.0);
  EXPECT_THROW(c.validate(), InvalidInput);
  c = two_level(1.0, 0.0);
  EXPECT_THROW(c.validate(), InvalidInput);
  c = two_level();
  c.collapse_ops = {DenseOperator::diagonal({1, 2, 3})};
  EXPECT_THROW(c.validate(), InvalidInput);
  EXPECT_DOUBLE_EQ(two_level(2.0, 1e-3).stiffness(), 2.0 * 1e-3 * 4.0);
}

TEST(JointEigenspaces, DiagonalGrouping) {
  const DenseOperator ops[] = {DenseOperator::diagonal({1, 1, -1, 0}), DenseOperator::diagonal({2, 2, 2, 2})};
  const auto spaces = joint_eigenspaces(ops);
  ASSERT_EQ(spaces.size(), 3u);
  EXPECT_EQ(spaces[0].basis, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(spaces[1].basis, (std::vector<std::size_t>{2}));
  EXPECT_EQ(spaces[2].basis, (std::vector<std::size_t>{3}));
  EXPECT_EQ(spaces[0].eigenvalues, (std::vector<double>{1, 2}));
}

TEST(JointEigenspaces, NonDiagonalProjectors) {
  const DenseOperator sx[] = {DenseOperator::from_rows({{0, 1}, {1, 0}})};
  const auto spaces = joint_eigenspaces(sx);
  ASSERT_EQ(spaces.size(), 2u);
  // Both eigenvectors overlap basis state 0; the tie goes to the larger eigenvalue.
  EXPECT_NEAR(spaces[0].eigenvalues[0], 1.0, 1e-12);
  EXPECT_NEAR(spaces[1].eigenvalues[0], -1.0, 1e-12);
  const ComplexStateVector plus{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  EXPECT_NEAR(expectation(spaces[0].projector, plus), 1.0, 1e-12);
  EXPECT_NEAR(expectation(spaces[1].projector, plus), 0.0, 1e-12);
}

TEST(Step, NoCouplingNoChange) {
  const auto c = two_level(0.0);
  const double dB[] = {0.3};
  EXPECT_EQ(step(kBorn, c, dB), kBorn);
}

TEST(Step, EigenstateUnchanged) {
  const auto c = two_level(1.0, 1e-3);
  CounterRng rng(8);
  auto psi = ComplexStateVector::basis(2, 1);
  for (int i = 0; i < 100; ++i) {
    const double dB[] = {rng.gaussian() * std::sqrt(c.dt)};
    psi = step(psi, c, dB);
  }
  EXPECT_NEAR(std::abs(psi[1]), 1.0, 1e-15);
  EXPECT_EQ(psi[0], Complex(0.0));
}

TEST(Step, MovesTowardFavouredEigenstate) {
  const auto c = two_level(1.0, 1e-4);
  const double dB[] = {0.01};
  const auto out = step(kPlus, c, dB);
  EXPECT_GT(std::abs(out[0]), std::abs(out[1]));
  // Hand expansion: <M> = 0, so psi' ~ (1 + dB - dt/2, 1 - dB - dt/2).
  const double a = 1.0 + 0.01 - 0.5e-4, b = 1.0 - 0.01 - 0.5e-4;
  const double n = std::hypot(a, b);
  EXPECT_NEAR(out[0].real(), a / n, 1e-15);
  EXPECT_NEAR(out[1].real(), b / n, 1e-15);
}

TEST(Step, NormChangeMatchesExpansion) {
  // |psi'|^2 - 1 = g V (dB^2 - dt) - g^{3/2} mu3 dB dt + g^2 mu4 dt^2 / 4,
  // with central moments of M in the pre-step state.
  CounterRng rng(4);
  const auto c = two_level(1.3, 1e-3, 2.0, -0.5);
  for (int t = 0; t < 20; ++t) {
    const double p = rng.uniform();
    const ComplexStateVector psi{std::sqrt(p), std::sqrt(1 - p)};
    const double mean = 2.0 * p - 0.5 * (1 - p);
    double v = 0, m3 = 0, m4 = 0;
    for (auto [w, m] : {std::pair{p, 2.0}, std::pair{1 - p, -0.5}}) {
      const double d = m - mean;
      v += w * d * d;
      m3 += w * d * d * d;
      m4 += w * d * d * d * d;
    }
    const double dB = rng.gaussian() * std::sqrt(c.dt);
    const double g = c.gamma_csl, dt = c.dt;
    const double expected = g * v * (dB * dB - dt) - std::pow(g, 1.5) * m3 * dB * dt + g * g * m4 * dt * dt / 4.0;
    const double inc[] = {dB};
    EXPECT_NEAR(step_with_diagnostics(psi, c, inc).norm_change, expected, 1e-15);
  }
}

TEST(Step, OversizedStepRejected) {
  const auto c = two_level(1.0, 0.1);
  const double dB[] = {1.0};
  EXPECT_THROW(step(kPlus, c, dB), StepSizeError);
}

TEST(Step, WithHamiltonian) {
  // A Hamiltonian alone produces unitary rotation to first order; norm stays ~1.
  auto c = two_level(0.0, 1e-3);
  c.hamiltonian = DenseOperator::from_rows({{0, 1}, {1, 0}});
  const double dB[] = {0.0};
  const auto out = step_with_diagnostics(ComplexStateVector::basis(2, 0), c, dB);
  EXPECT_NEAR(out.state[1].imag(), -1e-3, 1e-9);
  EXPECT_NEAR(out.norm_change, 1e-6, 1e-12);
}

TEST(RunTrajectory, EigenstateCollapsesImmediately) {
  const auto r = run_trajectory(two_level(), ComplexStateVector::basis(2, 1), NoiseModel::white(), 3);
  ASSERT_TRUE(r.outcome_index);
  EXPECT_EQ(*r.outcome_index, 1u);
  EXPECT_EQ(*r.collapse_time, 0.0);
}

TEST(RunTrajectory, OutcomeIsAnEigenspace) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = run_trajectory(two_level(), kBorn, NoiseModel::white(), seed, {.record_trace = false});
    ASSERT_TRUE(r.outcome_index);
    EXPECT_LT(*r.outcome_index, 2u);
    const double p = std::norm(r.final_state[*r.outcome_index]);
    EXPECT_GT(p, 1.0 - 1e-6);
  }
}

TEST(RunTrajectory, NoCouplingNeverCollapses) {
  auto c = two_level(0.0);
  c.n_steps_max = 5000;
  const auto r = run_trajectory(c, kBorn, NoiseModel::white(), 1, {.record_trace = false});
  EXPECT_FALSE(r.outcome_index);
  EXPECT_EQ(r.steps_executed, 5000u);
  EXPECT_EQ(r.final_state, kBorn);
}

TEST(RunTrajectory, Deterministic) {
  const auto a = run_trajectory(two_level(), kBorn, NoiseModel::white(), 99);
  const auto b = run_trajectory(two_level(), kBorn, NoiseModel::white(), 99);
  EXPECT_EQ(a.times, b.times);
  EXPECT_EQ(a.observable_traces, b.observable_traces);
  EXPECT_EQ(a.norm_trace, b.norm_trace);
  EXPECT_EQ(a.final_state, b.final_state);
  EXPECT_EQ(a.outcome_index, b.outcome_index);
  EXPECT_EQ(a.collapse_time, b.collapse_time);
}

TEST(RunTrajectory, WhiteStreamMatchesSampleWhite) {
  const auto c = two_level();
  const auto a = run_trajectory(c, kBorn, NoiseModel::white(), 17, {.record_trace = false});
  const auto inc = noise::sample_white(1, a.steps_executed, c.dt, 17);
  const auto b = run_with_increments(c, kBorn, inc, {.record_trace = false});
  EXPECT_EQ(a.final_state, b.final_state);
  EXPECT_EQ(a.outcome_index, b.outcome_index);
}

TEST(RunTrajectory, TraceLayout) {
  auto c = two_level();
  c.n_steps_max = 100;
  const auto r = run_trajectory(c, kBorn, NoiseModel::white(), 5, {.record_trace = true, .trace_stride = 10, .stop_on_collapse = false});
  EXPECT_EQ(r.times.size(), 11u);
  ASSERT_EQ(r.observable_traces.size(), 1u);
  EXPECT_NEAR(r.observable_traces[0][0], -0.4, 1e-15);
  EXPECT_DOUBLE_EQ(r.times.back(), 100 * c.dt);
  std::ostringstream os;
  write_trace_csv(r, os);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "time,expect_0,norm_drift");
}

TEST(Ensemble, SymmetricStateSplitsEvenly) {
  const auto stats = run_ensemble(two_level(), kPlus, NoiseModel::white(), 10000, 2718);
  EXPECT_EQ(stats.outcome_counts.count(kUndecided), 0u);
  EXPECT_NEAR(stats.frequency(0), 0.5, 4 * binomial_sigma(0.5, 10000));
  EXPECT_NEAR(stats.born_probabilities.at(0), 0.5, 1e-15);
}

TEST(Ensemble, BornRule) {
  const auto stats = run_ensemble(two_level(), kBorn, NoiseModel::white(), 10000, 31415);
  std::size_t total = 0;
  for (const auto& [k, n] : stats.outcome_counts) total += n;
  EXPECT_EQ(total, 10000u);
  EXPECT_NEAR(stats.frequency(0), 0.3, 4 * binomial_sigma(0.3, 10000));
  EXPECT_NEAR(stats.born_probabilities.at(0), 0.3, 1e-15);
  EXPECT_GT(stats.mean_collapse_time, 0.0);
}

TEST(Ensemble, ColoredNearWhiteKeepsBornRule) {
  // t_c below dt: increments are close to white. Once t_c spans many steps the
  // substituted increments lose their quadratic variation and the frequencies drift.
  auto c = two_level();
  c.n_steps_max = 40000;
  const std::size_t n = 2000;
  const auto stats = run_ensemble(c, kBorn, NoiseModel::colored(c.dt / 4, {.require_resolved = false}), n, 161);
  EXPECT_LT(stats.frequency(kUndecided), 0.01);
  EXPECT_NEAR(stats.frequency(0), 0.3, 4 * binomial_sigma(0.3, n));
}

TEST(Ensemble, IndependentOfScheduling) {
  const auto a = run_ensemble(two_level(), kBorn, NoiseModel::white(), 64, 5);
  const auto b = run_ensemble(two_level(), kBorn, NoiseModel::white(), 64, 5);
  ASSERT_EQ(a.trajectories.size(), 64u);
  for (std::size_t i = 0; i < 64; ++i) {
    EXPECT_EQ(a.trajectories[i].seed, derive_seed(5, i));
    EXPECT_EQ(a.trajectories[i].outcome, b.trajectories[i].outcome);
    EXPECT_EQ(a.trajectories[i].collapse_time, b.trajectories[i].collapse_time);
  }
  std::ostringstream os;
  write_outcomes_csv(a, os);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "trajectory,seed,outcome,collapse_time,steps,norm_drift_max");
}

namespace {

// <P_0>(t) samples from n trajectories run for a fixed horizon.
std::vector<std::vector<double>> p0_paths(const CSLConfig& c, const ComplexStateVector& psi0, std::size_t n,
                                          std::size_t stride, std::uint64_t seed) {
  const auto ev = c.collapse_ops[0].real_diagonal();
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = run_trajectory(c, psi0, NoiseModel::white(), derive_seed(seed, i),
                                  {.record_trace = true, .trace_stride = stride, .stop_on_collapse = false});
    std::vector<double> p;
    for (double m : r.observable_traces[0]) p.push_back((m - ev[1]) / (ev[0] - ev[1]));
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

TEST(Martingale, ProjectorExpectationConserved) {
  auto c = two_level(1.0, 2.5e-4);
  c.n_steps_max = 2000;
  const std::size_t n = 2000;
  const auto paths = p0_paths(c, kBorn, n, 500, 7);
  for (std::size_t s = 1; s < paths[0].size(); ++s) {
    double m = 0, m2 = 0;
    for (const auto& p : paths) {
      m += p[s];
      m2 += p[s] * p[s];
    }
    m /= n;
    const double se = std::sqrt((m2 / n - m * m) / (n - 1));
    EXPECT_NEAR(m, 0.3, 4 * se) << "sample " << s;
  }
}

TEST(Martingale, ExactDecayOfCoherenceProxy) {
  // E[sqrt(p(1-p))] = sqrt(p0(1-p0)) exp(-gamma dm^2 t / 2) exactly (Ito).
  auto c = two_level(1.0, 2.5e-4);
  c.n_steps_max = 2000;
  const std::size_t n = 2000;
  const auto paths = p0_paths(c, kBorn, n, 500, 8);
  const double f0 = std::sqrt(0.3 * 0.7);
  for (std::size_t s = 1; s < paths[0].size(); ++s) {
    const double t = static_cast<double>(s * 500) * c.dt;
    double m = 0, m2 = 0;
    for (const auto& p : paths) {
      const double f = std::sqrt(std::max(0.0, p[s] * (1 - p[s])));
      m += f;
      m2 += f * f;
    }
    m /= n;
    const double se = std::sqrt((m2 / n - m * m) / (n - 1));
    EXPECT_NEAR(m, f0 * std::exp(-2.0 * t), 4 * se + 2e-3 * f0) << "t = " << t;
  }
}

TEST(VarianceDecay, RateIsOrderGammaGapSquared) {
  for (auto [m1, m2] : {std::pair{1.0, -1.0}, std::pair{0.5, 0.0}}) {
    const double gap2 = (m1 - m2) * (m1 - m2);
    auto c = two_level(1.0, 1e-3 / gap2, m1, m2);
    const double horizon = 0.2 / gap2;
    const std::size_t stride = 50;
    c.n_steps_max = static_cast<std::size_t>(std::lround(horizon / c.dt));
    const auto paths = p0_paths(c, kPlus, 1000, stride, 9);
    // Least-squares slope of log E[Var M] against t.
    double st = 0, sy = 0, stt = 0, sty = 0;
    const std::size_t samples = paths[0].size();
    for (std::size_t s = 0; s < samples; ++s) {
      double v = 0;
      for (const auto& p : paths) v += gap2 * p[s] * (1 - p[s]);
      const double t = static_cast<double>(s * stride) * c.dt;
      const double y = std::log(v / static_cast<double>(paths.size()));
      st += t;
      sy += y;
      stt += t * t;
      sty += t * y;
    }
    const double slope = (samples * sty - st * sy) / (samples * stt - st * st);
    const double rate = -slope / (c.gamma_csl * gap2);
    EXPECT_GE(rate, 0.5);
    EXPECT_LE(rate, 2.0);
  }
}

TEST(Completeness, UndecidedFractionShrinksWithHorizon) {
  double previous = 1.0;
  for (std::size_t horizon : {2000u, 8000u, 32000u}) {
    auto c = two_level();
    c.n_steps_max = horizon;
    const auto stats = run_ensemble(c, kBorn, NoiseModel::white(), 1000, 12);
    const double undecided = stats.frequency(kUndecided);
    EXPECT_LE(undecided, previous);
    previous = undecided;
  }
  EXPECT_LT(previous, 0.05);
}
