#include "cslab/noise.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <ostream>
#include <string>

#include "cslab/errors.hpp"
#include "cslab/format.hpp"
#include "cslab/physconst.hpp"
#include "cslab/rng.hpp"

namespace cslab::noise {
namespace {

using std::numbers::pi;

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place complex DFT, sign -1 (forward) or +1 (backward), unnormalized.
void dft_in_place(std::vector<Complex>& data, int sign) {
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  const int n = static_cast<int>(data.size());
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(n, ptr, ptr, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

// F(tau) = s phi(tau/s) - tau Phi_c(tau/s) for tau >= 0, s = sqrt(2) t_c.
// The second antiderivative of C is G(tau) = F(|tau|) + max(tau, 0); the
// linear piece is handled exactly in increment_covariance.
double mills_part(double tau, double s) {
  const double x = tau / s;
  const double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi);
  const double phic = 0.5 * std::erfc(x / std::numbers::sqrt2);
  return s * phi - tau * phic;
}

}  // namespace

const char* to_string(NoiseKind kind) noexcept {
  return kind == NoiseKind::White ? "white" : "gaussian_cutoff";
}

NoiseSpectrum NoiseSpectrum::white(double lambda0, double r_c) {
  NoiseSpectrum s{lambda0, 0.0, r_c, NoiseKind::White};
  s.validate();
  return s;
}

NoiseSpectrum NoiseSpectrum::gaussian_cutoff(double lambda0, double t_c, double r_c) {
  NoiseSpectrum s{lambda0, t_c, r_c, NoiseKind::GaussianCutoff};
  s.validate();
  return s;
}

void NoiseSpectrum::validate() const {
  if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) throw InvalidInput("spectrum: lambda0 must be > 0");
  if (!(r_c > 0.0) || !std::isfinite(r_c)) throw InvalidInput("spectrum: r_c must be > 0");
  if (!(t_c >= 0.0) || !std::isfinite(t_c)) throw InvalidInput("spectrum: t_c must be >= 0");
  if ((kind == NoiseKind::White) != (t_c == 0.0)) {
    throw InvalidInput("spectrum: kind White must coincide with t_c == 0");
  }
}

double NoiseSpectrum::power(double omega) const noexcept {
  return lambda0 * std::exp(-omega * omega * t_c * t_c);
}

NoiseSpectrum NoiseSpectrum::time_dilated(double gamma) const {
  if (!(gamma >= 1.0)) throw InvalidBoost("time dilation needs gamma >= 1");
  if (kind == NoiseKind::White) return *this;
  return gaussian_cutoff(lambda0 / gamma, t_c / gamma, r_c);
}

NoiseTrajectory sample_white(std::size_t n_channels, std::size_t n_steps, double dt,
                             std::uint64_t seed) {
  if (n_channels < 1 || n_steps < 1) throw InvalidInput("sample_white: need >= 1 channel and step");
  if (!(dt > 0.0)) throw InvalidInput("sample_white: dt must be > 0");
  NoiseTrajectory traj{n_channels, n_steps, dt, seed, NoiseKind::White, {}};
  traj.increments.resize(n_channels * n_steps);
  const double sd = std::sqrt(dt);
  for (std::size_t c = 0; c < n_channels; ++c) {
    CounterRng rng(derive_seed(seed, c));
    double* row = traj.increments.data() + c * n_steps;
    for (std::size_t s = 0; s < n_steps; ++s) row[s] = sd * rng.gaussian();
  }
  return traj;
}

double correlation_time(const NoiseSpectrum& spectrum, double tau) {
  spectrum.validate();
  if (spectrum.kind == NoiseKind::White) {
    throw UnsupportedQuery(
        "white noise has correlation lambda0 * delta(t - t'), a distribution rather than a "
        "function; use the delta-correlated identity dB dB = dt instead");
  }
  const double tc = spectrum.t_c;
  return spectrum.lambda0 / (2.0 * std::sqrt(pi) * tc) * std::exp(-tau * tau / (4.0 * tc * tc));
}

double increment_covariance(const NoiseSpectrum& spectrum, double dt, std::size_t lag) {
  spectrum.validate();
  if (!(dt > 0.0)) throw InvalidInput("increment_covariance: dt must be > 0");
  if (spectrum.kind == NoiseKind::White) return lag == 0 ? spectrum.lambda0 * dt : 0.0;
  const double s = std::numbers::sqrt2 * spectrum.t_c;
  const double k = static_cast<double>(lag);
  if (lag == 0) {
    return spectrum.lambda0 * (dt + 2.0 * mills_part(dt, s) - 2.0 * mills_part(0.0, s));
  }
  return spectrum.lambda0 * (mills_part((k + 1.0) * dt, s) - 2.0 * mills_part(k * dt, s) +
                             mills_part((k - 1.0) * dt, s));
}

ColoredSynthesizer::ColoredSynthesizer(const NoiseSpectrum& spectrum, std::size_t n_steps,
                                       double dt, ColoredOptions options)
    : n_steps_(n_steps) {
  spectrum.validate();
  if (spectrum.kind != NoiseKind::GaussianCutoff) {
    throw InvalidInput("colored synthesis requires a Gaussian-cutoff spectrum");
  }
  if (n_steps < 1) throw InvalidInput("colored synthesis: n_steps must be >= 1");
  if (!(dt > 0.0)) throw InvalidInput("colored synthesis: dt must be > 0");
  if (options.require_resolved && !(dt < spectrum.t_c / 4.0)) {
    throw ResolutionError("dt = " + fmt17(dt) + " s does not resolve t_c = " + fmt17(spectrum.t_c) +
                          " s; need dt < t_c/4");
  }

  // Grow the embedding until it is (numerically) nonnegative definite.
  std::size_t m = next_pow2(std::max({2 * n_steps, std::size_t{2}, options.min_embedding_size}));
  const std::size_t m_max = 8 * m;
  std::vector<Complex> row;
  for (;; m *= 2) {
    const std::size_t half = m / 2;
    std::vector<double> r(half + 1);
    for (std::size_t k = 0; k <= half; ++k) r[k] = increment_covariance(spectrum, dt, k);
    row.assign(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) row[j] = r[std::min(j, m - j)];
    dft_in_place(row, FFTW_FORWARD);
    // For t_c >> dt the lag covariances are second differences with
    // cancellation, and the rounding shows up as tiny negative eigenvalues.
    // Treat negative mass below 1e-6 of the total as numerically zero.
    double negative = 0.0, total = 0.0;
    for (const auto& z : row) {
      total += std::abs(z.real());
      if (z.real() < 0.0) negative -= z.real();
    }
    if (negative <= 1e-6 * total || m >= m_max) break;
  }

  double total = 0.0, negative = 0.0;
  weights_.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double ev = row[j].real();
    total += std::abs(ev);
    if (ev < 0.0) negative -= ev;
    weights_[j] = std::sqrt(std::max(ev, 0.0) / static_cast<double>(m));
  }
  clipped_fraction_ = total > 0.0 ? negative / total : 0.0;
}

void ColoredSynthesizer::synthesize(std::span<const Complex> z, std::span<double> out) const {
  if (z.size() != weights_.size()) throw InvalidInput("synthesize: wrong number of frequency samples");
  if (out.size() != n_steps_) throw InvalidInput("synthesize: output length must equal n_steps");
  std::vector<Complex> y(z.size());
  for (std::size_t j = 0; j < y.size(); ++j) y[j] = weights_[j] * z[j];
  dft_in_place(y, FFTW_BACKWARD);
  for (std::size_t k = 0; k < n_steps_; ++k) out[k] = y[k].real();
}

std::vector<Complex> frequency_domain_draw(std::size_t m, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<Complex> z(m);
  for (auto& v : z) {
    const double re = rng.gaussian();
    const double im = rng.gaussian();
    v = Complex(re, im);
  }
  return z;
}

NoiseTrajectory sample_colored(const NoiseSpectrum& spectrum, std::size_t n_channels,
                               std::size_t n_steps, double dt, std::uint64_t seed,
                               ColoredOptions options) {
  if (n_channels < 1) throw InvalidInput("sample_colored: need >= 1 channel");
  const ColoredSynthesizer synth(spectrum, n_steps, dt, options);
  NoiseTrajectory traj{n_channels, n_steps, dt, seed, NoiseKind::GaussianCutoff, {}};
  traj.increments.resize(n_channels * n_steps);
  for (std::size_t c = 0; c < n_channels; ++c) {
    const auto z = frequency_domain_draw(synth.embedding_size(), derive_seed(seed, c));
    synth.synthesize(z, std::span<double>(traj.increments).subspan(c * n_steps, n_steps));
  }
  return traj;
}

double lorentz_gamma(double v) {
  const double c = constants().c;
  if (!std::isfinite(v) || !(std::abs(v) < c)) {
    throw InvalidBoost("boost speed |v| = " + fmt17(std::abs(v)) + " m/s must be below c");
  }
  const double beta = v / c;
  return 1.0 / std::sqrt(1.0 - beta * beta);
}

Complex unboosted_phase(const BoostedCorrelationQuery& q, double q_parallel,
                        std::array<double, 2> q_perp, double omega) {
  const double perp = q_perp[0] * q.delta_x_perp[0] + q_perp[1] * q.delta_x_perp[1];
  return Complex(0.0, perp + (q_parallel * q.delta_x_parallel - omega * q.delta_t));
}

Complex boosted_phase(const BoostedCorrelationQuery& q, double q_parallel,
                      std::array<double, 2> q_perp, double omega) {
  const double gamma = lorentz_gamma(q.v);
  const double c2 = constants().c * constants().c;
  const double perp = q_perp[0] * q.delta_x_perp[0] + q_perp[1] * q.delta_x_perp[1];
  const double bracket = (q_parallel + omega * q.v / c2) * q.delta_x_parallel -
                         (omega + q_parallel * q.v) * q.delta_t;
  return Complex(0.0, perp + gamma * bracket);
}

double boosted_correlation(const NoiseSpectrum& spectrum, const BoostedCorrelationQuery& q) {
  spectrum.validate();
  if (spectrum.kind != NoiseKind::GaussianCutoff) {
    throw UnsupportedQuery("boosted_correlation: white noise correlation is a delta distribution");
  }
  const double gamma = lorentz_gamma(q.v);
  const double c2 = constants().c * constants().c;
  // The boosted exponent is linear in (omega, q_par) with coefficients
  // -dt' and dx', the Lorentz-transformed separation.
  const double dt_b = gamma * (q.delta_t - q.v * q.delta_x_parallel / c2);
  const double dx_b = gamma * (q.delta_x_parallel - q.v * q.delta_t);
  const double tc = spectrum.t_c;
  const double rc = spectrum.r_c;
  const double temporal = std::exp(-dt_b * dt_b / (4.0 * tc * tc)) / (2.0 * std::sqrt(pi) * tc);
  const double r2 = dx_b * dx_b + q.delta_x_perp[0] * q.delta_x_perp[0] +
                    q.delta_x_perp[1] * q.delta_x_perp[1];
  const double spatial =
      std::exp(-r2 / (4.0 * rc * rc)) / (8.0 * std::pow(pi, 1.5) * rc * rc * rc);
  return spectrum.lambda0 * temporal * spatial;
}

void write_csv(const NoiseTrajectory& t, std::ostream& out) {
  out << "step,channel,increment\n";
  for (std::size_t s = 0; s < t.n_steps; ++s)
    for (std::size_t c = 0; c < t.n_channels; ++c)
      out << s << ',' << c << ',' << fmt17(t.increment(c, s)) << '\n';
}

}  // namespace cslab::noise
