#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cslab/hilbert.hpp"

namespace cslab::noise {

enum class NoiseKind { White, GaussianCutoff };

const char* to_string(NoiseKind kind) noexcept;

/// Power spectrum lambda(omega) = lambda0 * exp(-omega^2 t_c^2) together with
/// the spatial correlation length r_c. t_c == 0 is white noise.
struct NoiseSpectrum {
  double lambda0 = 1.0;  // s^-1
  double t_c = 0.0;      // s
  double r_c = 1e-7;     // m
  NoiseKind kind = NoiseKind::White;

  static NoiseSpectrum white(double lambda0, double r_c = 1e-7);
  static NoiseSpectrum gaussian_cutoff(double lambda0, double t_c, double r_c = 1e-7);

  /// Throws InvalidInput unless lambda0 > 0, r_c > 0, t_c >= 0 and the kind
  /// agrees with t_c.
  void validate() const;

  double power(double omega) const noexcept;

  /// Spectrum seen by an apparatus boosted to Lorentz factor `gamma` when the
  /// spatial smearing is a Lorentz scalar: omega (t-t') -> gamma omega (t-t'),
  /// so C(tau) -> C(gamma tau), i.e. (lambda0, t_c) -> (lambda0/gamma, t_c/gamma).
  NoiseSpectrum time_dilated(double gamma) const;
};

/// Discretized increments, one row per channel: increments[c * n_steps + s].
struct NoiseTrajectory {
  std::size_t n_channels = 0;
  std::size_t n_steps = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  NoiseKind kind = NoiseKind::White;
  std::vector<double> increments;

  double increment(std::size_t channel, std::size_t step) const {
    return increments[channel * n_steps + step];
  }
  std::span<const double> channel(std::size_t c) const {
    return std::span<const double>(increments).subspan(c * n_steps, n_steps);
  }
};

/// i.i.d. N(0, dt) increments. Channel c draws from derive_seed(seed, c).
NoiseTrajectory sample_white(std::size_t n_channels, std::size_t n_steps, double dt,
                             std::uint64_t seed);

/// C(tau) = (1/2pi) Int d omega lambda(omega) e^{-i omega tau}
///        = lambda0 / (2 sqrt(pi) t_c) * exp(-tau^2 / (4 t_c^2)).
/// White spectra are rejected: their correlation is lambda0 * delta(tau).
double correlation_time(const NoiseSpectrum& spectrum, double tau);

/// Covariance of the box-integrated increments Int_{k dt}^{(k+1) dt} xi,
/// i.e. Cov(dB_n, dB_{n+k}), exact for the Gaussian spectrum.
double increment_covariance(const NoiseSpectrum& spectrum, double dt, std::size_t lag);

struct ColoredOptions {
  // Require dt < t_c / 4. Turning this off is only meaningful for near-white
  // studies; the increment covariance is exact either way.
  bool require_resolved = true;
  // Lower bound on the circulant size; two synthesizers sharing one
  // frequency-domain draw must agree on it.
  std::size_t min_embedding_size = 0;
};

/// Circulant-embedding synthesizer for increments of a Gaussian-cutoff
/// spectrum on a fixed grid. The embedding eigenvalues are the discrete
/// spectral weights; synthesis multiplies frequency-domain complex Gaussians
/// by sqrt(weight) and applies an inverse DFT.
class ColoredSynthesizer {
 public:
  ColoredSynthesizer(const NoiseSpectrum& spectrum, std::size_t n_steps, double dt,
                     ColoredOptions options = {});

  /// Embedding size: a power of two >= 2 * n_steps.
  std::size_t embedding_size() const noexcept { return weights_.size(); }
  std::size_t n_steps() const noexcept { return n_steps_; }
  std::span<const double> spectral_weights() const noexcept { return weights_; }
  /// Sum of negative eigenvalues that were clipped, relative to the total.
  double clipped_fraction() const noexcept { return clipped_fraction_; }

  /// `z` holds embedding_size() complex standard normals (unit-variance real
  /// and imaginary parts); writes n_steps increments to `out`.
  void synthesize(std::span<const Complex> z, std::span<double> out) const;

 private:
  std::size_t n_steps_;
  std::vector<double> weights_;  // sqrt(eigenvalue / M)
  double clipped_fraction_ = 0.0;
};

/// Frequency-domain randomness: m complex numbers with independent N(0,1)
/// real and imaginary parts from CounterRng(seed).
std::vector<Complex> frequency_domain_draw(std::size_t m, std::uint64_t seed);

/// Stationary colored increments per channel, channel c seeded with
/// derive_seed(seed, c). Requires a Gaussian-cutoff spectrum.
NoiseTrajectory sample_colored(const NoiseSpectrum& spectrum, std::size_t n_channels,
                               std::size_t n_steps, double dt, std::uint64_t seed,
                               ColoredOptions options = {});

/// Separation between two noise arguments (x, t) and (y, t') as seen from a
/// frame boosted by v along the parallel axis.
struct BoostedCorrelationQuery {
  double v = 0.0;                            // m/s
  double delta_x_parallel = 0.0;             // m
  std::array<double, 2> delta_x_perp{0, 0};  // m
  double delta_t = 0.0;                      // s
};

/// i[q_perp.dx_perp + (q dx - omega dt)], the exponent in the isotropic frame.
Complex unboosted_phase(const BoostedCorrelationQuery& query, double q_parallel,
                        std::array<double, 2> q_perp, double omega);

/// i q_perp.dx_perp + i gamma[(q + omega v/c^2) dx - (omega + q v) dt].
/// Reduces to unboosted_phase bit-for-bit at v = 0.
Complex boosted_phase(const BoostedCorrelationQuery& query, double q_parallel,
                      std::array<double, 2> q_perp, double omega);

/// lambda0 (2 pi)^-4 Int d omega d^3q e^{-omega^2 t_c^2 - q^2 r_c^2} e^{boosted_phase},
/// in closed form. At v = 0 this is lambda0 * C_t(dt) * S(dx) with
/// C_t(tau) = e^{-tau^2/4t_c^2} / (2 sqrt(pi) t_c), S(r) = e^{-r^2/4r_c^2} / (8 pi^{3/2} r_c^3).
double boosted_correlation(const NoiseSpectrum& spectrum, const BoostedCorrelationQuery& query);

/// Lorentz factor for speed v, throws InvalidBoost unless |v| < c.
double lorentz_gamma(double v);

/// CSV with header "step,channel,increment".
void write_csv(const NoiseTrajectory& trajectory, std::ostream& out);

}  // namespace cslab::noise
