#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "cslab/hilbert.hpp"

namespace cslab::mott {

using Vec3 = std::array<double, 3>;

struct QuadratureSpec {
  std::size_t radial_points = 32;   // minimum; the resolution rule may raise it
  std::size_t angular_points = 32;  // minimum for each of cos(theta_R) and phi_R
  double r_max_multiplier = 1.5;    // outer radius clip: r_max_multiplier * (|a| + sigma)
};

/// Emitter at the origin, atom at `a`, outgoing wavenumber k. The transition
/// potential V_0S is modeled as a Gaussian envelope of width sigma about `a`.
struct MottConfig {
  double k = 20.0;             // m^-1
  Vec3 a{0.0, 0.0, 20.0};      // m
  double sigma = 1.0;          // m
  QuadratureSpec quadrature{};
  double support_sigmas = 7.0;  // integration covers the ball |R - a| <= support_sigmas * sigma

  /// k > 0, sigma > 0, |a| > 3 sigma, at least 32 points per axis.
  void validate() const;
  double a_norm() const;
  Vec3 a_hat() const;
};

/// exp(-|R - a|^2 / (2 sigma^2)).
double v0s_model(const MottConfig& config, const Vec3& r);

enum class PhaseForm {
  Exact,     // k R (1 - k_hat . R_hat)
  FarField,  // k R (1 - k_hat . a_hat)
};

struct AmplitudeResult {
  Complex value;
  double relative_change = 0.0;  // |f(2n) - f(n)| / max(|f(2n)|, floor)
  std::array<std::size_t, 3> points{};  // (R, cos theta_R, phi_R) of the reported value
  std::size_t refinements = 0;
};

/// Int d^3R R^-1 e^{i phase} V_0S(R) by product Gauss-Legendre quadrature in
/// (R, cos theta_R, phi_R) about a_hat. Point counts follow a resolution
/// rule (about one node per radian of phase variation along each axis, plus
/// a margin) and are doubled until successive values differ by < 1e-3
/// relative; at most two doublings, then QuadratureError. The relative test
/// uses max(|f|, 1e-6 Int|integrand|) so deeply suppressed directions do not
/// chase rounding noise.
AmplitudeResult integrate_amplitude(const MottConfig& config, const Vec3& k_hat, PhaseForm form);

Complex amplitude_exact(const MottConfig& config, const Vec3& k_hat);
Complex amplitude_approx(const MottConfig& config, const Vec3& k_hat);

/// Unit vector with k_hat . a_hat = cos_theta and azimuth `phi` about a_hat.
Vec3 direction(const MottConfig& config, double cos_theta, double phi = 0.0);

struct AngularProfile {
  std::vector<double> cos_theta;  // descending from 1
  std::vector<double> intensity;  // |f|^2 / max |f|^2
  double peak_cos_theta = 1.0;
  /// 1 - cos(theta) where the profile first falls to 1/2 (linear
  /// interpolation); nullopt if it never does on the grid.
  std::optional<double> half_width;
};

/// |f|^2 on n_angles points uniformly spaced in cos(theta) over
/// [cos_min, 1]. The default range follows the cone width of each form:
/// cos_min = max(-1, 1 - 8/(k sigma)^2) for Exact (transverse dephasing
/// across the envelope) and max(-1, 1 - 8/(k sigma)) for FarField.
AngularProfile angular_profile(const MottConfig& config, std::size_t n_angles,
                               std::optional<double> cos_min = {}, PhaseForm form = PhaseForm::Exact);

/// CSV: cos_theta, intensity.
void write_profile_csv(const AngularProfile& profile, std::ostream& out);

}  // namespace cslab::mott
