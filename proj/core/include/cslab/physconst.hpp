#pragma once

namespace cslab {

/// Quoted physical constants and experimental bounds, SI units.
///
/// Central values only. Order-of-magnitude bands are kept as metadata in
/// `lambda_csl_log10_uncertainty` and are never propagated.
struct QuotedConstants {
  double lambda_csl_central;            // s^-1, noise coupling needed for latent-image reduction
  double lambda_csl_log10_uncertainty;  // decades
  double r_c_standard;                  // m (1e-5 cm)
  double lambda_cantilever;             // s^-1, tentative residual noise 10^-7.7
  double gamma_ray_cutoff;              // s^-1, germanium emission bound on the spectral cutoff
  double bulk_heating_bound;            // s^-1, upper bound on lambda_eff
  double phonon_cutoff_estimate;        // s^-1, v_s / r_c
  double v_sound_default;               // m/s
  double v_solar_cmb;                   // m/s, solar-system speed in the CMB frame
  double c;                             // m/s, exact
  double cantilever_frequency;          // s^-1
};

/// The immutable constant set.
const QuotedConstants& constants() noexcept;

}  // namespace cslab
