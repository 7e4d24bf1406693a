#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "cslab/noise.hpp"
#include "cslab/physconst.hpp"

namespace cslab::heating {

/// omega_L(q) = v_s |q|.
struct PhononDispersion {
  double v_s = 4000.0;  // m/s

  void validate() const;
  double omega(double q) const noexcept { return v_s * q; }
};

struct HeatingResult {
  double lambda_eff = 0.0;                // s^-1
  double beta = 0.0;                      // v_s t_c / r_c
  bool passes_bulk_bound = false;         // lambda_eff < bulk heating bound
  double quadrature_error_estimate = 0.0; // relative
  std::optional<double> closed_form;      // s^-1
};

/// lambda_eff = (8 / (3 sqrt(pi))) Int_0^inf dw w^4 e^{-w^2} lambda(v_s w / r_c),
/// the isotropic reduction of the three-dimensional phonon-emission average.
/// Adaptive quadrature on [0, inf); QuadratureError if the estimated
/// relative error is not below 1e-6.
HeatingResult lambda_eff(const noise::NoiseSpectrum& spectrum, const PhononDispersion& dispersion);

/// lambda0 (1 + beta^2)^{-5/2}.
double lambda_eff_closed_form(double lambda0, double beta) noexcept;

/// Smallest beta with lambda0 (1 + beta^2)^{-5/2} <= bound; 0 if lambda0 <= bound.
double threshold_beta(double lambda0, double bound);

struct BoundReport {
  bool bulk_ok = false;
  double cutoff_frequency = 0.0;  // v_s / r_c, s^-1
};

BoundReport bound_check(const HeatingResult& result, const PhononDispersion& dispersion, double r_c,
                        const QuotedConstants& constants = cslab::constants());

struct SweepPoint {
  double beta;
  double lambda_eff_over_lambda0;
  double closed_form_over_lambda0;
};

/// Evaluates lambda_eff at each beta by setting t_c = beta r_c / v_s.
std::vector<SweepPoint> sweep(double lambda0, const PhononDispersion& dispersion, double r_c,
                              std::span<const double> betas);

/// CSV: beta, lambda_eff_over_lambda0.
void write_sweep_csv(std::span<const SweepPoint> points, std::ostream& out);

}  // namespace cslab::heating
