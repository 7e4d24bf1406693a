#include "cslab/physconst.hpp"

#include <cmath>

namespace cslab {

const QuotedConstants& constants() noexcept {
  static const QuotedConstants k{
      .lambda_csl_central = 2e-9,
      .lambda_csl_log10_uncertainty = 1.0,
      .r_c_standard = 1e-7,
      .lambda_cantilever = std::pow(10.0, -7.7),
      .gamma_ray_cutoff = 2e19,
      .bulk_heating_bound = 1e-11,
      .phonon_cutoff_estimate = 0.4e11,
      .v_sound_default = 4000.0,
      .v_solar_cmb = 4e5,
      .c = 299792458.0,
      .cantilever_frequency = 8174.0,
  };
  return k;
}

}  // namespace cslab
