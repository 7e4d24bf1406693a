#include "cslab/heating.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <ostream>

#include "cslab/errors.hpp"
#include "cslab/format.hpp"
#include "cslab/parallel.hpp"

namespace cslab::heating {
namespace {

constexpr double kMaxRelativeError = 1e-6;
constexpr std::size_t kWorkspace = 200;

struct Integrand {
  const noise::NoiseSpectrum* spectrum;
  double scale;  // v_s / r_c
};

double integrand(double w, void* params) {
  const auto* p = static_cast<const Integrand*>(params);
  const double w2 = w * w;
  return w2 * w2 * std::exp(-w2) * p->spectrum->power(p->scale * w);
}

}  // namespace

void PhononDispersion::validate() const {
  if (!(v_s > 0.0) || !std::isfinite(v_s)) throw InvalidInput("speed of sound must be > 0");
}

double lambda_eff_closed_form(double lambda0, double beta) noexcept {
  return lambda0 * std::pow(1.0 + beta * beta, -2.5);
}

double threshold_beta(double lambda0, double bound) {
  if (!(lambda0 > 0.0) || !(bound > 0.0)) throw InvalidInput("threshold_beta needs positive rates");
  if (lambda0 <= bound) return 0.0;
  return std::sqrt(std::pow(bound / lambda0, -0.4) - 1.0);
}

HeatingResult lambda_eff(const noise::NoiseSpectrum& spectrum, const PhononDispersion& dispersion) {
  spectrum.validate();
  dispersion.validate();

  HeatingResult out;
  out.beta = dispersion.v_s * spectrum.t_c / spectrum.r_c;
  out.closed_form = lambda_eff_closed_form(spectrum.lambda0, out.beta);

  Integrand params{&spectrum, dispersion.v_s / spectrum.r_c};
  gsl_function f{&integrand, &params};
  std::unique_ptr<gsl_integration_workspace, decltype(&gsl_integration_workspace_free)> ws(
      gsl_integration_workspace_alloc(kWorkspace), &gsl_integration_workspace_free);
  double value = 0.0, abserr = 0.0;
  gsl_error_handler_t* old = gsl_set_error_handler_off();
  const int status = gsl_integration_qagiu(&f, 0.0, 0.0, 1e-10, kWorkspace, ws.get(), &value, &abserr);
  gsl_set_error_handler(old);

  const double prefactor = 8.0 / (3.0 * std::sqrt(std::numbers::pi));
  out.lambda_eff = prefactor * value;
  out.quadrature_error_estimate = value > 0.0 ? abserr / value : 0.0;
  if (status != GSL_SUCCESS && out.quadrature_error_estimate >= kMaxRelativeError) {
    throw QuadratureError(std::string("lambda_eff quadrature failed: ") + gsl_strerror(status));
  }
  if (!(out.quadrature_error_estimate < kMaxRelativeError)) {
    throw QuadratureError("lambda_eff quadrature error estimate " + fmt17(out.quadrature_error_estimate) +
                          " exceeds 1e-6");
  }
  out.passes_bulk_bound = out.lambda_eff < constants().bulk_heating_bound;
  return out;
}

BoundReport bound_check(const HeatingResult& result, const PhononDispersion& dispersion, double r_c,
                        const QuotedConstants& constants) {
  dispersion.validate();
  if (!(r_c > 0.0)) throw InvalidInput("r_c must be > 0");
  return {result.lambda_eff < constants.bulk_heating_bound, dispersion.v_s / r_c};
}

std::vector<SweepPoint> sweep(double lambda0, const PhononDispersion& dispersion, double r_c,
                              std::span<const double> betas) {
  dispersion.validate();
  std::vector<SweepPoint> out(betas.size());
  parallel_for(betas.size(), [&](std::size_t i) {
    const double beta = betas[i];
    if (!(beta >= 0.0)) throw InvalidInput("beta must be >= 0");
    const auto spectrum = beta == 0.0 ? noise::NoiseSpectrum::white(lambda0, r_c)
                                      : noise::NoiseSpectrum::gaussian_cutoff(lambda0, beta * r_c / dispersion.v_s, r_c);
    const HeatingResult r = lambda_eff(spectrum, dispersion);
    out[i] = {beta, r.lambda_eff / lambda0, *r.closed_form / lambda0};
  });
  return out;
}

void write_sweep_csv(std::span<const SweepPoint> points, std::ostream& out) {
  out << "beta,lambda_eff_over_lambda0\n";
  for (const auto& p : points) out << fmt17(p.beta) << ',' << fmt17(p.lambda_eff_over_lambda0) << '\n';
}

}  // namespace cslab::heating
