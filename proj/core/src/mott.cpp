#include "cslab/mott.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <ostream>

#include "cslab/errors.hpp"
#include "cslab/format.hpp"
#include "cslab/parallel.hpp"

namespace cslab::mott {
namespace {

using std::numbers::pi;

constexpr double kConvergenceTol = 1e-3;
constexpr std::size_t kMaxRefinements = 2;

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

struct Rule {
  std::vector<double> x, w;
};

Rule gauss_legendre(std::size_t n, double lo, double hi) {
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
      gsl_integration_glfixed_table_alloc(n), &gsl_integration_glfixed_table_free);
  if (!table) throw QuadratureError("could not allocate a Gauss-Legendre table");
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  for (std::size_t i = 0; i < n; ++i) gsl_integration_glfixed_point(lo, hi, i, &r.x[i], &r.w[i], table.get());
  return r;
}

// Orthonormal frame (e1, e2, a_hat).
std::array<Vec3, 3> frame_about(const Vec3& axis) {
  const Vec3 helper = std::abs(axis[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  Vec3 e1{helper[1] * axis[2] - helper[2] * axis[1], helper[2] * axis[0] - helper[0] * axis[2],
          helper[0] * axis[1] - helper[1] * axis[0]};
  const double n1 = norm(e1);
  for (auto& c : e1) c /= n1;
  const Vec3 e2{axis[1] * e1[2] - axis[2] * e1[1], axis[2] * e1[0] - axis[0] * e1[2],
                axis[0] * e1[1] - axis[1] * e1[0]};
  return {e1, e2, axis};
}

struct Domain {
  double r_lo, r_hi, u_lo;
};

Domain support_domain(const MottConfig& cfg) {
  const double a = cfg.a_norm();
  const double rho = cfg.support_sigmas * cfg.sigma;
  Domain d;
  d.r_hi = std::min(a + rho, cfg.quadrature.r_max_multiplier * (a + cfg.sigma));
  if (a > rho) {
    d.r_lo = a - rho;
    const double s = rho / a;
    d.u_lo = std::sqrt(1.0 - s * s);
  } else {
    d.r_lo = 0.0;
    d.u_lo = -1.0;
  }
  return d;
}

std::array<std::size_t, 3> resolution(const MottConfig& cfg, const Domain& d, double cos_k, PhaseForm form) {
  const double sin_k = std::sqrt(std::max(0.0, 1.0 - cos_k * cos_k));
  const double theta_k = std::acos(std::clamp(cos_k, -1.0, 1.0));
  const double theta_max = std::acos(std::clamp(d.u_lo, -1.0, 1.0));
  const double sin_max = std::sin(std::min(theta_max, pi / 2));
  const double k = cfg.k;
  double phase_r, phase_u, phase_phi;
  if (form == PhaseForm::FarField) {
    phase_r = k * (d.r_hi - d.r_lo) * (1.0 - cos_k);
    phase_u = phase_phi = 0.0;
  } else {
    const double worst = theta_k + theta_max >= pi ? 2.0 : 1.0 - std::cos(theta_k + theta_max);
    phase_r = k * (d.r_hi - d.r_lo) * worst;
    phase_u = k * d.r_hi * (std::abs(cos_k) * (1.0 - d.u_lo) + sin_k * sin_max);
    phase_phi = 2.0 * k * d.r_hi * sin_k * sin_max;
  }
  auto count = [](double phase, std::size_t base) {
    return std::max(base, static_cast<std::size_t>(std::ceil(0.5 * phase)) + 24);
  };
  return {count(phase_r, cfg.quadrature.radial_points), count(phase_u, cfg.quadrature.angular_points),
          count(phase_phi, cfg.quadrature.angular_points)};
}

struct Evaluation {
  Complex value;
  double abs_integral;
};

Evaluation evaluate(const MottConfig& cfg, const Domain& d, const Vec3& k_hat, PhaseForm form,
                    std::array<std::size_t, 3> n) {
  const Vec3 a_vec = cfg.a;
  const auto [e1, e2, ah] = frame_about(cfg.a_hat());
  const double k = cfg.k;
  const double cos_ka = dot(k_hat, ah);
  const double kx = dot(k_hat, e1), ky = dot(k_hat, e2);
  const double inv_two_sigma2 = 1.0 / (2.0 * cfg.sigma * cfg.sigma);

  const Rule rr = gauss_legendre(n[0], d.r_lo, d.r_hi);
  const Rule ru = gauss_legendre(n[1], d.u_lo, 1.0);
  const Rule rp = gauss_legendre(n[2], 0.0, 2.0 * pi);
  std::vector<double> cos_p(n[2]), sin_p(n[2]);
  for (std::size_t l = 0; l < n[2]; ++l) {
    cos_p[l] = std::cos(rp.x[l]);
    sin_p[l] = std::sin(rp.x[l]);
  }

  Complex total = 0.0;
  double abs_total = 0.0;
  for (std::size_t i = 0; i < n[0]; ++i) {
    const double r = rr.x[i];
    // d^3R / R = R dR du dphi
    const double wr = rr.w[i] * r;
    for (std::size_t j = 0; j < n[1]; ++j) {
      const double u = ru.x[j];
      const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
      const double wru = wr * ru.w[j];
      Complex acc = 0.0;
      double abs_acc = 0.0;
      for (std::size_t l = 0; l < n[2]; ++l) {
        const Vec3 rhat{s * cos_p[l] * e1[0] + s * sin_p[l] * e2[0] + u * ah[0],
                        s * cos_p[l] * e1[1] + s * sin_p[l] * e2[1] + u * ah[1],
                        s * cos_p[l] * e1[2] + s * sin_p[l] * e2[2] + u * ah[2]};
        const double dx = r * rhat[0] - a_vec[0];
        const double dy = r * rhat[1] - a_vec[1];
        const double dz = r * rhat[2] - a_vec[2];
        const double env = std::exp(-(dx * dx + dy * dy + dz * dz) * inv_two_sigma2);
        if (env == 0.0) continue;
        const double kr = form == PhaseForm::Exact
                              ? s * cos_p[l] * kx + s * sin_p[l] * ky + u * cos_ka
                              : cos_ka;
        const double phase = k * r * (1.0 - kr);
        acc += rp.w[l] * env * Complex(std::cos(phase), std::sin(phase));
        abs_acc += rp.w[l] * env;
      }
      total += wru * acc;
      abs_total += wru * abs_acc;
    }
  }
  return {total, abs_total};
}

}  // namespace

void MottConfig::validate() const {
  if (!(k > 0.0) || !std::isfinite(k)) throw InvalidInput("mott: k must be > 0");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidInput("mott: sigma must be > 0");
  if (!(a_norm() > 3.0 * sigma)) throw InvalidInput("mott: need |a| > 3 sigma");
  if (quadrature.radial_points < 32 || quadrature.angular_points < 32) {
    throw InvalidInput("mott: quadrature needs at least 32 points per axis");
  }
  if (!(quadrature.r_max_multiplier > 1.0)) throw InvalidInput("mott: r_max multiplier must exceed 1");
  if (!(support_sigmas >= 5.0)) throw InvalidInput("mott: support must cover at least 5 sigma");
}

double MottConfig::a_norm() const { return norm(a); }

Vec3 MottConfig::a_hat() const {
  const double n = a_norm();
  return {a[0] / n, a[1] / n, a[2] / n};
}

double v0s_model(const MottConfig& cfg, const Vec3& r) {
  const Vec3 d{r[0] - cfg.a[0], r[1] - cfg.a[1], r[2] - cfg.a[2]};
  return std::exp(-dot(d, d) / (2.0 * cfg.sigma * cfg.sigma));
}

Vec3 direction(const MottConfig& cfg, double cos_theta, double phi) {
  if (!(cos_theta >= -1.0 && cos_theta <= 1.0)) throw InvalidInput("cos_theta must lie in [-1, 1]");
  const auto [e1, e2, ah] = frame_about(cfg.a_hat());
  const double s = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
  Vec3 v;
  for (int i = 0; i < 3; ++i) v[i] = s * std::cos(phi) * e1[i] + s * std::sin(phi) * e2[i] + cos_theta * ah[i];
  return v;
}

AmplitudeResult integrate_amplitude(const MottConfig& cfg, const Vec3& k_hat, PhaseForm form) {
  cfg.validate();
  if (std::abs(norm(k_hat) - 1.0) > 1e-9) throw InvalidInput("mott: k_hat must be a unit vector");
  const Domain d = support_domain(cfg);
  auto n = resolution(cfg, d, dot(k_hat, cfg.a_hat()), form);

  Evaluation prev = evaluate(cfg, d, k_hat, form, n);
  double change = 0.0;
  for (std::size_t refinement = 1; refinement <= kMaxRefinements; ++refinement) {
    for (auto& c : n) c *= 2;
    const Evaluation next = evaluate(cfg, d, k_hat, form, n);
    const double scale = std::max(std::abs(next.value), 1e-6 * next.abs_integral);
    change = std::abs(next.value - prev.value) / scale;
    prev = next;
    if (change < kConvergenceTol) return {next.value, change, n, refinement};
  }
  throw QuadratureError("mott quadrature did not converge: relative change " + fmt17(change) +
                        " after " + std::to_string(kMaxRefinements) + " doublings (points " +
                        std::to_string(n[0]) + "x" + std::to_string(n[1]) + "x" + std::to_string(n[2]) +
                        ")");
}

Complex amplitude_exact(const MottConfig& cfg, const Vec3& k_hat) {
  return integrate_amplitude(cfg, k_hat, PhaseForm::Exact).value;
}

Complex amplitude_approx(const MottConfig& cfg, const Vec3& k_hat) {
  return integrate_amplitude(cfg, k_hat, PhaseForm::FarField).value;
}

AngularProfile angular_profile(const MottConfig& cfg, std::size_t n_angles, std::optional<double> cos_min,
                               PhaseForm form) {
  cfg.validate();
  if (n_angles < 16) throw InvalidInput("angular_profile: need at least 16 angles");
  const double ks = cfg.k * cfg.sigma;
  const double lo = cos_min.value_or(std::max(-1.0, 1.0 - 8.0 / (form == PhaseForm::Exact ? ks * ks : ks)));
  if (!(lo >= -1.0 && lo < 1.0)) throw InvalidInput("angular_profile: cos_min must lie in [-1, 1)");

  AngularProfile p;
  p.cos_theta.resize(n_angles);
  std::vector<double> mag2(n_angles);
  for (std::size_t i = 0; i < n_angles; ++i) {
    p.cos_theta[i] = 1.0 - (1.0 - lo) * static_cast<double>(i) / static_cast<double>(n_angles - 1);
  }
  parallel_for(n_angles, [&](std::size_t i) {
    mag2[i] = std::norm(integrate_amplitude(cfg, direction(cfg, p.cos_theta[i]), form).value);
  });
  const auto peak = std::max_element(mag2.begin(), mag2.end());
  const double peak_value = *peak;
  p.peak_cos_theta = p.cos_theta[static_cast<std::size_t>(peak - mag2.begin())];
  p.intensity.resize(n_angles);
  for (std::size_t i = 0; i < n_angles; ++i) p.intensity[i] = peak_value > 0.0 ? mag2[i] / peak_value : 0.0;

  for (std::size_t i = static_cast<std::size_t>(peak - mag2.begin()) + 1; i < n_angles; ++i) {
    if (p.intensity[i] <= 0.5) {
      const double y0 = p.intensity[i - 1], y1 = p.intensity[i];
      const double x0 = 1.0 - p.cos_theta[i - 1], x1 = 1.0 - p.cos_theta[i];
      p.half_width = x0 + (y0 - 0.5) * (x1 - x0) / (y0 - y1);
      break;
    }
  }
  return p;
}

void write_profile_csv(const AngularProfile& p, std::ostream& out) {
  out << "cos_theta,intensity\n";
  for (std::size_t i = 0; i < p.cos_theta.size(); ++i) out << fmt17(p.cos_theta[i]) << ',' << fmt17(p.intensity[i]) << '\n';
}

}  // namespace cslab::mott
