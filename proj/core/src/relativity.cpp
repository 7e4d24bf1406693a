#include "cslab/relativity.hpp"

#include <cmath>

#include "cslab/errors.hpp"
#include "cslab/format.hpp"
#include "cslab/noise.hpp"
#include "cslab/physconst.hpp"

namespace cslab::relativity {
namespace {

double c() { return constants().c; }

Ordering classify(double rest, double boosted) {
  if (std::abs(boosted) < kSimultaneityTolerance) return Ordering::Simultaneous;
  if (rest == 0.0) return Ordering::Inverted;
  return (rest > 0.0) == (boosted > 0.0) ? Ordering::Same : Ordering::Inverted;
}

}  // namespace

void Event::validate() const {
  if (!std::isfinite(x) || !std::isfinite(t)) throw InvalidInput("event coordinates must be finite");
}

Boost::Boost(double v) : v_(v), gamma_(noise::lorentz_gamma(v)) {}

Event transform(const Event& e, const Boost& boost) {
  e.validate();
  const double v = boost.v(), g = boost.gamma();
  return {g * (e.x - v * e.t), g * (e.t - v * e.x / (c() * c()))};
}

EffectiveVelocity effective_velocity(const Event& a, const Event& b) {
  a.validate();
  b.validate();
  const double dt = b.t - a.t;
  const double dx = b.x - a.x;
  if (dt == 0.0) return InfiniteVelocity{dx > 0.0 ? 1 : (dx < 0.0 ? -1 : 0)};
  return dx / dt;
}

const char* to_string(Ordering ordering) noexcept {
  switch (ordering) {
    case Ordering::Same: return "Same";
    case Ordering::Inverted: return "Inverted";
    case Ordering::Simultaneous: return "Simultaneous";
  }
  return "?";
}

OrderResult time_order(const Event& a, const Event& b, const Boost& boost) {
  a.validate();
  b.validate();
  const double dt = b.t - a.t;
  const double dx = b.x - a.x;
  const double cc = c() * c();
  // Written as gamma (dt - v dx / c^2) rather than dt gamma (1 - v v_AB / c^2)
  // so simultaneous rest-frame events need no special case.
  const double boosted = boost.gamma() * (dt - boost.v() * dx / cc);
  return {boosted, classify(dt, boosted)};
}

OrderResult time_order_by_transform(const Event& a, const Event& b, const Boost& boost) {
  const Event ap = transform(a, boost);
  const Event bp = transform(b, boost);
  const double boosted = bp.t - ap.t;
  return {boosted, classify(b.t - a.t, boosted)};
}

double min_inversion_boost(const Event& a, const Event& b) {
  const auto v_ab = effective_velocity(a, b);
  if (const auto* inf = std::get_if<InfiniteVelocity>(&v_ab)) {
    if (inf->sign_dx == 0) throw NoInversionPossible("coincident events have no ordering to invert");
    return 0.0;
  }
  const double v = std::get<double>(v_ab);
  if (!(std::abs(v) > c())) {
    throw NoInversionPossible("|v_AB| = " + fmt17(std::abs(v)) + " m/s does not exceed c; ordering is frame-independent");
  }
  return c() * c() * (b.t - a.t) / (b.x - a.x);
}

}  // namespace cslab::relativity
