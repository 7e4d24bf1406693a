#include <gtest/gtest.h>

#include <cmath>

#include "cslab/errors.hpp"
#include "cslab/physconst.hpp"
#include "cslab/relativity.hpp"
#include "cslab/rng.hpp"

using namespace cslab;
using namespace cslab::relativity;

namespace {
const double c = constants().c;
}

TEST(Boost, Gamma) {
  EXPECT_DOUBLE_EQ(Boost(0.0).gamma(), 1.0);
  EXPECT_NEAR(Boost(0.6 * c).gamma(), 1.25, 1e-15);
  EXPECT_THROW(Boost{c}, InvalidBoost);
  EXPECT_THROW(Boost(-1.5 * c), InvalidBoost);
  EXPECT_THROW(Boost(NAN), InvalidBoost);
}

TEST(Transform, KnownValues) {
  const auto e = transform({c, 1.0}, Boost(0.6 * c));
  EXPECT_NEAR(e.x, 1.25 * (c - 0.6 * c), 1e-6);
  EXPECT_NEAR(e.t, 1.25 * (1.0 - 0.6), 1e-15);
  const auto o = transform({0, 0}, Boost(0.3 * c));
  EXPECT_EQ(o.x, 0.0);
  EXPECT_EQ(o.t, 0.0);
}

TEST(Transform, IntervalInvariantAndComposes) {
  CounterRng rng(3);
  for (int i = 0; i < 200; ++i) {
    const Event e{(rng.uniform() - 0.5) * 1e9, rng.uniform() - 0.5};
    const double v1 = (rng.uniform() - 0.5) * 1.9 * c, v2 = (rng.uniform() - 0.5) * 1.9 * c;
    const auto b = transform(e, Boost(v1));
    const double s0 = c * c * e.t * e.t - e.x * e.x, s1 = c * c * b.t * b.t - b.x * b.x;
    const double scale = c * c * e.t * e.t + e.x * e.x;
    EXPECT_NEAR(s0, s1, 1e-12 * scale * Boost(v1).gamma() * Boost(v1).gamma());
    const double v12 = (v1 + v2) / (1 + v1 * v2 / (c * c));
    const auto twice = transform(b, Boost(v2)), once = transform(e, Boost(v12));
    EXPECT_NEAR(twice.t, once.t, 1e-9 * (std::abs(once.t) + std::abs(e.t) + std::abs(e.x) / c));
  }
}

TEST(EffectiveVelocity, FiniteAndInfinite) {
  EXPECT_DOUBLE_EQ(std::get<double>(effective_velocity({0, 0}, {10, 2})), 5.0);
  EXPECT_EQ(std::get<InfiniteVelocity>(effective_velocity({0, 1}, {-3, 1})).sign_dx, -1);
  EXPECT_EQ(std::get<InfiniteVelocity>(effective_velocity({0, 1}, {0, 1})).sign_dx, 0);
}

TEST(TimeOrder, FixtureInverts) {
  // Separated by 2c over one second: v_MIN = c/2 and a 0.6c boost flips the order.
  const Event a{0, 0}, b{2 * c, 1.0};
  const auto r = time_order(a, b, Boost(0.6 * c));
  EXPECT_EQ(r.ordering, Ordering::Inverted);
  EXPECT_NEAR(r.delta_t_boosted, 1.25 * (1.0 - 1.2), 1e-14);
  EXPECT_NEAR(min_inversion_boost(a, b), 0.5 * c, 1e-6);
  EXPECT_STREQ(to_string(r.ordering), "Inverted");
  EXPECT_EQ(time_order(a, b, Boost(0.4 * c)).ordering, Ordering::Same);
  EXPECT_EQ(time_order(a, b, Boost(0.5 * c)).ordering, Ordering::Simultaneous);
}

TEST(TimeOrder, SubluminalNeverInverts) {
  CounterRng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double dt = rng.uniform() + 1e-3;
    const Event a{0, 0}, b{(rng.uniform() * 2 - 1) * 0.999 * c * dt, dt};
    const double v = (rng.uniform() * 2 - 1) * 0.999 * c;
    EXPECT_EQ(time_order(a, b, Boost(v)).ordering, Ordering::Same);
  }
  EXPECT_THROW(min_inversion_boost({0, 0}, {0.5 * c, 1.0}), NoInversionPossible);
  EXPECT_THROW(min_inversion_boost({0, 0}, {0, 0}), NoInversionPossible);
}

TEST(TimeOrder, FormulaMatchesTransform) {
  CounterRng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const Event a{(rng.uniform() - 0.5) * 1e9, rng.uniform() - 0.5};
    const Event b{(rng.uniform() - 0.5) * 1e9, rng.uniform() - 0.5};
    const Boost boost((rng.uniform() * 2 - 1) * 0.99 * c);
    const auto x = time_order(a, b, boost), y = time_order_by_transform(a, b, boost);
    const double scale = boost.gamma() * (std::abs(a.t) + std::abs(b.t) + (std::abs(a.x) + std::abs(b.x)) / c);
    EXPECT_NEAR(x.delta_t_boosted, y.delta_t_boosted, 1e-12 * scale);
    if (std::abs(x.delta_t_boosted) > 1e-9 * scale) EXPECT_EQ(x.ordering, y.ordering);
  }
}

TEST(TimeOrder, ThresholdIsSharp) {
  CounterRng rng(7);
  for (int i = 0; i < 200; ++i) {
    const double dt = rng.uniform() + 0.01;
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double dx = sign * (1.2 + 8.0 * rng.uniform()) * c * dt;
    const Event a{0, 0}, b{dx, dt};
    const double vmin = min_inversion_boost(a, b);
    EXPECT_NEAR(vmin, c * c * dt / dx, 1e-12 * c);
    if (std::abs(vmin) * 1.01 < c) EXPECT_EQ(time_order(a, b, Boost(1.01 * vmin)).ordering, Ordering::Inverted);
    EXPECT_EQ(time_order(a, b, Boost(0.99 * vmin)).ordering, Ordering::Same);
    EXPECT_EQ(time_order(a, b, Boost(-vmin)).ordering, Ordering::Same);
  }
}

TEST(TimeOrder, SimultaneousRestEvents) {
  const Event a{0, 1}, b{100, 1};
  EXPECT_DOUBLE_EQ(min_inversion_boost(a, b), 0.0);
  EXPECT_EQ(time_order(a, b, Boost(0.0)).ordering, Ordering::Simultaneous);
  EXPECT_EQ(time_order(a, b, Boost(0.1 * c)).ordering, Ordering::Inverted);
}

TEST(TimeOrder, SwapSymmetry) {
  const Event a{0, 0}, b{3 * c, 1.0};
  const Boost boost(0.5 * c);
  const auto ab = time_order(a, b, boost), ba = time_order(b, a, boost);
  EXPECT_DOUBLE_EQ(ab.delta_t_boosted, -ba.delta_t_boosted);
  EXPECT_EQ(ab.ordering, ba.ordering);
  EXPECT_DOUBLE_EQ(min_inversion_boost(a, b), min_inversion_boost(b, a));
}

TEST(Event, Validation) {
  EXPECT_THROW(Event({NAN, 0}).validate(), InvalidInput);
  EXPECT_THROW(time_order({INFINITY, 0}, {0, 1}, Boost(0)), InvalidInput);
}
