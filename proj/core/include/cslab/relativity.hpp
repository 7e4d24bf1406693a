#pragma once

#include <variant>

namespace cslab::relativity {

/// One spatial dimension along the boost axis.
struct Event {
  double x = 0.0;  // m
  double t = 0.0;  // s

  void validate() const;
};

class Boost {
 public:
  /// Throws InvalidBoost unless |v| < c.
  explicit Boost(double v);

  double v() const noexcept { return v_; }
  double gamma() const noexcept { return gamma_; }

 private:
  double v_;
  double gamma_;
};

/// (gamma (x - v t), gamma (t - v x / c^2)).
Event transform(const Event& event, const Boost& boost);

/// Returned by effective_velocity for simultaneous events.
struct InfiniteVelocity {
  int sign_dx = 0;  // sign of x_B - x_A; 0 if the events coincide
  bool operator==(const InfiniteVelocity&) const = default;
};

using EffectiveVelocity = std::variant<double, InfiniteVelocity>;

/// (x_B - x_A) / (t_B - t_A), or InfiniteVelocity when t_B == t_A.
EffectiveVelocity effective_velocity(const Event& a, const Event& b);

enum class Ordering { Same, Inverted, Simultaneous };

const char* to_string(Ordering ordering) noexcept;

struct OrderResult {
  double delta_t_boosted = 0.0;  // s
  Ordering ordering = Ordering::Same;
};

inline constexpr double kSimultaneityTolerance = 1e-30;  // s

/// t'_B - t'_A = gamma ((t_B - t_A) - v (x_B - x_A) / c^2). Ordering compares
/// its sign with t_B - t_A; when the rest-frame events are simultaneous and
/// the boosted ones are not, the order has changed and is reported Inverted.
OrderResult time_order(const Event& a, const Event& b, const Boost& boost);

/// Same classification computed by transforming both events.
OrderResult time_order_by_transform(const Event& a, const Event& b, const Boost& boost);

/// c^2 / v_AB = c^2 (t_B - t_A) / (x_B - x_A), signed. Throws
/// NoInversionPossible when |v_AB| <= c.
double min_inversion_boost(const Event& a, const Event& b);

}  // namespace cslab::relativity
