#pragma once

#include <algorithm>
#include <cmath>

namespace loewner::detail {

// Adaptive Dormand-Prince 5(4) integrator over a generic state type.
// State must support s + s, double * s. Returns the time reached: t1 when
// the integration completed, earlier when `stop` fired or the step size
// hit `min_step` (reported through *hit_floor).
template <typename State, typename RHS, typename NormFn, typename CapFn,
          typename StopFn>
double integrate_dp45(State& y, double t0, double t1, RHS&& f, NormFn&& norm,
                      CapFn&& cap, StopFn&& stop, double rel_tol,
                      double min_step, bool* hit_floor = nullptr) {
  if (hit_floor) *hit_floor = false;
  double t = t0;
  double h = std::min(cap(y, t), t1 - t0);
  int rejected_in_row = 0;
  while (t < t1) {
    if (stop(y, t)) return t;
    // Rounding tail of a clamped final step: the interval is complete.
    if (t1 - t <= std::max(min_step, 1e-14 * (std::abs(t) + std::abs(t1))))
      return t1;
    h = std::min({h, t1 - t, cap(y, t)});
    if (!(h > min_step)) {
      if (hit_floor) *hit_floor = true;
      return t;
    }
    const State k1 = f(y, t);
    const State k2 = f(y + (h * 0.2) * k1, t + 0.2 * h);
    const State k3 = f(y + h * ((3.0 / 40) * k1 + (9.0 / 40) * k2), t + 0.3 * h);
    const State k4 = f(y + h * ((44.0 / 45) * k1 + (-56.0 / 15) * k2 +
                                (32.0 / 9) * k3),
                       t + 0.8 * h);
    const State k5 =
        f(y + h * ((19372.0 / 6561) * k1 + (-25360.0 / 2187) * k2 +
                   (64448.0 / 6561) * k3 + (-212.0 / 729) * k4),
          t + (8.0 / 9) * h);
    const State k6 =
        f(y + h * ((9017.0 / 3168) * k1 + (-355.0 / 33) * k2 +
                   (46732.0 / 5247) * k3 + (49.0 / 176) * k4 +
                   (-5103.0 / 18656) * k5),
          t + h);
    const State y5 = y + h * ((35.0 / 384) * k1 + (500.0 / 1113) * k3 +
                              (125.0 / 192) * k4 + (-2187.0 / 6784) * k5 +
                              (11.0 / 84) * k6);
    const State k7 = f(y5, t + h);
    const State err =
        h * ((71.0 / 57600) * k1 + (-71.0 / 16695) * k3 + (71.0 / 1920) * k4 +
             (-17253.0 / 339200) * k5 + (22.0 / 525) * k6 + (-1.0 / 40) * k7);
    const double sc = rel_tol * (1.0 + norm(y));
    const double e = norm(err);
    if (e <= sc || rejected_in_row > 30) {
      y = y5;
      t += h;
      rejected_in_row = 0;
      double fac = (e > 0) ? 0.9 * std::pow(sc / e, 0.2) : 5.0;
      h *= std::clamp(fac, 0.2, 5.0);
    } else {
      ++rejected_in_row;
      h *= std::max(0.2, 0.9 * std::pow(sc / e, 0.2));
    }
  }
  return t1;
}

}  // namespace loewner::detail
