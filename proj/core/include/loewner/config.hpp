#pragma once

#include <cstddef>

namespace loewner {

// Numerical knobs shared by the flow integrator and the operations built on
// top of it. All times are in capacity time (hcap = 2t).
struct FlowConfig {
  // Relative tolerance of the embedded 4(5) step controller.
  double rel_tol = 1e-9;
  // A flowed point z is declared swallowed once |f_t(z)| < swallow_scale * (1 + |z|).
  double swallow_scale = 1e-6;
  // Hard floor on the step size; hitting it near the singularity is reported
  // as a swallowing with a bracketed tau.
  double min_step = 1e-14;
  // Fraction of the singular time scale |u|^2/4 a single step may cover.
  double step_fraction = 0.35;
};

struct TraceConfig {
  FlowConfig flow{};
  // Capacity-time spacing between trace samples.
  double resolution = 1e-3;
  // Lift-off offset y0 = lift_scale * sqrt(resolution) above the driving value.
  double lift_scale = 1e-4;
};

struct ZipperConfig {
  // Below this turning angle from the vertical the closed-form vertical slit
  // map is used instead of the two-parameter tilted fit.
  double vertical_angle_tol = 1e-6;
  // Newton convergence threshold (on the log-space residual).
  double newton_tol = 1e-13;
  int newton_max_iter = 60;
};

struct WeldingConfig {
  FlowConfig flow{};
  double bisect_tol = 1e-9;
};

}  // namespace loewner
