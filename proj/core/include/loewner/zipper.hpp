#pragma once

#include <complex>
#include <vector>

#include "loewner/config.hpp"
#include "loewner/driving.hpp"
#include "loewner/flow.hpp"

namespace loewner {

// One elementary slit map-out. The tilted slit through the fitted point is
//   f(w) = (w - p)^(1-alpha) (w + q)^alpha,   alpha*q = (1-alpha)*p,
// hydrodynamically normalized, with the slit emanating from 0 at angle
// pi*(1-alpha). alpha = 1/2 degenerates to g(z) = sqrt(z^2 + h^2), inverted
// in closed form.
struct ZipperStep {
  double alpha = 0.5;
  double p = 0.0;
  double q = 0.0;
  double dt = 0.0;      // capacity-time increment of the step
  double w_star = 0.0;  // image of the new tip; the driving increment
};

// Discretized mapping-out of a simple arc attached to the real axis,
// built by iterated slit fits. Gives both the driving function (the inverse
// Loewner transform) and the composed map with derivatives at real points.
class Zipper {
 public:
  Zipper(const std::vector<cplx>& points, double base = 0.0,
         const ZipperConfig& cfg = {});

  // Driving function of the arc, normalized so lambda(0) = 0.
  DrivingFunction driving() const;
  double total_capacity_time() const { return times_.back(); }
  double total_hcap() const { return 2.0 * times_.back(); }
  // Driving value at the end of the arc, in the original (uncentered) frame.
  double final_driving() const { return base_ + values_.back(); }
  double base() const { return base_; }

  // Value and first three derivatives of the composed hydrodynamically
  // normalized map-out G at a real point outside the hull footprint.
  struct Jet {
    double v = 0.0, d1 = 1.0, d2 = 0.0, d3 = 0.0;
    double schwarzian() const { return d3 / d1 - 1.5 * (d2 / d1) * (d2 / d1); }
  };
  Jet evaluate_real(double x) const;

  // G(z) for a point of the domain.
  cplx map_point(cplx z) const;

  // Finite-difference (Richardson) jet from map values only; an independent
  // cross-check of the chain-rule derivatives.
  Jet evaluate_real_fd(double x, double step_scale = 1e-3) const;

 private:
  double base_;
  ZipperConfig cfg_;
  std::vector<ZipperStep> steps_;
  std::vector<double> times_;   // cumulative capacity times, times_[0] = 0
  std::vector<double> values_;  // cumulative driving values, values_[0] = 0
};

// Curve -> driving function. The input must be a simple arc in H approaching
// the real axis at its start; `base` is its attachment point.
DrivingFunction inverse_transform(const std::vector<cplx>& points, double base = 0.0,
                                  const ZipperConfig& cfg = {});
DrivingFunction inverse_transform(const CurveSample& curve,
                                  const ZipperConfig& cfg = {});

// Applies z -> -1/z to the curve samples plus an analytic tail (lambda is
// constant after T, so the tail is the reverse flow of the vertical ray),
// and reverses the traversal order. The result starts near 0 and is a valid
// inverse_transform input.
std::vector<cplx> reverse_curve(const CurveSample& curve, const DrivingFunction& lambda,
                                double tail_capacity, int tail_samples = 240,
                                const TraceConfig& cfg = {});

// Driving function of the time-reversed curve: trace, invert through -1/z,
// re-zip. The horizon of the result grows with tail_capacity.
DrivingFunction rev_driving(const DrivingFunction& lambda, double T,
                            double tail_capacity, double resolution = 1e-3,
                            const TraceConfig& tcfg = {}, const ZipperConfig& zcfg = {});

// Convergence table for the reversibility check, one row per refinement level.
struct ReversalRow {
  double resolution = 0.0;
  double tail_capacity = 0.0;
  double energy_fwd = 0.0;
  double energy_rev = 0.0;
  double rel_err = 0.0;
};

std::vector<ReversalRow> reversal_table(const DrivingFunction& lambda, double T,
                                        const std::vector<double>& resolutions,
                                        const std::vector<double>& tail_capacities);

}  // namespace loewner
