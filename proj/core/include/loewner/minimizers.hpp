#pragma once

#include <complex>
#include <vector>

#include "loewner/config.hpp"
#include "loewner/driving.hpp"
#include "loewner/flow.hpp"

namespace loewner {

// One labeled constraint: the chain must either swallow z or leave it on the
// prescribed side (+1: right of the curve, -1: left).
struct Constraint {
  cplx z;
  int side = +1;
};

struct ConstraintSet {
  std::vector<Constraint> points;
};

// Outcome of flowing one constrained point to the horizon.
struct PointStatus {
  bool hit = false;
  double tau = 0.0;  // swallowing time when hit
  double w = 0.0;    // cot(arg f_T(z)) when not hit
  bool compatible = false;
};

struct MinimizerResult {
  DrivingFunction driving;
  double energy = 0.0;
  std::vector<PointStatus> status;
  bool converged = true;
};

// Energy-minimal driver whose chain passes through e^{i theta}; integrates
// the coupled system lambda' = 8 Re(z_t)/|z_t|^2, z' = 2/z - lambda'.
// The minimal energy is -8 log(sin(theta)). General targets r e^{i theta}
// follow by scale_driving(., r).
MinimizerResult one_point_minimizer(double theta, const FlowConfig& cfg = {});

// Radial form of the same minimizer: xi(t) = arccos(e^{-t} cos(theta)).
DrivingFunction radial_minimizer_driving(double theta, double t_max = 8.0,
                                         double step = 1e-3);

// Finite-energy driver visiting all the given points, by concatenating
// one-point hitters in the flowed images. Retries point orderings when a
// later target is swallowed early.
MinimizerResult multi_point_construction(const std::vector<cplx>& points,
                                         const FlowConfig& cfg = {});

// Per-point membership classification at horizon T: swallowed by T, or
// ending on the constraint's side.
std::vector<PointStatus> compatible(const DrivingFunction& lambda,
                                    const ConstraintSet& constraints, double T,
                                    const FlowConfig& cfg = {});

struct MinimizeOptions {
  std::size_t knots = 64;
  int penalty_rounds = 8;
  double penalty_start = 1.0;
  double penalty_growth = 10.0;
  double fd_step = 1e-4;
  int max_inner = 30;
  double grad_tol = 1e-6;
  double side_margin = 0.005;  // require side * w >= margin before release
};

// Penalized minimization of I_T over piecewise-linear drivers with the given
// knot count; multistart from zero and from the multi-point construction.
// The result is an upper bound on the constrained infimum. T <= 0 selects
// the capacity bound R^2/2 with R = 2 max|z_i|.
MinimizerResult minimize_constrained(const ConstraintSet& constraints, double T = 0.0,
                                     const MinimizeOptions& opt = {},
                                     const FlowConfig& cfg = {});

}  // namespace loewner
