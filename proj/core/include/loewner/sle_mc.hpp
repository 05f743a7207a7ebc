#pragma once

#include <cstdint>
#include <vector>

#include "loewner/config.hpp"
#include "loewner/driving.hpp"
#include "loewner/minimizers.hpp"

namespace loewner {

struct PassageEstimate {
  double kappa = 0.0;
  ConstraintSet constraint;
  double probability = 0.0;
  double half_width = 0.0;  // 95% binomial confidence half-width
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

// sqrt(kappa) times a standard Brownian path on a uniform dt-grid.
// Deterministic per seed (counter-based generator).
DrivingFunction sample_sle_driver(double kappa, double T, double dt,
                                  std::uint64_t seed);

// Schramm's formula: the probability that the SLE_kappa trace passes to the
// right of a point with cot(arg) = w,
//   h_kappa(w) = (1/2) int_w^inf (1+s^2)^{-4/kappa} ds / int_0^inf (...) ds,
// evaluated by adaptive quadrature after s = tan(u).
double schramm_h(double kappa, double w);

// epsilon_kappa(w) = kappa (w^2+1)^{-4/kappa} / int_w^inf (s^2+1)^{-4/kappa} ds
//                    - F(w),  F(w) = 8w/(w^2+1).
double epsilon_kappa(double kappa, double w);

// Monte Carlo probability that the SLE_kappa chain satisfies every
// constraint at horizon T (hit, or final side agrees). Path-parallel;
// deterministic given (seed, n_samples). dt is the step floor near the
// constraint points; far away, steps are coarsened adaptively.
PassageEstimate estimate_passage(double kappa, const ConstraintSet& constraints,
                                 double T, double dt, std::size_t n_samples,
                                 std::uint64_t seed);

enum class RateMethod { automatic_choice, quadrature, monte_carlo };

struct RateRow {
  double kappa = 0.0;
  double rate = 0.0;       // -kappa log(probability)
  double reference = 0.0;  // 4 log(w^2+1) limit for a single rare-side point
  bool monte_carlo = false;
  bool lower_bound = false;  // zero empirical count: rate is one-sided
};

// Large-deviation rate sequence. Quadrature applies to single-point sets;
// Monte Carlo is refused below kappa = 0.25 (rare events beyond naive MC).
std::vector<RateRow> ld_rate(const std::vector<double>& kappas,
                             const ConstraintSet& constraints, double T, double dt,
                             std::size_t n_samples, std::uint64_t seed,
                             RateMethod method = RateMethod::automatic_choice);

struct ConditionedOptions {
  // The drift term F(w) = 8w/(w^2+1); optionally clamped at 0 from above
  // (an alternative reading of the conditioned system's drift).
  bool clamp_drift = false;
};

// Euler-Maruyama integration of the SDE for the chain conditioned to hit z:
//   dX = sqrt(kappa) dB + [F(w_t) + eps_kappa(w_t)] / Im(z_t) dt,
// coupled with dz_t = 2/z_t dt - dX. kappa = 0 gives the deterministic
// one-point minimizer. Stops at the (bracketed) swallowing time of z.
DrivingFunction simulate_conditioned(double kappa, cplx z, double T, double dt,
                                     std::uint64_t seed,
                                     const ConditionedOptions& opt = {});

}  // namespace loewner
