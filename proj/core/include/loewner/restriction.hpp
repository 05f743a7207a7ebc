#pragma once

#include <vector>

#include "loewner/config.hpp"
#include "loewner/driving.hpp"
#include "loewner/flow.hpp"
#include "loewner/zipper.hpp"

namespace loewner {

enum class HullKind { vertical_slit, half_disk };

// Compact hull attached to the real axis at positive distance from 0, with a
// closed-form hydrodynamically normalized map-out g_K(z) = z + hcap/z + ...
struct SlitHull {
  HullKind kind = HullKind::vertical_slit;
  double base = 0.0;  // foot on the axis (center of the half-disk's diameter)
  double size = 1.0;  // slit height, or disk radius

  double hcap() const;
  cplx map_out(cplx z) const;
  // Value and first three derivatives of map_out at a real point outside the
  // hull's footprint on the axis.
  Zipper::Jet jet(double x) const;
  // Boundary samples from just above the left foot to the tip (slit) or to
  // the right foot (half-disk); suitable zipper input with base left_foot().
  std::vector<cplx> boundary(std::size_t n) const;
  double left_foot() const;
};

struct RestrictionConfig {
  std::size_t hull_samples = 256;
  std::size_t nodes = 33;  // capacity-time quadrature nodes (rounded up to odd)
  double trace_resolution = 1e-3;
  // Adaptive Simpson controls for the loop-measure integral, whose integrand
  // can concentrate near s = 0 when the hull is small and close to the base.
  double loop_rel_tol = 1e-5;
  int loop_max_depth = 40;
  FlowConfig flow{};
  ZipperConfig zipper{};
};

// Derivatives at 0 of psi_t : H \ f_t(K) -> H, the conformal map fixing 0 and
// infinity with psi_t(z) - z bounded. t = 0 uses the closed form; t > 0 flows
// the hull boundary and re-fits a zipper map.
struct PsiDerivatives {
  double prime_0 = 1.0;        // psi_t'(0)
  double double_prime_0 = 0.0; // psi_t''(0)
  double schwarzian_0 = 0.0;   // S psi_t (0)
};

PsiDerivatives psi_derivatives(const SlitHull& K, const DrivingFunction& lambda,
                               double t, const RestrictionConfig& cfg = {});

// Mass of Brownian loops in H meeting both the curve gamma[0,t] and K:
//   m^l = -(1/3) int_0^t S psi_s(0) ds.
// -S psi_s(0)/6 is a half-plane capacity, so the integrand must stay >= 0.
double loop_measure(const SlitHull& K, const DrivingFunction& lambda, double t,
                    const RestrictionConfig& cfg = {});

// Energy of the curve in (H \ K, 0, inf), in half-plane coordinates:
//   (1/2) int_0^t [ lambda_dot(s) - 3 psi_s''(0)/psi_s'(0) ]^2 ds.
double restricted_energy(const SlitHull& K, const DrivingFunction& lambda, double t,
                         const RestrictionConfig& cfg = {});

// The same quantity evaluated three independent ways.
struct RestrictionReport {
  double restricted = 0.0;       // the driving-based integral above
  double schwarzian_form = 0.0;  // 3 ln psi_0'(0) + 12 m^l - 3 ln psi_t'(0) + I
  double zipped_image = 0.0;     // energy of the re-zipped image curve psi_0(gamma)
  double loop = 0.0;
  double psi0_prime = 1.0;
  double psit_prime = 1.0;
  double curve_energy = 0.0;  // I(gamma[0,t])
};

RestrictionReport restriction_identity(const SlitHull& K, const DrivingFunction& lambda,
                                       double t, const RestrictionConfig& cfg = {});

// Two slits growing towards each other: gamma^T from 0 is driven by W; the
// image of gamma~^S under z -> -1/z is a curve from 0 driven by U.
struct TwoSlitConfig {
  DrivingFunction W;
  DrivingFunction U;
  double T = 0.0;
  double S = 0.0;
};

struct CommutationResult {
  double lhs = 0.0;  // I(gamma~^S) + I_{H \ gamma~^S, 0, tip}(gamma^T)
  double rhs = 0.0;  // I(gamma^T) + I_{H \ gamma^T, inf, tip}(gamma~^S)
  double residual = 0.0;
};

// Both orderings of the two-slit energy sum; the restricted terms use
//   (1/2) int [ W_dot(t) + 6 V(t) ]^2 dt,
// where V(t) is the final driving value of the re-zipped image -1/f_t(gamma~).
CommutationResult commutation_check(const TwoSlitConfig& config,
                                    const RestrictionConfig& cfg = {});

}  // namespace loewner
