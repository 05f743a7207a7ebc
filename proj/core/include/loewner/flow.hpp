#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "loewner/config.hpp"
#include "loewner/driving.hpp"

namespace loewner {

using cplx = std::complex<double>;

// One marked point carried by the centered Loewner flow f_t = g_t - lambda_t.
struct MarkedPoint {
  std::string label;
  cplx start{};
  cplx position{};  // f_T(z) when alive; last position before swallowing else
  bool alive = true;
  double tau_lo = 0.0;  // swallowing-time bracket when dead
  double tau_hi = 0.0;
  double tau() const { return 0.5 * (tau_lo + tau_hi); }
};

struct FlowState {
  double time = 0.0;
  double driving_value = 0.0;
  std::vector<MarkedPoint> points;
};

// Integrates the centered flow  d f_t(z)/dt = 2/f_t(z) - lambda_dot  for all
// marked points up to capacity time T. Points reaching the swallowing
// threshold are marked dead with a bracketed tau.
FlowState flow_points(const DrivingFunction& lambda, const std::vector<cplx>& points,
                      double T, const FlowConfig& cfg = {});

// Advances a single centered point from time ta to tb. Returns the time
// reached (tb, or the swallowing time).
double advance_centered(cplx& u, const DrivingFunction& lambda, double ta, double tb,
                        const FlowConfig& cfg, bool* swallowed, double swallow_abs);

// A simple curve in H sampled in capacity parametrization: hcap(gamma[0,t]) = 2t.
struct CurveSample {
  std::vector<double> times;
  std::vector<cplx> points;
};

// gamma_t = g_t^{-1}(lambda_t + i y0) computed by reverse-time integration.
CurveSample trace(const DrivingFunction& lambda, double T, double resolution,
                  const TraceConfig& cfg = {});

// Single trace point (reverse flow from lambda(t) + i*lift down to time 0).
cplx trace_point(const DrivingFunction& lambda, double t, double lift,
                 const FlowConfig& cfg = {});

// Half-plane capacity of a sampled curve: the coefficient of 1/z in the
// mapping-out expansion, equal to twice the last capacity time.
double hcap(const CurveSample& curve);

// Radial Loewner flow in the unit disk,
//   d h_t(z)/dt = -h_t(z) (h_t(z) + e^{i xi}) / (h_t(z) - e^{i xi}).
FlowState radial_flow(const DrivingFunction& xi, const std::vector<cplx>& points,
                      double T, const FlowConfig& cfg = {});

// Tip of the radial chain at time t via reverse-time integration from
// (1 - lift) e^{i xi(t)}.
cplx radial_trace_point(const DrivingFunction& xi, double t, double lift,
                        const FlowConfig& cfg = {});

// Conformal welding: for each curve time the two real preimages of the curve
// point under f_T, found by bisection on forward-flow swallowing times.
struct WeldingPair {
  double x_neg = 0.0;
  double x_pos = 0.0;
  double curve_time = 0.0;
};

struct WeldingReport {
  std::vector<WeldingPair> pairs;
  // Lemma-style quasisymmetry diagnostics: range of x / (-phi(x)) over the
  // pairs and of the symmetric difference-quotient ratio on equispaced triples.
  double ratio1_min = 0.0, ratio1_max = 0.0;
  double ratio2_min = 0.0, ratio2_max = 0.0;
};

WeldingReport welding(const DrivingFunction& lambda, double T,
                      const std::vector<double>& curve_times,
                      const WeldingConfig& cfg = {});

// Swallowing time of a real boundary point under lambda's flow (+inf if the
// point survives to time limit).
double boundary_tau(const DrivingFunction& lambda, double x, double t_limit,
                    const FlowConfig& cfg = {});

// CSV "t,re,im" and JSON mirror.
void write_csv(const CurveSample& curve, std::ostream& os);
CurveSample read_curve_csv(std::istream& is);
std::string to_json(const CurveSample& curve);

}  // namespace loewner
