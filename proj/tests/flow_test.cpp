#include "loewner/flow.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include "doctest.h"
#include "loewner/errors.hpp"

using namespace loewner;

TEST_CASE("zero driving matches the explicit solution sqrt(z^2+4t)") {
  auto lam = DrivingFunction::zero(1.0);
  std::vector<cplx> pts;
  for (int i = 1; i <= 10; ++i)
    for (int j = 1; j <= 10; ++j)
      pts.emplace_back(-2.0 + 0.45 * i, 0.35 * j);
  for (double t : {0.2, 1.0}) {
    auto st = flow_points(lam, pts, t);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      REQUIRE(st.points[k].alive);
      cplx exact = std::sqrt(pts[k] * pts[k] + 4.0 * t);
      if (exact.real() * pts[k].real() < 0) exact = -exact;
      CHECK(std::abs(st.points[k].position - exact) / std::abs(exact) < 1e-6);
    }
  }
}

TEST_CASE("zero driving traces the vertical ray 2i sqrt(t)") {
  auto lam = DrivingFunction::zero(1.0);
  auto curve = trace(lam, 1.0, 1e-3);
  for (std::size_t i = 0; i < curve.times.size(); i += 97) {
    cplx exact(0.0, 2.0 * std::sqrt(curve.times[i]));
    CHECK(std::abs(curve.points[i] - exact) < 2e-3);
  }
  CHECK(hcap(curve) == doctest::Approx(2.0));
}

TEST_CASE("capacity parametrization holds along a generic trace") {
  auto lam = DrivingFunction::sampled([](double t) { return std::sin(4 * t); }, 0.5);
  for (int k = 1; k <= 10; ++k) {
    double t = 0.05 * k;
    auto curve = trace(lam, t, 1e-3);
    CHECK(hcap(curve) == doctest::Approx(2.0 * t).epsilon(1e-4));
  }
}

TEST_CASE("trace is reflection equivariant") {
  auto lam = DrivingFunction::sampled([](double t) { return t - 2 * t * t; }, 0.4);
  std::vector<double> ts = lam.times();
  std::vector<double> vs;
  for (double v : lam.values()) vs.push_back(-v);
  DrivingFunction mirrored(ts, vs);
  auto a = trace(lam, 0.4, 1e-3);
  auto b = trace(mirrored, 0.4, 1e-3);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); i += 23) {
    CHECK(a.points[i].real() == doctest::Approx(-b.points[i].real()).epsilon(1e-6));
    CHECK(a.points[i].imag() == doctest::Approx(b.points[i].imag()).epsilon(1e-6));
  }
}

TEST_CASE("swallowing time of points on the trace equals the passage time") {
  auto lam = DrivingFunction::sampled([](double t) { return 0.8 * t; }, 0.5);
  auto curve = trace(lam, 0.5, 1e-4);
  // The sampled points sit ~1e-6 off the exact curve, so the swallowing
  // threshold must dominate that offset.
  FlowConfig cfg;
  cfg.swallow_scale = 1e-4;
  for (std::size_t i : {1000ul, 2500ul, 4000ul}) {
    auto st = flow_points(lam, {curve.points[i]}, 0.5, cfg);
    REQUIRE_FALSE(st.points[0].alive);
    CHECK(st.points[0].tau() == doctest::Approx(curve.times[i]).epsilon(2e-4));
  }
}

TEST_CASE("scaling covariance of the trace") {
  auto lam = DrivingFunction::sampled([](double t) { return std::sin(3 * t); }, 0.3);
  const double u = 2.0;
  auto scaled = scale_driving(lam, u);
  cplx g1 = trace_point(lam, 0.25, 1e-6);
  cplx g2 = trace_point(scaled, u * u * 0.25, 1e-6 * u);
  CHECK(std::abs(g2 - u * g1) < 1e-4);
}

TEST_CASE("radial flow fixed points and tip decay") {
  auto xi = DrivingFunction::zero(8.0);
  auto st = radial_flow(xi, {cplx(0.0, 0.0), cplx(-1.0, 0.0)}, 5.0);
  CHECK(std::abs(st.points[0].position) < 1e-12);
  CHECK(std::abs(st.points[1].position - cplx(-1.0, 0.0)) < 1e-9);

  // cos(xi) = e^{-t} cos(theta): the radial chain aimed at the origin.
  const double theta = std::acos(0.5);  // pi/3
  auto xi_min = DrivingFunction::sampled(
      [&](double t) { return std::acos(std::exp(-t) * std::cos(theta)); }, 8.0, 1e-3);
  cplx tip = radial_trace_point(xi_min, 8.0, 1e-6);
  CHECK(std::abs(tip) < 1e-3);
}

TEST_CASE("welding of the vertical slit is the mirror map") {
  auto lam = DrivingFunction::zero(1.0);
  std::vector<double> grid{0.1, 0.3, 0.5, 0.7, 0.9};
  auto rep = welding(lam, 1.0, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& p = rep.pairs[i];
    CHECK(p.x_pos == doctest::Approx(-p.x_neg).epsilon(1e-6));
    // Exact preimage of gamma_t under sqrt(z^2+4T): +-2 sqrt(T-t).
    CHECK(p.x_pos == doctest::Approx(2.0 * std::sqrt(1.0 - grid[i])).epsilon(1e-5));
  }
  CHECK(rep.ratio1_min == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.ratio1_max == doctest::Approx(1.0).epsilon(1e-6));
}

namespace {

// Independent reference: collision time of the reverse boundary flow
// v' = -2/v + lambda'(T - s) computed with a fixed-order RK4 and its own
// step policy.
double rk4_collision(const DrivingFunction& lam, double T, double v0) {
  double v = v0, s = 0.0;
  while (v * v > 1e-10 && s < T) {
    double h = std::max(1e-10, std::min(1e-6, 0.02 * v * v));
    auto f = [&](double vv, double ss) { return -2.0 / vv + lam.slope(T - ss); };
    double k1 = f(v, s);
    double k2 = f(v + 0.5 * h * k1, s + 0.5 * h);
    double k3 = f(v + 0.5 * h * k2, s + 0.5 * h);
    double k4 = f(v + h * k3, s + h);
    v += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    s += h;
  }
  return T - (s + v * v / 4.0);
}

}  // namespace

TEST_CASE("welding pairs are swallowed together under the reverse flow") {
  auto lam = DrivingFunction::sampled([](double t) { return 1.2 * std::sqrt(t) * t; }, 0.6);
  std::vector<double> grid{0.15, 0.3, 0.45};
  auto rep = welding(lam, 0.6, grid);
  for (const auto& p : rep.pairs) {
    CHECK(p.x_neg < 0.0);
    CHECK(p.x_pos > 0.0);
    const double t_pos = rk4_collision(lam, 0.6, p.x_pos);
    const double t_neg = rk4_collision(lam, 0.6, p.x_neg);
    CHECK(t_pos == doctest::Approx(p.curve_time).epsilon(1e-5));
    CHECK(std::abs(t_pos - t_neg) < 1e-5);
  }
  CHECK(rep.ratio1_min > 0.0);
  CHECK(std::isfinite(rep.ratio2_max));
}

TEST_CASE("curve csv round trip") {
  auto lam = DrivingFunction::zero(0.5);
  auto curve = trace(lam, 0.5, 1e-2);
  std::stringstream ss;
  write_csv(curve, ss);
  auto back = read_curve_csv(ss);
  REQUIRE(back.points.size() == curve.points.size());
  CHECK(std::abs(back.points[7] - curve.points[7]) < 1e-14);
}
