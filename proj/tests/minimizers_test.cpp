#include "loewner/minimizers.hpp"

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "loewner/errors.hpp"

using namespace loewner;
using std::numbers::pi;

TEST_CASE("one-point minimizer energy matches -8 log sin theta") {
  for (double theta : {pi / 6, pi / 4, pi / 3, pi / 2, 2 * pi / 3}) {
    auto res = one_point_minimizer(theta);
    CHECK(std::abs(res.energy - (-8.0 * std::log(std::sin(theta)))) < 1e-3);
  }
}

TEST_CASE("vertical one-point minimizer is the trivial geodesic") {
  auto res = one_point_minimizer(pi / 2);
  CHECK(res.energy < 1e-10);
  for (double v : res.driving.values()) CHECK(std::abs(v) < 1e-10);
  CHECK(res.status[0].tau == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("one-point minimizer trace passes through the target") {
  auto res = one_point_minimizer(pi / 3);
  auto curve = trace(res.driving, res.driving.horizon(), 2e-4);
  const cplx target = std::polar(1.0, pi / 3);
  double best = 1e9;
  for (cplx p : curve.points) best = std::min(best, std::abs(p - target));
  CHECK(best < 1e-3);
}

TEST_CASE("remainder energy along the minimizer is -8 log sin(arg z_t)") {
  auto res = one_point_minimizer(pi / 3);
  const double total = res.energy;
  const double tau = res.status[0].tau;
  for (int k = 1; k <= 10; ++k) {
    const double t = 0.08 * k * tau;
    auto st = flow_points(res.driving, {std::polar(1.0, pi / 3)}, t);
    REQUIRE(st.points[0].alive);
    const double remainder = total - energy(res.driving, t).total;
    const double predicted = -8.0 * std::log(std::sin(std::arg(st.points[0].position)));
    CHECK(std::abs(remainder - predicted) < 1e-3);
  }
}

TEST_CASE("one-point minimizer rejects bad angles") {
  CHECK_THROWS_AS(one_point_minimizer(0.0), domain_error);
  CHECK_THROWS_AS(one_point_minimizer(pi), domain_error);
}

TEST_CASE("radial minimizer driving formula") {
  auto xi = radial_minimizer_driving(pi / 2);
  CHECK(xi.value(0.0) == doctest::Approx(pi / 2));
  CHECK(xi.value(3.0) == doctest::Approx(pi / 2));

  auto xi3 = radial_minimizer_driving(pi / 3);
  CHECK(xi3.value(std::log(2.0)) == doctest::Approx(std::acos(0.25)).epsilon(1e-6));
  CHECK(xi3.value(8.0) == doctest::Approx(pi / 2).epsilon(1e-3));
}

TEST_CASE("radial chain of the minimizer shadows the chordal one") {
  // psi(z) = e^{-i theta} (z - z0)/(z - conj(z0)) maps H to the disk with z0
  // at the origin and the curve base 0 at boundary angle theta; the radial
  // chain driven by xi must stay near psi(chordal trace).
  const double theta = pi / 3;
  const cplx z0 = std::polar(1.0, theta);
  auto chordal = one_point_minimizer(theta);
  auto curve = trace(chordal.driving, chordal.driving.horizon(), 2e-4);
  auto xi = radial_minimizer_driving(theta, 8.0);
  for (double s : {0.3, 1.0, 2.0}) {
    cplx w = radial_trace_point(xi, s, 1e-6) * std::polar(1.0, theta);
    cplx z = (std::conj(z0) * w - z0) / (w - 1.0);  // psi^{-1}
    double best = 1e9;
    for (cplx p : curve.points) best = std::min(best, std::abs(p - z));
    CHECK(best < 5e-3);
  }
  CHECK(std::abs(radial_trace_point(xi, 8.0, 1e-6)) < 1e-3);
}

TEST_CASE("multi-point construction reduces to one point for n = 1") {
  auto one = one_point_minimizer(pi / 3);
  auto multi = multi_point_construction({std::polar(1.0, pi / 3)});
  CHECK(multi.energy == doctest::Approx(one.energy).epsilon(1e-6));
  CHECK(multi.status[0].tau == doctest::Approx(one.status[0].tau).epsilon(1e-6));
}

TEST_CASE("multi-point construction visits both targets") {
  const cplx a = std::polar(1.0, pi / 3);
  const cplx b = 2.0 * std::polar(1.0, pi / 4);
  auto res = multi_point_construction({a, b});
  auto curve = trace(res.driving, res.driving.horizon(), 2e-4);
  for (cplx target : {a, b}) {
    double best = 1e9;
    for (cplx p : curve.points) best = std::min(best, std::abs(p - target));
    CHECK(best < 1e-3);
  }
  // Visiting both can never be cheaper than either single-point optimum.
  CHECK(res.energy >= -8.0 * std::log(std::sin(pi / 3)) - 1e-6);
  CHECK(res.energy >= -8.0 * std::log(std::sin(pi / 4)) - 1e-6);
}

TEST_CASE("mirror pair construction succeeds in both orders") {
  const cplx a = std::polar(1.0, pi / 3);
  const cplx b = -std::conj(a);
  auto res1 = multi_point_construction({a, b});
  auto res2 = multi_point_construction({b, a});
  CHECK(res1.energy == doctest::Approx(res2.energy).epsilon(1e-6));
}

TEST_CASE("compatibility classification for the trivial driver") {
  auto lam = DrivingFunction::zero(1.0);
  ConstraintSet cs;
  cs.points.push_back({cplx(1.0, 1.0), +1});
  cs.points.push_back({cplx(-1.0, 1.0), +1});
  cs.points.push_back({cplx(-1.0, 1.0), -1});
  auto st = compatible(lam, cs, 1.0);
  CHECK(st[0].compatible);
  CHECK_FALSE(st[1].compatible);
  CHECK(st[2].compatible);
}

TEST_CASE("minimizer driving is compatible with its own target via hit") {
  auto res = one_point_minimizer(pi / 3);
  ConstraintSet cs;
  cs.points.push_back({std::polar(1.0, pi / 3), +1});
  cs.points.push_back({std::polar(1.0, pi / 3), -1});
  FlowConfig cfg;
  cfg.swallow_scale = 2e-3;  // target sits on the curve up to sampling error
  auto st = compatible(res.driving, cs, res.driving.horizon(), cfg);
  CHECK(st[0].hit);
  CHECK(st[1].hit);
}

TEST_CASE("constrained minimization brackets the one-point optimum") {
  ConstraintSet cs;
  cs.points.push_back({std::polar(1.0, pi / 6), -1});
  auto res = minimize_constrained(cs);
  REQUIRE(res.status[0].compatible);
  const double opt = 8.0 * std::log(2.0);
  CHECK(res.energy <= opt * 1.02);
  CHECK(res.energy >= opt * 0.90);
}

TEST_CASE("already compatible constraint costs nothing") {
  ConstraintSet cs;
  cs.points.push_back({cplx(1.0, 1.0), +1});
  auto res = minimize_constrained(cs, 1.0);
  CHECK(res.energy <= 1e-3);
  CHECK(res.status[0].compatible);
}

TEST_CASE("mirror equivariance of the constrained minimizer") {
  ConstraintSet cs, csm;
  cs.points.push_back({std::polar(1.0, pi / 4), -1});
  csm.points.push_back({-std::conj(std::polar(1.0, pi / 4)), +1});
  auto a = minimize_constrained(cs);
  auto b = minimize_constrained(csm);
  REQUIRE(a.status[0].compatible);
  REQUIRE(b.status[0].compatible);
  CHECK(std::abs(a.energy - b.energy) <= 0.01 * std::max(a.energy, b.energy));
}

TEST_CASE("adding a constraint never decreases the minimized energy") {
  ConstraintSet one, two;
  one.points.push_back({std::polar(1.0, pi / 6), -1});
  two.points = one.points;
  two.points.push_back({std::polar(2.0, pi / 2), -1});
  auto a = minimize_constrained(one, 8.0);
  auto b = minimize_constrained(two, 8.0);
  CHECK(b.energy >= a.energy - 0.02 * a.energy);
}
