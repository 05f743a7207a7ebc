#include "loewner/sle_mc.hpp"

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "loewner/errors.hpp"

using namespace loewner;
using std::numbers::pi;

TEST_CASE("kappa = 0 driver is identically zero") {
  auto lam = sample_sle_driver(0.0, 1.0, 1e-2, 7);
  for (double v : lam.values()) CHECK(v == 0.0);
}

TEST_CASE("same seed gives bitwise identical paths") {
  auto a = sample_sle_driver(2.0, 1.0, 1e-3, 1234);
  auto b = sample_sle_driver(2.0, 1.0, 1e-3, 1234);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.values()[i] == b.values()[i]);
  auto c = sample_sle_driver(2.0, 1.0, 1e-3, 1235);
  CHECK(c.values().back() != a.values().back());
}

TEST_CASE("Brownian marginal variance") {
  const double kappa = 2.0, T = 1.0;
  double acc = 0.0;
  const int n = 10000;
  for (int s = 0; s < n; ++s) {
    auto lam = sample_sle_driver(kappa, T, 1e-2, 50000 + s);
    acc += lam.values().back() * lam.values().back() / T;
  }
  // Var(lambda_T^2/T) = 2 kappa^2; CLT bound 3 sigma / sqrt(n).
  CHECK(std::abs(acc / n - kappa) < 3.0 * (std::sqrt(2.0) * kappa) / 100.0);
}

TEST_CASE("schramm_h values") {
  for (double kappa : {0.5, 1.0, 2.0, 4.0})
    CHECK(std::abs(schramm_h(kappa, 0.0) - 0.5) < 1e-12);
  CHECK(schramm_h(4.0, 1.0) == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(schramm_h(4.0, 1e6) < 1e-5);
  CHECK_THROWS_AS(schramm_h(-1.0, 0.0), domain_error);
  // Monotone decreasing in w.
  double prev = 1.0;
  for (double w = -5.0; w <= 5.0; w += 0.25) {
    double h = schramm_h(2.0, w);
    CHECK(h < prev);
    prev = h;
  }
}

TEST_CASE("epsilon_kappa values and uniform decay") {
  CHECK(8.0 * 1.0 / (1.0 + 1.0) == doctest::Approx(4.0));  // F(1) = 4
  CHECK(epsilon_kappa(1.0, 0.0) > 0.0);
  double prev_sup = 1e9;
  for (double kappa : {2.0, 1.0, 0.5, 0.25}) {
    double sup = 0.0;
    for (double w = 0.0; w <= 50.0; w += 0.5)
      sup = std::max(sup, std::abs(epsilon_kappa(kappa, w)));
    CHECK(sup < prev_sup);
    prev_sup = sup;
  }
}

TEST_CASE("passage probability of the imaginary axis point is 1/2") {
  ConstraintSet cs;
  cs.points.push_back({cplx(0.0, 1.0), +1});
  auto est = estimate_passage(2.0, cs, 2.0, 1e-3, 20000, 99);
  CHECK(std::abs(est.probability - 0.5) < est.half_width + 0.01);
}

TEST_CASE("passage probability is mirror symmetric") {
  ConstraintSet a, b;
  a.points.push_back({std::polar(1.0, pi / 3), -1});
  b.points.push_back({std::polar(1.0, 2 * pi / 3), +1});
  auto ea = estimate_passage(2.0, a, 2.0, 1e-3, 20000, 7);
  auto eb = estimate_passage(2.0, b, 2.0, 1e-3, 20000, 8);
  CHECK(std::abs(ea.probability - eb.probability) < ea.half_width + eb.half_width + 0.01);
}

TEST_CASE("MC passage matches Schramm quadrature") {
  ConstraintSet cs;
  cs.points.push_back({std::polar(1.0, pi / 3), -1});
  const double ref = schramm_h(2.0, 1.0 / std::tan(pi / 3));
  auto est = estimate_passage(2.0, cs, 2.0, 1e-4, 20000, 11);
  CHECK(std::abs(est.probability - ref) < est.half_width + 0.01);
}

TEST_CASE("quadrature LD rates approach 4 log 2 monotonically") {
  ConstraintSet cs;
  cs.points.push_back({std::polar(1.0, pi / 4), -1});
  auto rows = ld_rate({1.0, 0.5, 0.25, 0.1}, cs, 2.0, 1e-3, 0, 0,
                      RateMethod::quadrature);
  const double limit = 4.0 * std::log(2.0);
  double prev_gap = 1e9;
  for (const auto& r : rows) {
    CHECK_FALSE(r.monte_carlo);
    CHECK(r.reference == doctest::Approx(limit).epsilon(1e-12));
    const double gap = std::abs(r.rate - limit);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap / limit <= 0.15);
}

TEST_CASE("MC and quadrature rates agree at kappa = 0.5") {
  ConstraintSet cs;
  cs.points.push_back({std::polar(1.0, pi / 3), -1});
  auto q = ld_rate({0.5}, cs, 2.0, 1e-4, 0, 0, RateMethod::quadrature);
  auto m = ld_rate({0.5}, cs, 2.0, 1e-4, 40000, 21, RateMethod::monte_carlo);
  CHECK(std::abs(q[0].rate - m[0].rate) < 0.1);
}

TEST_CASE("vertical rate is kappa log 2 and vanishes with kappa") {
  ConstraintSet cs;
  cs.points.push_back({cplx(0.0, 1.0), -1});
  auto rows = ld_rate({1.0, 0.5}, cs, 2.0, 1e-3, 0, 0, RateMethod::quadrature);
  for (const auto& r : rows) {
    CHECK(r.reference == 0.0);
    CHECK(r.rate == doctest::Approx(r.kappa * std::log(2.0)).epsilon(1e-10));
  }
}

TEST_CASE("constraint validation rejects bad geometry") {
  ConstraintSet empty;
  CHECK_THROWS_AS(estimate_passage(2.0, empty, 1.0, 1e-3, 10, 0), malformed_input);
  ConstraintSet below;
  below.points.push_back({cplx(0.5, -1.0), -1});
  CHECK_THROWS_AS(estimate_passage(2.0, below, 1.0, 1e-3, 10, 0), domain_error);
  CHECK_THROWS_AS(ld_rate({1.0}, below, 1.0, 1e-3, 10, 0, RateMethod::quadrature),
                  domain_error);
}

TEST_CASE("conditioned SDE at kappa = 0 on the axis stays put") {
  auto lam = simulate_conditioned(0.0, cplx(0.0, 1.0), 0.2, 1e-5, 0);
  for (double v : lam.values()) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("conditioned SDE at kappa = 0 reproduces the one-point minimizer") {
  auto ref = one_point_minimizer(pi / 3);
  auto lam = simulate_conditioned(0.0, std::polar(1.0, pi / 3), 1.0, 1e-5, 0);
  const double T = std::min(ref.driving.horizon(), lam.horizon());
  double sup = 0.0;
  for (double t = 0.0; t <= T; t += T / 200)
    sup = std::max(sup, std::abs(lam.value(t) - ref.driving.value(t)));
  // Also compare final values (both drivers are constant after tau).
  sup = std::max(sup, std::abs(lam.values().back() - ref.driving.values().back()));
  CHECK(sup < 1e-3);
}

TEST_CASE("small-kappa conditioned paths concentrate on the minimizer") {
  auto ref = one_point_minimizer(pi / 3);
  const double t_half = 0.5 * ref.status[0].tau;
  const int n = 300;
  double sum = 0.0, sumsq = 0.0;
  for (int s = 0; s < n; ++s) {
    auto lam = simulate_conditioned(0.1, std::polar(1.0, pi / 3), t_half, 1e-4, 300 + s);
    const double v = lam.value(t_half);
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sumsq / n - mean * mean) / n);
  CHECK(std::abs(mean - ref.driving.value(t_half)) < 3.0 * se + 0.01);
}
