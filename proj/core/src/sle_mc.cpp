#include "loewner/sle_mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "loewner/errors.hpp"
#include "parallel.hpp"

namespace loewner {

namespace {

constexpr double kPi = std::numbers::pi;

// Counter-based stream: splitmix64 seeded by a mix of (seed, stream), so
// path i of run s is reproducible independently of evaluation order.
struct Rng {
  std::uint64_t state;

  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

  Rng(std::uint64_t seed, std::uint64_t stream)
      : state(mix(seed) ^ mix(mix(stream) + 0x632BE59BD9B4E019ull)) {}

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  double uniform_open() {  // (0, 1]
    return (double((next() >> 11)) + 1.0) * 0x1.0p-53;
  }

  double gaussian() {
    const double r = std::sqrt(-2.0 * std::log(uniform_open()));
    return r * std::cos(2.0 * kPi * uniform_open());
  }
};

// int_w^inf (1+s^2)^{-4/kappa} ds  =  int_atan(w)^{pi/2} cos(u)^{8/kappa - 2} du.
double tail_integral(double kappa, double w) {
  const double ex = 8.0 / kappa - 2.0;
  auto f = [ex](double u) { return std::pow(std::cos(u), ex); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, std::atan(w), kPi / 2, 12, 1e-13);
}

void check_kappa(double kappa) {
  if (!(kappa > 0) || kappa > 4.0)
    throw domain_error("kappa must lie in (0, 4]");
}

void check_constraints(const ConstraintSet& cs) {
  if (cs.points.empty()) throw malformed_input("empty constraint set");
  for (const auto& c : cs.points)
    if (!(c.z.imag() > 0))
      throw domain_error("constraint points must lie in the open upper half-plane");
}

// One Strang-split slit step of the centered point flow: half driving jump,
// exact vertical-slit map of capacity time bdt, half jump. Returns false
// when the point is absorbed; u then holds the pre-absorption position.
bool slit_step(cplx& u, double delta, double bdt) {
  cplx v = u - delta / 2.0;
  if (v.imag() <= 0.0 || std::norm(v) <= 4.0 * bdt) {
    u = v;
    return false;
  }
  v = cplx(0.0, 1.0) * std::sqrt(-(v * v + 4.0 * bdt));
  u = v - delta / 2.0;
  if (u.imag() > 0.0) return true;
  u = v;
  return false;
}

}  // namespace

DrivingFunction sample_sle_driver(double kappa, double T, double dt,
                                  std::uint64_t seed) {
  if (!(dt > 0) || !(T > 0)) throw domain_error("horizon and step must be positive");
  if (kappa < 0) throw domain_error("kappa must be nonnegative");
  Rng rng(seed, 0);
  std::vector<double> ts{0.0}, vs{0.0};
  double t = 0.0;
  while (t < T) {
    const double h = std::min(dt, T - t);
    t += h;
    vs.push_back(vs.back() + std::sqrt(kappa * h) * rng.gaussian());
    ts.push_back(t);
  }
  return DrivingFunction(std::move(ts), std::move(vs));
}

double schramm_h(double kappa, double w) {
  check_kappa(kappa);
  return 0.5 * tail_integral(kappa, w) / tail_integral(kappa, 0.0);
}

double epsilon_kappa(double kappa, double w) {
  check_kappa(kappa);
  const double dens = std::pow(1.0 + w * w, -4.0 / kappa);
  return kappa * dens / tail_integral(kappa, w) - 8.0 * w / (w * w + 1.0);
}

namespace {

// One path: flow all constraint points under a freshly sampled driver and
// report whether every constraint is met at time T.
bool run_path(double kappa, const ConstraintSet& cs, double T, double dt,
              std::uint64_t seed, std::uint64_t path) {
  Rng rng(seed, path + 1);
  const std::size_t n = cs.points.size();
  std::vector<cplx> u(n);
  std::vector<char> done(n, 0);
  for (std::size_t i = 0; i < n; ++i) u[i] = cs.points[i].z;
  double t = 0.0;
  while (t < T) {
    bool all_done = true;
    double scale = 1e300;
    for (std::size_t i = 0; i < n; ++i)
      if (!done[i]) {
        all_done = false;
        scale = std::min(scale, std::norm(u[i]));
      }
    if (all_done) break;
    // Far from every live point the driver can be coarsened: a block of
    // steps only enters through its total increment and capacity.
    const double bdt = std::min(T - t, std::max(dt, 0.01 * scale / 4.0));
    const double delta = std::sqrt(kappa * bdt) * rng.gaussian();
    for (std::size_t i = 0; i < n; ++i)
      if (!done[i] && !slit_step(u[i], delta, bdt)) {
        // For kappa <= 4 a genuine hit has probability zero; absorption is a
        // resolution artifact, so classify by the side at absorption time.
        if (cs.points[i].side * u[i].real() < 0.0) return false;
        done[i] = 1;
      }
    t += bdt;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (done[i]) continue;
    if (cs.points[i].side * u[i].real() < 0.0) return false;
  }
  return true;
}

}  // namespace

PassageEstimate estimate_passage(double kappa, const ConstraintSet& constraints,
                                 double T, double dt, std::size_t n_samples,
                                 std::uint64_t seed) {
  check_kappa(kappa);
  check_constraints(constraints);
  if (!(T > 0) || !(dt > 0)) throw domain_error("horizon and step must be positive");
  const int workers = std::min<int>(detail::thread_count(), 64);
  std::vector<std::size_t> counts(workers, 0);
  std::vector<std::thread> pool;
  for (int wi = 0; wi < workers; ++wi) {
    pool.emplace_back([&, wi] {
      std::size_t c = 0;
      for (std::uint64_t p = wi; p < n_samples; p += workers)
        if (run_path(kappa, constraints, T, dt, seed, p)) ++c;
      counts[wi] = c;
    });
  }
  for (auto& th : pool) th.join();
  std::size_t count = 0;
  for (std::size_t c : counts) count += c;
  PassageEstimate est;
  est.kappa = kappa;
  est.constraint = constraints;
  est.samples = n_samples;
  est.seed = seed;
  est.probability = double(count) / double(n_samples);
  const double p = est.probability;
  est.half_width = count == 0 || count == n_samples
                       ? 3.0 / double(n_samples)
                       : 1.96 * std::sqrt(p * (1.0 - p) / double(n_samples));
  return est;
}

namespace {

// Rate-function reference for a single constrained point: 4 log(w^2+1) when
// the required side is the rare one, 0 otherwise.
double rate_reference(const Constraint& c) {
  const double w = c.z.real() / c.z.imag();
  const double w_evt = c.side < 0 ? w : -w;
  return w_evt > 0 ? 4.0 * std::log1p(w_evt * w_evt) : 0.0;
}

double quadrature_probability(double kappa, const Constraint& c) {
  const double w = c.z.real() / c.z.imag();
  const double h = schramm_h(kappa, w);
  return c.side < 0 ? h : 1.0 - h;
}

}  // namespace

std::vector<RateRow> ld_rate(const std::vector<double>& kappas,
                             const ConstraintSet& constraints, double T, double dt,
                             std::size_t n_samples, std::uint64_t seed,
                             RateMethod method) {
  check_constraints(constraints);
  const bool single = constraints.points.size() == 1;
  std::vector<RateRow> rows;
  for (double kappa : kappas) {
    check_kappa(kappa);
    RateRow row;
    row.kappa = kappa;
    row.reference = single ? rate_reference(constraints.points[0])
                           : std::numeric_limits<double>::quiet_NaN();
    bool use_mc = method == RateMethod::monte_carlo ||
                  (method == RateMethod::automatic_choice && (!single || kappa >= 0.25));
    if (use_mc && kappa < 0.25) {
      if (!single)
        throw domain_error(
            "Monte Carlo rates below kappa = 0.25 are outside the resolvable regime");
      use_mc = false;
    }
    if (use_mc) {
      auto est = estimate_passage(kappa, constraints, T, dt, n_samples, seed);
      row.monte_carlo = true;
      if (est.probability == 0.0) {
        row.lower_bound = true;  // rule-of-three upper bound on p
        row.rate = -kappa * std::log(3.0 / double(n_samples));
      } else {
        row.rate = -kappa * std::log(est.probability);
      }
    } else {
      if (!single)
        throw domain_error("quadrature rates exist only for single-point sets");
      row.rate = -kappa * std::log(quadrature_probability(kappa, constraints.points[0]));
    }
    rows.push_back(row);
  }
  return rows;
}

DrivingFunction simulate_conditioned(double kappa, cplx z, double T, double dt,
                                     std::uint64_t seed,
                                     const ConditionedOptions& opt) {
  if (kappa < 0 || kappa > 4.0) throw domain_error("kappa must lie in [0, 4]");
  if (!(z.imag() > 0)) throw domain_error("target must lie in the open half-plane");
  if (!(dt > 0) || !(T > 0)) throw domain_error("horizon and step must be positive");
  // eps_kappa lookup, uniform in atan(w); per-step quadrature would dominate.
  std::vector<double> eps_tab;
  const int tab_n = 4001;
  if (kappa > 0) {
    eps_tab.resize(tab_n);
    for (int i = 0; i < tab_n; ++i) {
      const double v = -kPi / 2 + kPi * (i + 0.5) / tab_n;
      eps_tab[i] = epsilon_kappa(kappa, std::tan(v));
    }
  }
  auto eps_at = [&](double w) {
    if (kappa <= 0) return 0.0;
    const double v = std::atan(w);
    double x = (v + kPi / 2) / kPi * tab_n - 0.5;
    x = std::clamp(x, 0.0, double(tab_n - 1));
    const int i0 = std::min(int(x), tab_n - 2);
    const double frac = x - i0;
    return eps_tab[i0] * (1.0 - frac) + eps_tab[i0 + 1] * frac;
  };
  Rng rng(seed, 0);
  std::vector<double> ts{0.0}, vs{0.0};
  cplx zt = z;
  double t = 0.0, X = 0.0;
  while (t < T) {
    const double h = std::min(dt, T - t);
    if (std::norm(zt) <= 4.0 * h) break;  // swallowed within this step
    const double w = zt.real() / zt.imag();
    double F = 8.0 * w / (w * w + 1.0);
    if (opt.clamp_drift) F = std::min(F, 0.0);
    const double drift = (F + eps_at(w)) / zt.imag();
    double dX = drift * h;
    if (kappa > 0) dX += std::sqrt(kappa * h) * rng.gaussian();
    zt += 2.0 / zt * h - dX;
    if (!(zt.imag() > 0)) break;
    X += dX;
    t += h;
    ts.push_back(t);
    vs.push_back(X);
  }
  if (ts.size() < 2) throw resolution_error("target swallowed within the first step");
  return DrivingFunction(std::move(ts), std::move(vs));
}

}  // namespace loewner
