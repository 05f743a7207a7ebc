#include "loewner/minimizers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "loewner/errors.hpp"
#include "rk45.hpp"

namespace loewner {

namespace {

constexpr double kPi = std::numbers::pi;

// State of the coupled minimizer system: flowed target, driving value,
// accumulated energy.
struct MinState {
  cplx z;
  double lam = 0.0;
  double E = 0.0;
};

MinState operator+(const MinState& a, const MinState& b) {
  return {a.z + b.z, a.lam + b.lam, a.E + b.E};
}
MinState operator*(double c, const MinState& a) { return {c * a.z, c * a.lam, c * a.E}; }

double min_norm(const MinState& s) { return std::abs(s.z) + std::abs(s.lam); }

MinState min_rhs(const MinState& s) {
  const double ld = 8.0 * s.z.real() / std::norm(s.z);
  return {2.0 / s.z - ld, ld, 0.5 * ld * ld};
}

}  // namespace

MinimizerResult one_point_minimizer(double theta, const FlowConfig& cfg) {
  if (!(theta > 0) || !(theta < kPi))
    throw domain_error("one-point target angle must lie in (0, pi)");
  MinState s{std::polar(1.0, theta), 0.0, 0.0};
  std::vector<double> ts{0.0}, vs{0.0};
  double t = 0.0;
  const double stop_r = 1e-5;
  while (std::abs(s.z) > stop_r) {
    const double r2 = std::norm(s.z);
    const double window = 0.01 * r2;
    detail::integrate_dp45(
        s, t, t + window, [](const MinState& y, double) { return min_rhs(y); },
        min_norm,
        [&](const MinState& y, double) {
          return std::max(cfg.step_fraction * std::norm(y.z) / 4.0, 1e-300);
        },
        [](const MinState&, double) { return false; }, cfg.rel_tol, cfg.min_step);
    t += window;
    ts.push_back(t);
    vs.push_back(s.lam);
  }
  // Near the hit the point falls in vertically: remaining capacity |z|^2/4,
  // vanishing driving increment.
  const double tau = t + std::norm(s.z) / 4.0;
  ts.push_back(tau);
  vs.push_back(s.lam);
  MinimizerResult res;
  res.driving = DrivingFunction(std::move(ts), std::move(vs));
  res.energy = energy(res.driving, res.driving.horizon()).total;
  PointStatus st;
  st.hit = true;
  st.tau = tau;
  st.compatible = true;
  res.status.push_back(st);
  return res;
}

DrivingFunction radial_minimizer_driving(double theta, double t_max, double step) {
  if (!(theta > 0) || !(theta < kPi))
    throw domain_error("radial target angle must lie in (0, pi)");
  std::vector<double> ts, vs;
  for (double t = 0.0;; t += step) {
    const bool last = t >= t_max;
    const double tt = last ? t_max : t;
    ts.push_back(tt);
    vs.push_back(std::acos(std::exp(-tt) * std::cos(theta)));
    if (last) break;
  }
  return DrivingFunction(std::move(ts), std::move(vs));
}

namespace {

// Appends `piece` to the end of `ts`/`vs` (shifted in time and value).
void append_driver(std::vector<double>& ts, std::vector<double>& vs,
                   const DrivingFunction& piece) {
  const double t0 = ts.back(), v0 = vs.back();
  for (std::size_t k = 1; k < piece.size(); ++k) {
    ts.push_back(t0 + piece.times()[k]);
    vs.push_back(v0 + piece.values()[k]);
  }
}

bool try_order(const std::vector<cplx>& points, const std::vector<std::size_t>& order,
               const FlowConfig& cfg, MinimizerResult& out) {
  std::vector<double> ts{0.0}, vs{0.0};
  std::vector<cplx> pos = points;  // centered images of not-yet-hit targets
  std::vector<PointStatus> status(points.size());
  double total_energy = 0.0;
  for (std::size_t step = 0; step < order.size(); ++step) {
    const std::size_t i = order[step];
    const cplx zeta = pos[i];
    const double r = std::abs(zeta), th = std::arg(zeta);
    if (!(th > 1e-9) || !(th < kPi - 1e-9) || r < 1e-9) return false;
    MinimizerResult one = one_point_minimizer(th, cfg);
    DrivingFunction piece = scale_driving(one.driving, r);
    status[i].hit = true;
    status[i].tau = ts.back() + piece.horizon();
    status[i].compatible = true;
    total_energy += energy(piece, piece.horizon()).total;
    // Flow the remaining targets through this stage.
    for (std::size_t later = step + 1; later < order.size(); ++later) {
      cplx& u = pos[order[later]];
      bool dead = false;
      const double swallow_abs = cfg.swallow_scale * (1.0 + std::abs(u));
      advance_centered(u, piece, 0.0, piece.horizon(), cfg, &dead, swallow_abs);
      if (dead || !(u.imag() > 0)) return false;
    }
    append_driver(ts, vs, piece);
  }
  out.driving = DrivingFunction(std::move(ts), std::move(vs));
  out.energy = total_energy;
  out.status = std::move(status);
  out.converged = true;
  return true;
}

}  // namespace

MinimizerResult multi_point_construction(const std::vector<cplx>& points,
                                         const FlowConfig& cfg) {
  if (points.empty()) throw malformed_input("no points to visit");
  for (cplx z : points)
    if (!(z.imag() > 0)) throw domain_error("targets must lie in the open half-plane");
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  // Heuristic first try: nearest targets first.
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(points[a]) < std::abs(points[b]); });
  MinimizerResult res;
  if (try_order(points, order, cfg, res)) return res;
  std::sort(order.begin(), order.end());
  do {
    if (try_order(points, order, cfg, res)) return res;
  } while (std::next_permutation(order.begin(), order.end()));
  throw geometry_error("every visiting order swallows a later target early");
}

std::vector<PointStatus> compatible(const DrivingFunction& lambda,
                                    const ConstraintSet& constraints, double T,
                                    const FlowConfig& cfg) {
  std::vector<cplx> zs;
  for (const auto& c : constraints.points) zs.push_back(c.z);
  FlowState st = flow_points(lambda, zs, T, cfg);
  std::vector<PointStatus> out(zs.size());
  for (std::size_t i = 0; i < zs.size(); ++i) {
    PointStatus& p = out[i];
    if (!st.points[i].alive) {
      p.hit = true;
      p.tau = st.points[i].tau();
      p.compatible = true;
    } else {
      const cplx u = st.points[i].position;
      p.w = u.real() / u.imag();  // cot(arg u)
      p.compatible = constraints.points[i].side * p.w >= 0.0;
    }
  }
  return out;
}

namespace {

// Penalized objective over knot values (knot 0 pinned at 0).
struct PenalizedObjective {
  const ConstraintSet& cs;
  double T;
  std::size_t knots;
  double margin;
  const FlowConfig& cfg;

  DrivingFunction build(const std::vector<double>& v) const {
    std::vector<double> ts(knots + 1), vs(knots + 1);
    for (std::size_t i = 0; i <= knots; ++i) {
      ts[i] = T * double(i) / double(knots);
      vs[i] = i == 0 ? 0.0 : v[i - 1];
    }
    return DrivingFunction(std::move(ts), std::move(vs));
  }

  double exact_energy(const std::vector<double>& v) const {
    const double dt = T / double(knots);
    double e = 0.0;
    double prev = 0.0;
    for (double x : v) {
      const double d = x - prev;
      e += d * d / (2.0 * dt);
      prev = x;
    }
    return e;
  }

  double operator()(const std::vector<double>& v, double mu,
                    std::vector<PointStatus>* st_out = nullptr) const {
    double obj = exact_energy(v);
    DrivingFunction lam = build(v);
    auto st = compatible(lam, cs, T, cfg);
    for (std::size_t i = 0; i < st.size(); ++i) {
      if (st[i].hit) continue;  // hit-release: no penalty once swallowed
      const double slack = cs.points[i].side * st[i].w - margin;
      if (slack < 0) obj += mu * slack * slack;
    }
    if (st_out) *st_out = std::move(st);
    return obj;
  }
};

// Compact L-BFGS with forward-difference gradients and Armijo backtracking.
bool lbfgs_minimize(const PenalizedObjective& obj, double mu, std::vector<double>& v,
                    const MinimizeOptions& opt) {
  const std::size_t n = v.size();
  auto grad = [&](const std::vector<double>& x, double f0) {
    std::vector<double> g(n);
    std::vector<double> xp = x;
    for (std::size_t i = 0; i < n; ++i) {
      xp[i] = x[i] + opt.fd_step;
      g[i] = (obj(xp, mu) - f0) / opt.fd_step;
      xp[i] = x[i];
    }
    return g;
  };
  std::vector<std::vector<double>> S, Y;
  double f = obj(v, mu);
  std::vector<double> g = grad(v, f);
  for (int it = 0; it < opt.max_inner; ++it) {
    double gn = 0.0;
    for (double gi : g) gn += gi * gi;
    gn = std::sqrt(gn);
    if (gn < opt.grad_tol * (1.0 + std::abs(f))) return true;
    // Two-loop recursion.
    std::vector<double> q = g;
    std::vector<double> alpha(S.size());
    for (std::size_t k = S.size(); k-- > 0;) {
      double sy = 0.0, sq = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        sy += S[k][i] * Y[k][i];
        sq += S[k][i] * q[i];
      }
      alpha[k] = sq / sy;
      for (std::size_t i = 0; i < n; ++i) q[i] -= alpha[k] * Y[k][i];
    }
    double gamma = 1.0;
    if (!S.empty()) {
      double sy = 0.0, yy = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        sy += S.back()[i] * Y.back()[i];
        yy += Y.back()[i] * Y.back()[i];
      }
      gamma = sy / std::max(yy, 1e-300);
    }
    for (double& qi : q) qi *= gamma;
    for (std::size_t k = 0; k < S.size(); ++k) {
      double yq = 0.0, sy = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        yq += Y[k][i] * q[i];
        sy += S[k][i] * Y[k][i];
      }
      const double beta = yq / sy;
      for (std::size_t i = 0; i < n; ++i) q[i] += (alpha[k] - beta) * S[k][i];
    }
    // q is the ascent direction estimate; step along -q with backtracking.
    double step = 1.0;
    double gq = 0.0;
    for (std::size_t i = 0; i < n; ++i) gq += g[i] * q[i];
    if (gq <= 0) {  // not a descent direction; fall back to steepest descent
      q = g;
      gq = gn * gn;
      step = 1.0 / std::max(gn, 1.0);
    }
    std::vector<double> vn(n);
    double fn = f;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      for (std::size_t i = 0; i < n; ++i) vn[i] = v[i] - step * q[i];
      fn = obj(vn, mu);
      if (fn <= f - 1e-4 * step * gq) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return true;  // line search stalled: local flatness
    std::vector<double> gn2 = grad(vn, fn);
    std::vector<double> s(n), y(n);
    double sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = vn[i] - v[i];
      y[i] = gn2[i] - g[i];
      sy += s[i] * y[i];
    }
    if (sy > 1e-12) {
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      if (S.size() > 8) {
        S.erase(S.begin());
        Y.erase(Y.begin());
      }
    }
    v = vn;
    f = fn;
    g = std::move(gn2);
  }
  return false;
}

}  // namespace

MinimizerResult minimize_constrained(const ConstraintSet& constraints, double T,
                                     const MinimizeOptions& opt, const FlowConfig& cfg) {
  if (constraints.points.empty()) throw malformed_input("empty constraint set");
  double R = 0.0;
  for (const auto& c : constraints.points) R = std::max(R, std::abs(c.z));
  if (T <= 0) {
    R *= 2.0;
    T = R * R / 2.0;  // capacity bound: every competitor resolves by then
  }
  PenalizedObjective obj{constraints, T, opt.knots, opt.side_margin, cfg};

  // Starts: zero, the visiting construction through the points themselves,
  // and constructions aiming slightly past each point on its constrained
  // side (strictly feasible, so the penalty is inactive there).
  std::vector<std::vector<double>> starts;
  starts.emplace_back(opt.knots, 0.0);
  auto add_construction = [&](double offset) {
    try {
      std::vector<cplx> pts;
      for (const auto& c : constraints.points)
        pts.push_back(c.z - cplx(c.side * offset * std::abs(c.z), 0.0));
      auto built = multi_point_construction(pts, cfg);
      std::vector<double> v(opt.knots);
      for (std::size_t i = 1; i <= opt.knots; ++i)
        v[i - 1] = built.driving.value(T * double(i) / double(opt.knots));
      starts.push_back(std::move(v));
    } catch (const loewner_error&) {
      // A construction may fail; the remaining starts cover it.
    }
  };
  add_construction(0.0);
  add_construction(0.05);
  add_construction(0.15);

  MinimizerResult best;
  bool have_best = false;
  for (auto v : starts) {
    double mu = opt.penalty_start;
    bool conv = true;
    for (int round = 0; round < opt.penalty_rounds; ++round) {
      conv = lbfgs_minimize(obj, mu, v, opt);
      mu *= opt.penalty_growth;
      // Stop escalating once every constraint clears the margin.
      std::vector<PointStatus> st;
      obj(v, 0.0, &st);
      bool clear = conv;
      for (std::size_t i = 0; i < st.size(); ++i)
        if (!st[i].hit &&
            constraints.points[i].side * st[i].w < opt.side_margin - 1e-12)
          clear = false;
      if (clear) break;
    }
    std::vector<PointStatus> st;
    obj(v, 0.0, &st);
    MinimizerResult cand;
    cand.driving = obj.build(v);
    cand.energy = obj.exact_energy(v);
    cand.status = std::move(st);
    cand.converged = conv;
    const bool feasible = std::all_of(cand.status.begin(), cand.status.end(),
                                      [](const PointStatus& p) { return p.compatible; });
    const bool best_feasible =
        have_best && std::all_of(best.status.begin(), best.status.end(),
                                 [](const PointStatus& p) { return p.compatible; });
    if (!have_best || (feasible && !best_feasible) ||
        (feasible == best_feasible && cand.energy < best.energy)) {
      best = std::move(cand);
      have_best = true;
    }
  }
  return best;
}

}  // namespace loewner
