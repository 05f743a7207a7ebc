#include "loewner/flow.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "loewner/errors.hpp"
#include "rk45.hpp"

namespace loewner {

namespace {

double cnorm(const cplx& z) { return std::abs(z); }

// Step cap for the centered chordal flow: a fraction of the collapse time
// |u|^2/4 of the singular term, and of the drift time scale |u|/|m|.
double chordal_cap(const cplx& u, double m, double frac) {
  double a = std::abs(u);
  double cap = frac * a * a / 4.0;
  if (std::abs(m) > 0) cap = std::min(cap, frac * a / std::abs(m));
  return std::max(cap, 1e-300);
}

}  // namespace

double advance_centered(cplx& u, const DrivingFunction& lambda, double ta, double tb,
                        const FlowConfig& cfg, bool* swallowed, double swallow_abs) {
  if (swallowed) *swallowed = false;
  double t = ta;
  const auto& ts = lambda.times();
  while (t < tb) {
    std::size_t seg = lambda.segment(t);
    double seg_end = (seg + 1 < ts.size()) ? ts[seg + 1] : tb;
    double t1 = std::min(tb, std::max(seg_end, t));
    if (t1 <= t) t1 = tb;  // constant extension past the last sample
    const double m = lambda.slope(t);
    bool floor = false;
    double reached = detail::integrate_dp45(
        u, t, t1, [m](const cplx& y, double) { return 2.0 / y - m; }, cnorm,
        [&](const cplx& y, double) { return chordal_cap(y, m, cfg.step_fraction); },
        [&](const cplx& y, double) { return std::abs(y) < swallow_abs; },
        cfg.rel_tol, cfg.min_step, &floor);
    if (reached < t1) {
      if (swallowed) *swallowed = true;
      return reached;
    }
    t = t1;
  }
  return tb;
}

FlowState flow_points(const DrivingFunction& lambda, const std::vector<cplx>& points,
                      double T, const FlowConfig& cfg) {
  if (!(T >= 0)) throw domain_error("flow horizon must be nonnegative");
  FlowState st;
  st.time = T;
  st.driving_value = lambda.value(T);
  st.points.reserve(points.size());
  int idx = 0;
  for (cplx z : points) {
    if (z.imag() < 0) throw malformed_input("marked points must satisfy Im >= 0");
    if (z == cplx(0.0, 0.0))
      throw malformed_input("marked point at the curve base is already swallowed");
    MarkedPoint mp;
    mp.label = "z" + std::to_string(idx++);
    mp.start = z;
    cplx u = z - lambda.value(0.0);
    const double swallow_abs = cfg.swallow_scale * (1.0 + std::abs(z));
    bool dead = false;
    double reached = advance_centered(u, lambda, 0.0, T, cfg, &dead, swallow_abs);
    mp.position = u;
    mp.alive = !dead;
    if (dead) {
      mp.tau_lo = reached;
      double a = std::abs(u);
      mp.tau_hi = reached + a * a / 2.0;  // remaining collapse time bound
    }
    st.points.push_back(std::move(mp));
  }
  return st;
}

cplx trace_point(const DrivingFunction& lambda, double t, double lift,
                 const FlowConfig& cfg) {
  // Reverse flow: w(s) solves dw/ds = -2 / (w - lambda(t - s)), w(0) just
  // above the driving value; gamma_t = w(t).
  cplx w(lambda.value(t), lift);
  double s = 0.0;
  while (s < t) {
    // Segment of lambda containing t - s, traversed backwards.
    double tcur = t - s;
    std::size_t seg = lambda.segment(tcur > 0 ? tcur * (1 - 1e-15) : 0.0);
    double seg_start = lambda.times()[seg];
    double s1 = std::min(t, t - seg_start);
    if (tcur > lambda.horizon()) s1 = std::min(t, t - lambda.horizon());
    if (s1 <= s) s1 = t;
    auto lam_at = [&](double ss) { return lambda.value(t - ss); };
    bool floor = false;
    double reached = detail::integrate_dp45(
        w, s, s1,
        [&](const cplx& y, double ss) { return -2.0 / (y - lam_at(ss)); }, cnorm,
        [&](const cplx& y, double ss) {
          double a = std::abs(y - lam_at(ss));
          return std::max(cfg.step_fraction * a * a / 4.0, 1e-300);
        },
        [](const cplx&, double) { return false; }, cfg.rel_tol, cfg.min_step,
        &floor);
    if (floor && reached < s1)
      throw accuracy_error("trace reverse flow stalled at s = " + std::to_string(reached));
    s = s1;
  }
  return w;
}

CurveSample trace(const DrivingFunction& lambda, double T, double resolution,
                  const TraceConfig& cfg) {
  if (!(T > 0) || !(resolution > 0))
    throw domain_error("trace horizon and resolution must be positive");
  const double lift = cfg.lift_scale * std::sqrt(resolution);
  CurveSample curve;
  std::size_t n = static_cast<std::size_t>(std::ceil(T / resolution));
  for (std::size_t k = 1; k <= n; ++k) {
    double t = std::min(T, static_cast<double>(k) * resolution);
    cplx g = trace_point(lambda, t, lift, cfg.flow);
    if (!(g.imag() > 0))
      throw accuracy_error("trace point left the upper half-plane");
    curve.times.push_back(t);
    curve.points.push_back(g);
  }
  // Cheap simplicity check: non-adjacent samples must stay separated on the
  // scale of the local sample spacing.
  for (std::size_t i = 0; i + 3 < curve.points.size(); ++i) {
    double local = std::abs(curve.points[i + 1] - curve.points[i]);
    for (std::size_t j = i + 3; j < curve.points.size(); ++j) {
      if (std::abs(curve.points[j] - curve.points[i]) < 0.25 * local)
        throw geometry_error("non-simple trace: samples " + std::to_string(i) +
                             " and " + std::to_string(j) + " nearly touch");
    }
  }
  return curve;
}

double hcap(const CurveSample& curve) {
  if (curve.times.empty()) return 0.0;
  return 2.0 * curve.times.back();
}

FlowState radial_flow(const DrivingFunction& xi, const std::vector<cplx>& points,
                      double T, const FlowConfig& cfg) {
  FlowState st;
  st.time = T;
  st.driving_value = xi.value(T);
  int idx = 0;
  for (cplx z : points) {
    if (std::abs(z) > 1.0 + 1e-12)
      throw malformed_input("radial points must lie in the closed unit disk");
    MarkedPoint mp;
    mp.label = "z" + std::to_string(idx++);
    mp.start = z;
    cplx u = z;
    double t = 0.0;
    bool dead = false;
    const double swallow_abs = cfg.swallow_scale * 2.0;
    while (t < T && !dead) {
      std::size_t seg = xi.segment(t);
      double seg_end = (seg + 1 < xi.times().size()) ? xi.times()[seg + 1] : T;
      double t1 = std::min(T, std::max(seg_end, t));
      if (t1 <= t) t1 = T;
      auto drive = [&](double tt) { return std::polar(1.0, xi.value(tt)); };
      bool floor = false;
      double reached = detail::integrate_dp45(
          u, t, t1,
          [&](const cplx& y, double tt) {
            cplx e = drive(tt);
            return -y * (y + e) / (y - e);
          },
          cnorm,
          [&](const cplx& y, double tt) {
            double a = std::abs(y - drive(tt));
            return std::max(cfg.step_fraction * a * a / 4.0, 1e-300);
          },
          [&](const cplx& y, double tt) {
            return std::abs(y - drive(tt)) < swallow_abs;
          },
          cfg.rel_tol, cfg.min_step, &floor);
      if (reached < t1) {
        dead = true;
        mp.tau_lo = reached;
        double a = std::abs(u - drive(reached));
        mp.tau_hi = reached + a * a;
        break;
      }
      t = t1;
    }
    mp.position = u;
    mp.alive = !dead;
    st.points.push_back(std::move(mp));
  }
  return st;
}

cplx radial_trace_point(const DrivingFunction& xi, double t, double lift,
                        const FlowConfig& cfg) {
  cplx w = (1.0 - lift) * std::polar(1.0, xi.value(t));
  auto drive = [&](double ss) { return std::polar(1.0, xi.value(t - ss)); };
  bool floor = false;
  detail::integrate_dp45(
      w, 0.0, t,
      [&](const cplx& y, double ss) {
        cplx e = drive(ss);
        return y * (y + e) / (y - e);
      },
      cnorm,
      [&](const cplx& y, double ss) {
        double a = std::abs(y - drive(ss));
        return std::max(cfg.step_fraction * a * a / 4.0, 1e-300);
      },
      [](const cplx&, double) { return false; }, cfg.rel_tol, cfg.min_step, &floor);
  return w;
}

double boundary_tau(const DrivingFunction& lambda, double x, double t_limit,
                    const FlowConfig& cfg) {
  cplx u(x, 0.0);
  const double swallow_abs = cfg.swallow_scale * (1.0 + std::abs(x));
  bool dead = false;
  double reached = advance_centered(u, lambda, 0.0, t_limit, cfg, &dead, swallow_abs);
  if (!dead) return std::numeric_limits<double>::infinity();
  return reached + std::norm(u) / 4.0;
}

namespace {

// Curve time at which the reverse flow started from the real point
// lambda(T) + v collides with the driving; -inf when it survives to time 0
// (v outside the welded interval).
double reverse_collision_time(const DrivingFunction& lambda, double T, double v,
                              const FlowConfig& cfg) {
  cplx u(v, 0.0);
  const double thresh = cfg.swallow_scale * (1.0 + std::abs(v));
  double s = 0.0;
  bool hit = false;
  while (s < T) {
    // Segment of lambda containing T - s, traversed backwards, so the slope
    // is constant over the integration window.
    double tcur = T - s;
    std::size_t seg = lambda.segment(tcur > 0 ? tcur * (1 - 1e-15) : 0.0);
    double seg_start = lambda.times()[seg];
    double s1 = std::min(T, T - seg_start);
    if (tcur > lambda.horizon()) s1 = std::min(T, T - lambda.horizon());
    if (s1 <= s) s1 = T;
    const double m = lambda.slope(0.5 * (seg_start + std::min(tcur, lambda.horizon())));
    bool floor = false;
    double reached = detail::integrate_dp45(
        u, s, s1,
        [m](const cplx& y, double) { return cplx(-2.0 / y.real() + m, 0.0); },
        cnorm,
        [&](const cplx& y, double) {
          return std::max(cfg.step_fraction * std::norm(y) / 4.0, 1e-300);
        },
        [&](const cplx& y, double) { return std::abs(y.real()) < thresh; },
        cfg.rel_tol, cfg.min_step, &floor);
    s = reached;
    if (reached < s1) {
      hit = true;
      break;
    }
  }
  if (!hit && std::abs(u.real()) >= thresh)
    return -std::numeric_limits<double>::infinity();
  return T - (s + u.real() * u.real() / 4.0);
}

// The real preimage of gamma_t under f_T on the given side of lambda(T),
// located by bisecting the reverse-flow collision time.
double welding_preimage(const DrivingFunction& lambda, double t, double T,
                        int side, const WeldingConfig& cfg) {
  auto hits_after = [&](double v) {
    return reverse_collision_time(lambda, T, v, cfg.flow) >= t;
  };
  double lo = 1e-12 * side;  // collides immediately: curve time T
  double hi = side * (2.0 * std::sqrt(T - t) + 1e-6);
  int guard = 0;
  while (hits_after(hi)) {
    hi *= 2.0;
    if (++guard > 60) throw accuracy_error("welding bracket expansion failed");
  }
  while (std::abs(hi - lo) > cfg.bisect_tol * (1.0 + std::abs(hi))) {
    double mid = 0.5 * (lo + hi);
    (hits_after(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

WeldingReport welding(const DrivingFunction& lambda, double T,
                      const std::vector<double>& curve_times,
                      const WeldingConfig& cfg) {
  WeldingReport rep;
  for (double t : curve_times) {
    if (!(t > 0) || t > T)
      throw malformed_input("welding grid times must lie in (0, T]");
    WeldingPair p;
    p.curve_time = t;
    p.x_pos = welding_preimage(lambda, t, T, +1, cfg);
    p.x_neg = welding_preimage(lambda, t, T, -1, cfg);
    rep.pairs.push_back(p);
  }
  if (!rep.pairs.empty()) {
    rep.ratio1_min = rep.ratio1_max = rep.pairs[0].x_pos / -rep.pairs[0].x_neg;
    for (const auto& p : rep.pairs) {
      double r = p.x_pos / -p.x_neg;
      rep.ratio1_min = std::min(rep.ratio1_min, r);
      rep.ratio1_max = std::max(rep.ratio1_max, r);
    }
    // Difference-quotient ratio of phi on equispaced triples spanning the
    // positive preimage range, with phi linearly interpolated between pairs.
    std::vector<double> xs, ys;
    for (const auto& p : rep.pairs) {
      xs.push_back(p.x_pos);
      ys.push_back(p.x_neg);
    }
    std::vector<std::size_t> order(xs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    auto phi = [&](double x) {
      std::size_t k = 1;
      while (k + 1 < order.size() && xs[order[k]] < x) ++k;
      double x0 = xs[order[k - 1]], x1 = xs[order[k]];
      double y0 = ys[order[k - 1]], y1 = ys[order[k]];
      return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
    };
    if (xs.size() >= 3) {
      double a = xs[order.front()], b = xs[order.back()];
      bool first = true;
      const int n = 16;
      for (int i = 0; i + 2 <= n; ++i) {
        double h = (b - a) / n;
        double x = a + i * h, y = x + h, z = y + h;
        double r = (phi(x) - phi(y)) / (phi(y) - phi(z));
        if (first || r < rep.ratio2_min) rep.ratio2_min = r;
        if (first || r > rep.ratio2_max) rep.ratio2_max = r;
        first = false;
      }
    }
  }
  return rep;
}

void write_csv(const CurveSample& curve, std::ostream& os) {
  os << "t,re,im\n";
  os.precision(17);
  for (std::size_t i = 0; i < curve.times.size(); ++i)
    os << curve.times[i] << ',' << curve.points[i].real() << ','
       << curve.points[i].imag() << '\n';
}

CurveSample read_curve_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw malformed_input("empty curve CSV");
  CurveSample c;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double t, re, im;
    char c1, c2;
    if (!(ss >> t >> c1 >> re >> c2 >> im))
      throw malformed_input("bad curve CSV row: " + line);
    c.times.push_back(t);
    c.points.emplace_back(re, im);
  }
  return c;
}

std::string to_json(const CurveSample& curve) {
  nlohmann::json j;
  j["times"] = curve.times;
  std::vector<double> re, im;
  for (cplx z : curve.points) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  j["re"] = re;
  j["im"] = im;
  return j.dump();
}

}  // namespace loewner
