#include "loewner/zipper.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "loewner/errors.hpp"

namespace loewner {

namespace {

constexpr double kPi = std::numbers::pi;

// f(w) = (w - p)^(1-a) (w + q)^a via principal logs; valid on the closed
// upper half-plane minus the preimage interval [-q, p].
cplx tilted_f(cplx w, double a, double p, double q) {
  return std::exp((1.0 - a) * std::log(w - p) + a * std::log(w + q));
}

struct SlitFit {
  ZipperStep step;
  cplx tip;        // fitted curve point, f(w_star)
  cplx fpp;        // f''(w_star)
  double tip_rad;  // curvature radius of validity for the tip seed
};

SlitFit fit_slit(cplx z) {
  const double r = std::abs(z);
  const double theta = std::arg(z);
  SlitFit s;
  double a = 1.0 - theta / kPi;
  a = std::clamp(a, 1e-12, 1.0 - 1e-12);
  s.step.alpha = a;
  s.step.p = r * std::pow(a / (1.0 - a), 1.0 - a);
  s.step.q = (1.0 - a) * s.step.p / a;
  s.step.dt = (1.0 - a) * s.step.p * s.step.p / (4.0 * a);
  s.step.w_star = s.step.p * (2.0 * a - 1.0) / a;
  s.tip = z;
  s.fpp = -z * a / (s.step.p * s.step.p * (1.0 - a));
  // Distance from w_star to the nearest branch point.
  s.tip_rad = std::min(s.step.p * (1.0 - a) / a, s.step.p);
  return s;
}

// sqrt(z^2 + h^2) on the branch that behaves like z at infinity and maps
// H minus the vertical slit onto H.
cplx vertical_out(cplx z, double h) {
  if (z.imag() == 0.0) {
    double x = z.real();
    return cplx((x >= 0 ? 1.0 : -1.0) * std::sqrt(x * x + h * h), 0.0);
  }
  return cplx(0.0, 1.0) * std::sqrt(-(z * z + h * h));
}

cplx tilted_invert(cplx z, const SlitFit& s, const ZipperConfig& cfg) {
  const double a = s.step.alpha, p = s.step.p, q = s.step.q;
  const cplx logz = std::log(z);
  const double wstar = s.step.w_star;
  auto resid = [&](cplx w) {
    return (1.0 - a) * std::log(w - p) + a * std::log(w + q) - logz;
  };
  // Seed: quadratic tip expansion near the tip, asymptotic elsewhere.
  cplx w;
  const cplx dz = z - s.tip;
  const double tip_range = 0.1 * std::abs(s.fpp) * s.tip_rad * s.tip_rad;
  if (std::abs(dz) < tip_range) {
    cplx root = std::sqrt(2.0 * dz / s.fpp);
    if (root.imag() < 0) root = -root;
    w = wstar + root;
  } else {
    w = z + 2.0 * s.step.dt / z;
  }
  cplx F = resid(w);
  for (int it = 0; it < cfg.newton_max_iter; ++it) {
    if (std::abs(F) < cfg.newton_tol) return w;
    cplx Fp = (1.0 - a) / (w - p) + a / (w + q);
    cplx step = F / Fp;
    cplx wn = w - step;
    cplx Fn = resid(wn);
    int halvings = 0;
    while (std::abs(Fn) > std::abs(F) && halvings < 30) {
      step *= 0.5;
      wn = w - step;
      Fn = resid(wn);
      ++halvings;
    }
    if (std::abs(Fn) >= std::abs(F) && std::abs(F) < 1e-10) return w;
    w = wn;
    F = Fn;
  }
  if (std::abs(F) < 1e-9) return w;
  throw resolution_error(
      "slit inversion did not converge; refine the input sampling");
}

// Map-out of one step applied to a point in centered coordinates (the
// recentering shift by w_star is applied by the caller).
bool is_vertical(double alpha, const ZipperConfig& cfg) {
  return std::abs(alpha - 0.5) * kPi < cfg.vertical_angle_tol;
}

cplx apply_out(const SlitFit& s, cplx z, const ZipperConfig& cfg) {
  if (is_vertical(s.step.alpha, cfg)) return vertical_out(z, s.step.p);
  return tilted_invert(z, s, cfg);
}

struct RealJet {
  double v, d1, d2, d3;
};

RealJet compose(const RealJet& inner, double g1, double g2, double g3, double gv) {
  RealJet out;
  out.v = gv;
  out.d1 = g1 * inner.d1;
  out.d2 = g2 * inner.d1 * inner.d1 + g1 * inner.d2;
  out.d3 = g3 * inner.d1 * inner.d1 * inner.d1 + 3.0 * g2 * inner.d1 * inner.d2 +
           g1 * inner.d3;
  return out;
}

}  // namespace

Zipper::Zipper(const std::vector<cplx>& points, double base, const ZipperConfig& cfg)
    : base_(base), cfg_(cfg) {
  times_.push_back(0.0);
  values_.push_back(0.0);
  if (points.empty()) throw malformed_input("zipper needs at least one point");
  std::vector<cplx> pts;
  pts.reserve(points.size());
  for (cplx z : points) {
    if (z.imag() < 0)
      throw geometry_error("zipper input must lie in the closed upper half-plane");
    pts.push_back(z - base);
  }
  for (std::size_t k = 0; k < pts.size(); ++k) {
    cplx z = pts[k];
    if (std::abs(z) < 1e-13) continue;  // coincides with the current tip base
    if (!(z.imag() > 0)) {
      if (std::abs(z.imag()) < 1e-13 * (1.0 + std::abs(z)) && k + 1 == pts.size())
        break;  // final sample touched down on the real axis
      throw geometry_error(
          "zipper point left the upper half-plane; input is non-simple or too coarse");
    }
    SlitFit s = fit_slit(z);
    steps_.push_back(s.step);
    times_.push_back(times_.back() + s.step.dt);
    values_.push_back(values_.back() + s.step.w_star);
    for (std::size_t j = k + 1; j < pts.size(); ++j)
      pts[j] = apply_out(s, pts[j], cfg_) - s.step.w_star;
  }
  if (steps_.empty()) throw malformed_input("zipper input carries no hull");
}

DrivingFunction Zipper::driving() const {
  return DrivingFunction(times_, values_);
}

Zipper::Jet Zipper::evaluate_real(double x) const {
  RealJet jet{x - base_, 1.0, 0.0, 0.0};
  for (const auto& st : steps_) {
    const double v = jet.v;
    double gv, g1, g2, g3;
    if (is_vertical(st.alpha, cfg_)) {
      const double h = st.p;
      const double g = (v >= 0 ? 1.0 : -1.0) * std::sqrt(v * v + h * h);
      gv = g;
      g1 = v / g;
      g2 = h * h / (g * g * g);
      g3 = -3.0 * h * h * v / std::pow(g, 5);
    } else {
      SlitFit s;
      s.step = st;
      s.tip = tilted_f(cplx(st.w_star, 0.0), st.alpha, st.p, st.q);
      s.fpp = -s.tip * st.alpha / (st.p * st.p * (1.0 - st.alpha));
      s.tip_rad = std::min(st.p * (1.0 - st.alpha) / st.alpha, st.p);
      cplx w = tilted_invert(cplx(v, 0.0), s, cfg_);
      cplx f = tilted_f(w, st.alpha, st.p, st.q);
      cplx S = (1.0 - st.alpha) / (w - st.p) + st.alpha / (w + st.q);
      cplx Sp = -(1.0 - st.alpha) / ((w - st.p) * (w - st.p)) -
                st.alpha / ((w + st.q) * (w + st.q));
      cplx Spp = 2.0 * (1.0 - st.alpha) / std::pow(w - st.p, 3) +
                 2.0 * st.alpha / std::pow(w + st.q, 3);
      cplx f1 = f * S;
      cplx f2 = f * (S * S + Sp);
      cplx f3 = f * (S * S * S + 3.0 * S * Sp + Spp);
      gv = w.real();
      g1 = (1.0 / f1).real();
      g2 = (-f2 / (f1 * f1 * f1)).real();
      g3 = ((3.0 * f2 * f2 - f1 * f3) / std::pow(f1, 5)).real();
    }
    jet = compose(jet, g1, g2, g3, gv);
    jet.v -= st.w_star;
  }
  return Jet{jet.v + base_ + values_.back(), jet.d1, jet.d2, jet.d3};
}

cplx Zipper::map_point(cplx z) const {
  cplx v = z - base_;
  for (const auto& st : steps_) {
    if (is_vertical(st.alpha, cfg_)) {
      v = vertical_out(v, st.p) - st.w_star;
    } else {
      SlitFit s;
      s.step = st;
      s.tip = tilted_f(cplx(st.w_star, 0.0), st.alpha, st.p, st.q);
      s.fpp = -s.tip * st.alpha / (st.p * st.p * (1.0 - st.alpha));
      s.tip_rad = std::min(st.p * (1.0 - st.alpha) / st.alpha, st.p);
      v = tilted_invert(v, s, cfg_) - st.w_star;
    }
  }
  return v + base_ + values_.back();
}

Zipper::Jet Zipper::evaluate_real_fd(double x, double step_scale) const {
  const double h = step_scale * (1.0 + std::abs(x));
  auto G = [&](double xx) { return evaluate_real(xx).v; };
  const double gp = G(x + h), gm = G(x - h);
  const double gp2 = G(x + 2 * h), gm2 = G(x - 2 * h);
  const double g0 = G(x);
  Jet j;
  j.v = g0;
  j.d1 = (8.0 * (gp - gm) - (gp2 - gm2)) / (12.0 * h);
  j.d2 = (16.0 * (gp + gm) - (gp2 + gm2) - 30.0 * g0) / (12.0 * h * h);
  j.d3 = (gp2 - 2.0 * gp + 2.0 * gm - gm2) / (2.0 * h * h * h);
  return j;
}

DrivingFunction inverse_transform(const std::vector<cplx>& points, double base,
                                  const ZipperConfig& cfg) {
  return Zipper(points, base, cfg).driving();
}

DrivingFunction inverse_transform(const CurveSample& curve, const ZipperConfig& cfg) {
  return inverse_transform(curve.points, 0.0, cfg);
}

std::vector<cplx> reverse_curve(const CurveSample& curve, const DrivingFunction& lambda,
                                double tail_capacity, int tail_samples,
                                const TraceConfig& cfg) {
  if (curve.points.empty()) throw malformed_input("empty curve");
  if (!(tail_capacity > 0)) throw domain_error("tail capacity must be positive");
  const double T = curve.times.back();
  const double res = curve.times.front();
  const double lift = cfg.lift_scale * std::sqrt(res);
  std::vector<cplx> samples = curve.points;
  // Geometric tail sampling, denser near the tip of the curve.
  const double s0 = std::max(res, 1e-8);
  const double ratio = std::pow(tail_capacity / s0, 1.0 / (tail_samples - 1));
  for (int j = 0; j < tail_samples; ++j) {
    double s = s0 * std::pow(ratio, j);
    samples.push_back(trace_point(lambda, T + s, lift, cfg.flow));
  }
  std::vector<cplx> reversed;
  reversed.reserve(samples.size());
  for (auto it = samples.rbegin(); it != samples.rend(); ++it) {
    if (std::abs(*it) < 1e-9) continue;  // overflow guard near the base
    reversed.push_back(-1.0 / *it);
  }
  return reversed;
}

DrivingFunction rev_driving(const DrivingFunction& lambda, double T,
                            double tail_capacity, double resolution,
                            const TraceConfig& tcfg, const ZipperConfig& zcfg) {
  TraceConfig tc = tcfg;
  tc.resolution = resolution;
  CurveSample curve = trace(lambda, T, resolution, tc);
  std::vector<cplx> rev = reverse_curve(curve, lambda, tail_capacity, 240, tc);
  return inverse_transform(rev, 0.0, zcfg);
}

std::vector<ReversalRow> reversal_table(const DrivingFunction& lambda, double T,
                                        const std::vector<double>& resolutions,
                                        const std::vector<double>& tail_capacities) {
  if (resolutions.size() != tail_capacities.size())
    throw malformed_input("refinement levels must pair resolution with tail capacity");
  std::vector<ReversalRow> table;
  const double e_fwd = energy(lambda, lambda.horizon()).total;
  for (std::size_t i = 0; i < resolutions.size(); ++i) {
    ReversalRow row;
    row.resolution = resolutions[i];
    row.tail_capacity = tail_capacities[i];
    row.energy_fwd = e_fwd;
    DrivingFunction rev = rev_driving(lambda, T, tail_capacities[i], resolutions[i]);
    row.energy_rev = energy(rev, rev.horizon()).total;
    row.rel_err = std::abs(row.energy_rev - e_fwd) / std::max(e_fwd, 1e-300);
    table.push_back(row);
  }
  return table;
}

}  // namespace loewner
