#include "loewner/restriction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "loewner/errors.hpp"
#include "parallel.hpp"

namespace loewner {

namespace {

constexpr double kPi = std::numbers::pi;

void check_hull(const SlitHull& K) {
  if (!(K.size > 0)) throw malformed_input("hull size must be positive");
  const double dist = K.kind == HullKind::vertical_slit
                          ? std::abs(K.base)
                          : std::abs(K.base) - K.size;
  if (!(dist > 0))
    throw geometry_error("hull must be at positive distance from the origin");
}

// Flows the hull boundary to capacity time s and re-fits a zipper map-out of
// K_s = f_s(K). Real feet stay real under the centered flow.
Zipper zip_flowed_hull(const SlitHull& K, const DrivingFunction& lambda, double s,
                       const RestrictionConfig& cfg) {
  std::vector<cplx> bd = K.boundary(cfg.hull_samples);
  cplx foot(K.left_foot(), 0.0);
  auto flow_one = [&](cplx& u) {
    bool dead = false;
    const double swallow_abs = cfg.flow.swallow_scale * (1.0 + std::abs(u));
    advance_centered(u, lambda, 0.0, s, cfg.flow, &dead, swallow_abs);
    if (dead) throw geometry_error("curve collided with the hull");
  };
  flow_one(foot);
  for (cplx& z : bd) flow_one(z);
  return Zipper(bd, foot.real(), cfg.zipper);
}

Zipper::Jet flowed_jet(const SlitHull& K, const DrivingFunction& lambda, double s,
                       const RestrictionConfig& cfg) {
  try {
    return zip_flowed_hull(K, lambda, s, cfg).evaluate_real(0.0);
  } catch (const geometry_error&) {
    throw;
  } catch (const loewner_error&) {
    throw geometry_error(
        "flowed hull could not be re-zipped; the curve runs too close to the hull");
  }
}

PsiDerivatives node_value(const SlitHull& K, const DrivingFunction& lambda, double s,
                          const RestrictionConfig& cfg) {
  Zipper::Jet jet = s <= 0.0 ? K.jet(0.0) : flowed_jet(K, lambda, s, cfg);
  PsiDerivatives d;
  d.prime_0 = jet.d1;
  d.double_prime_0 = jet.d2;
  d.schwarzian_0 = jet.schwarzian();
  return d;
}

std::size_t odd_nodes(std::size_t n) { return std::max<std::size_t>(3, n | 1); }

// psi_s derivatives on a uniform node grid over [0, t], nodes in parallel.
std::vector<PsiDerivatives> psi_nodes(const SlitHull& K, const DrivingFunction& lambda,
                                      double t, std::size_t n,
                                      const RestrictionConfig& cfg) {
  std::vector<PsiDerivatives> out(n);
  detail::parallel_for(n, [&](std::size_t i) {
    out[i] = node_value(K, lambda, t * double(i) / double(n - 1), cfg);
  });
  return out;
}

// Adaptive Simpson with Richardson correction.
template <typename F>
double adaptive_simpson(F&& f, double a, double fa, double b, double fb, double fm,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, a, fa, m, fm, flm,
                          left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1);
}

template <typename F>
double adaptive_simpson(F&& f, double a, double b, double rel_tol, int max_depth) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double tol = rel_tol * (std::abs(whole) + 1e-12);
  return adaptive_simpson(f, a, fa, b, fb, fm, whole, tol, max_depth);
}

// (1/2) int_0^t [A_dot(s) - d(s)]^2 ds with d piecewise linear on the uniform
// node grid. Split at both node times and driver knots; on each piece the
// integrand is a quadratic, so three-point Simpson is exact.
double drift_corrected_energy(const DrivingFunction& A, double t,
                              const std::vector<double>& d) {
  const std::size_t n = d.size();
  const double h = t / double(n - 1);
  std::vector<double> cuts;
  for (std::size_t i = 0; i < n; ++i) cuts.push_back(h * double(i));
  for (double tk : A.times())
    if (tk > 0.0 && tk < t) cuts.push_back(tk);
  std::sort(cuts.begin(), cuts.end());
  auto dval = [&](double s) {
    double x = std::clamp(s / h, 0.0, double(n - 1));
    const std::size_t i0 = std::min<std::size_t>(std::size_t(x), n - 2);
    const double frac = x - double(i0);
    return d[i0] * (1.0 - frac) + d[i0 + 1] * frac;
  };
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (!(b > a)) continue;
    const double m = A.slope(0.5 * (a + b));
    auto q = [&](double s) {
      const double v = m - dval(s);
      return 0.5 * v * v;
    };
    acc += (b - a) / 6.0 * (q(a) + 4.0 * q(0.5 * (a + b)) + q(b));
  }
  return acc;
}

double map_out_shift(const SlitHull& K) { return K.map_out(cplx(0.0, 0.0)).real(); }

// Restricted-energy integral of driver A against the other slit: V(t) is the
// final driving value of the re-zipped image -1/f_t(other), f_t the centered
// flow of A. An empty `other` leaves the plain energy of A.
double cross_energy(const DrivingFunction& A, double TA, const std::vector<cplx>& other,
                    const RestrictionConfig& cfg) {
  if (!(TA > 0)) return 0.0;
  const std::size_t n = odd_nodes(cfg.nodes);
  std::vector<double> d(n, 0.0);
  if (!other.empty()) {
    detail::parallel_for(n, [&](std::size_t i) {
      const double t = TA * double(i) / double(n - 1);
      std::vector<cplx> pts = other;
      for (cplx& u : pts) {
        bool dead = false;
        const double swallow_abs = cfg.flow.swallow_scale * (1.0 + std::abs(u));
        advance_centered(u, A, 0.0, t, cfg.flow, &dead, swallow_abs);
        if (dead) throw geometry_error("slit traces collided during the flow");
        u = -1.0 / u;
      }
      Zipper zip(pts, 0.0, cfg.zipper);
      d[i] = -6.0 * zip.final_driving();
    });
  }
  return drift_corrected_energy(A, TA, d);
}

}  // namespace

double SlitHull::hcap() const {
  return kind == HullKind::vertical_slit ? 0.5 * size * size : size * size;
}

double SlitHull::left_foot() const {
  return kind == HullKind::vertical_slit ? base : base - size;
}

cplx SlitHull::map_out(cplx z) const {
  const cplx w = z - base;
  if (kind == HullKind::half_disk) return z + size * size / w;
  if (w.imag() == 0.0) {
    const double x = w.real();
    return base + (x >= 0 ? 1.0 : -1.0) * std::sqrt(x * x + size * size);
  }
  return base + cplx(0.0, 1.0) * std::sqrt(-(w * w + size * size));
}

Zipper::Jet SlitHull::jet(double x) const {
  const double w = x - base;
  Zipper::Jet j;
  if (kind == HullKind::half_disk) {
    if (std::abs(w) <= size)
      throw geometry_error("evaluation point inside the hull footprint");
    const double r2 = size * size;
    j.v = x + r2 / w;
    j.d1 = 1.0 - r2 / (w * w);
    j.d2 = 2.0 * r2 / (w * w * w);
    j.d3 = -6.0 * r2 / (w * w * w * w);
    return j;
  }
  if (w == 0.0) throw geometry_error("evaluation point at the hull foot");
  const double h2 = size * size;
  const double s = (w >= 0 ? 1.0 : -1.0) * std::sqrt(w * w + h2);
  j.v = base + s;
  j.d1 = w / s;
  j.d2 = h2 / (s * s * s);
  j.d3 = -3.0 * h2 * w / std::pow(s, 5);
  return j;
}

std::vector<cplx> SlitHull::boundary(std::size_t n) const {
  if (n < 2) throw malformed_input("need at least two boundary samples");
  std::vector<cplx> pts;
  pts.reserve(n);
  if (kind == HullKind::vertical_slit) {
    for (std::size_t j = 1; j <= n; ++j)
      pts.emplace_back(base, size * double(j) / double(n));
  } else {
    for (std::size_t j = 1; j <= n; ++j) {
      const double th = kPi * (1.0 - double(j) / double(n));
      pts.push_back(base + size * std::polar(1.0, th));
    }
    pts.back() = cplx(base + size, 0.0);  // exact touch-down
  }
  return pts;
}

PsiDerivatives psi_derivatives(const SlitHull& K, const DrivingFunction& lambda,
                               double t, const RestrictionConfig& cfg) {
  check_hull(K);
  if (!(t >= 0)) throw domain_error("capacity time must be nonnegative");
  return node_value(K, lambda, t, cfg);
}

double loop_measure(const SlitHull& K, const DrivingFunction& lambda, double t,
                    const RestrictionConfig& cfg) {
  check_hull(K);
  if (!(t >= 0)) throw domain_error("capacity time must be nonnegative");
  if (t == 0.0) return 0.0;
  auto f = [&](double s) {
    const double sw = node_value(K, lambda, s, cfg).schwarzian_0;
    const double integrand = -sw / 3.0;
    if (integrand < -1e-8 * (1.0 + std::abs(sw)))
      throw accuracy_error("loop-measure integrand turned negative");
    return integrand;
  };
  return adaptive_simpson(f, 0.0, t, cfg.loop_rel_tol, cfg.loop_max_depth);
}

double restricted_energy(const SlitHull& K, const DrivingFunction& lambda, double t,
                         const RestrictionConfig& cfg) {
  check_hull(K);
  if (!(t >= 0)) throw domain_error("capacity time must be nonnegative");
  if (t == 0.0) return 0.0;
  const std::size_t n = odd_nodes(cfg.nodes);
  auto nodes = psi_nodes(K, lambda, t, n, cfg);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i)
    d[i] = 3.0 * nodes[i].double_prime_0 / nodes[i].prime_0;
  return drift_corrected_energy(lambda, t, d);
}

RestrictionReport restriction_identity(const SlitHull& K, const DrivingFunction& lambda,
                                       double t, const RestrictionConfig& cfg) {
  check_hull(K);
  if (!(t > 0)) throw domain_error("capacity time must be positive");
  const std::size_t n = odd_nodes(cfg.nodes);
  auto nodes = psi_nodes(K, lambda, t, n, cfg);
  RestrictionReport rep;
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i)
    d[i] = 3.0 * nodes[i].double_prime_0 / nodes[i].prime_0;
  rep.restricted = drift_corrected_energy(lambda, t, d);
  rep.loop = loop_measure(K, lambda, t, cfg);
  rep.psi0_prime = nodes.front().prime_0;
  rep.psit_prime = nodes.back().prime_0;
  rep.curve_energy = energy(lambda, t).total;
  rep.schwarzian_form = 3.0 * std::log(std::abs(rep.psi0_prime)) + 12.0 * rep.loop -
                        3.0 * std::log(std::abs(rep.psit_prime)) + rep.curve_energy;
  // Independent check: push the curve through psi_0 and re-zip.
  TraceConfig tc;
  tc.flow = cfg.flow;
  tc.resolution = cfg.trace_resolution;
  CurveSample curve = trace(lambda, t, cfg.trace_resolution, tc);
  const double shift = map_out_shift(K);
  std::vector<cplx> image;
  image.reserve(curve.points.size());
  for (cplx z : curve.points) image.push_back(K.map_out(z) - shift);
  DrivingFunction zipped = inverse_transform(image, 0.0, cfg.zipper);
  rep.zipped_image = energy(zipped, zipped.horizon()).total;
  return rep;
}

CommutationResult commutation_check(const TwoSlitConfig& config,
                                    const RestrictionConfig& cfg) {
  if (!(config.T > 0)) throw domain_error("first-slit horizon must be positive");
  if (config.S < 0) throw domain_error("second-slit horizon must be nonnegative");
  TraceConfig tc;
  tc.flow = cfg.flow;
  tc.resolution = cfg.trace_resolution;
  CurveSample tW = trace(config.W, config.T, cfg.trace_resolution, tc);
  std::vector<cplx> otherU, otherW;
  if (config.S > 0) {
    CurveSample tU = trace(config.U, config.S, cfg.trace_resolution, tc);
    otherU.reserve(tU.points.size());
    for (cplx z : tU.points) otherU.push_back(-1.0 / z);
    double dist = 1e300;
    for (cplx a : tW.points)
      for (cplx b : otherU) dist = std::min(dist, std::abs(a - b));
    if (dist < 10.0 * cfg.trace_resolution)
      throw geometry_error("the two slits are not at positive distance");
  }
  otherW.reserve(tW.points.size());
  for (cplx z : tW.points) otherW.push_back(-1.0 / z);
  const CommutationResult res{
      energy(config.U, config.S).total + cross_energy(config.W, config.T, otherU, cfg),
      energy(config.W, config.T).total + cross_energy(config.U, config.S, otherW, cfg),
      0.0};
  return {res.lhs, res.rhs, std::abs(res.lhs - res.rhs)};
}

}  // namespace loewner
