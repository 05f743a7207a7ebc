#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace loewner {

// A driving function sampled in capacity time, interpreted as piecewise
// linear between samples and constant after the last one. Chordal drivers
// start at 0; radial (circle) drivers may start anywhere.
// The piecewise-linear form makes energy, scaling and additivity exact.
class DrivingFunction {
 public:
  DrivingFunction() = default;
  // Validates monotone times, times[0] = 0, finite values.
  DrivingFunction(std::vector<double> times, std::vector<double> values);

  static DrivingFunction zero(double horizon);
  // Dense sampling of an analytic formula; default step 1e-3 capacity time.
  template <typename F>
  static DrivingFunction sampled(F&& f, double horizon, double step = 1e-3);
  static DrivingFunction linear(double slope, double horizon);

  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return times_.size(); }
  double horizon() const { return times_.back(); }

  // Piecewise-linear value, constant extension beyond the last sample.
  double value(double t) const;
  // Slope of the segment containing t (right-continuous; 0 past the end).
  double slope(double t) const;
  // Index i of the segment [times[i], times[i+1]) containing t.
  std::size_t segment(double t) const;

 private:
  std::vector<double> times_{0.0};
  std::vector<double> values_{0.0};
};

struct EnergyReport {
  double total = 0.0;
  std::vector<double> per_interval;
  double horizon = 0.0;
};

// (1/2) * int_0^T lambda_dot^2, exact on the segment representation:
// a segment of slope m over length h contributes m^2 h / 2.
EnergyReport energy(const DrivingFunction& lambda, double T);

// Partition sum  sum |dlambda|^2 / dt  (no 1/2 prefactor);
// its supremum over partitions equals 2 * I_T.
double energy_partition_sup(const DrivingFunction& lambda,
                            const std::vector<double>& partition);

struct HolderBound {
  double norm_estimate = 0.0;  // max over sample pairs of |dlambda| / sqrt(dt)
  double bound = 0.0;          // sqrt(2 * I_T)
};
HolderBound holder_half_norm_bound(const DrivingFunction& lambda, double T);

// Driving of the rescaled curve u*gamma: t -> u * lambda(t / u^2).
DrivingFunction scale_driving(const DrivingFunction& lambda, double u);

// Driving of f_s(gamma[s, inf)): t -> lambda(s + t) - lambda(s).
DrivingFunction shift_restart(const DrivingFunction& lambda, double s);

// Serialization: two-column CSV with header "t,lambda", and a JSON mirror
// with fields "times" and "values".
void write_csv(const DrivingFunction& lambda, std::ostream& os);
DrivingFunction read_driving_csv(std::istream& is);
std::string to_json(const DrivingFunction& lambda);
DrivingFunction driving_from_json(const std::string& text);

template <typename F>
DrivingFunction DrivingFunction::sampled(F&& f, double horizon, double step) {
  std::vector<double> ts, vs;
  const double f0 = f(0.0);
  for (double t = 0.0; t < horizon; t += step) {
    ts.push_back(t);
    vs.push_back(f(t) - f0);
  }
  ts.push_back(horizon);
  vs.push_back(f(horizon) - f0);
  return DrivingFunction(std::move(ts), std::move(vs));
}

}  // namespace loewner
