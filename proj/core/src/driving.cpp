#include "loewner/driving.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "loewner/errors.hpp"

namespace loewner {

DrivingFunction::DrivingFunction(std::vector<double> times,
                                 std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.empty() || times_.size() != values_.size())
    throw malformed_input("driving function needs equal-length nonempty samples");
  if (times_.front() != 0.0) throw malformed_input("times must start at 0");
  for (std::size_t i = 1; i < times_.size(); ++i)
    if (!(times_[i] > times_[i - 1]))
      throw malformed_input("times must be strictly increasing");
  for (double v : values_)
    if (!std::isfinite(v)) throw malformed_input("values must be finite");
}

DrivingFunction DrivingFunction::zero(double horizon) {
  if (!(horizon > 0)) throw domain_error("horizon must be positive");
  return DrivingFunction({0.0, horizon}, {0.0, 0.0});
}

DrivingFunction DrivingFunction::linear(double slope, double horizon) {
  if (!(horizon > 0)) throw domain_error("horizon must be positive");
  return DrivingFunction({0.0, horizon}, {0.0, slope * horizon});
}

std::size_t DrivingFunction::segment(double t) const {
  if (times_.size() < 2 || t <= times_.front()) return 0;
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t i = static_cast<std::size_t>(it - times_.begin());
  return std::min(i - 1, times_.size() - 2);
}

double DrivingFunction::value(double t) const {
  if (t <= 0) return values_.front();
  if (t >= times_.back()) return values_.back();
  std::size_t i = segment(t);
  double h = times_[i + 1] - times_[i];
  double w = (t - times_[i]) / h;
  return values_[i] + w * (values_[i + 1] - values_[i]);
}

double DrivingFunction::slope(double t) const {
  if (t >= times_.back() || times_.size() < 2) return 0.0;
  std::size_t i = segment(t);
  return (values_[i + 1] - values_[i]) / (times_[i + 1] - times_[i]);
}

EnergyReport energy(const DrivingFunction& lambda, double T) {
  if (!(T >= 0)) throw domain_error("energy horizon must be nonnegative");
  const auto& ts = lambda.times();
  const auto& vs = lambda.values();
  EnergyReport rep;
  rep.horizon = T;
  for (std::size_t i = 0; i + 1 < ts.size() && ts[i] < T; ++i) {
    double h = std::min(ts[i + 1], T) - ts[i];
    double m = (vs[i + 1] - vs[i]) / (ts[i + 1] - ts[i]);
    double e = 0.5 * m * m * h;
    rep.per_interval.push_back(e);
    rep.total += e;
  }
  return rep;
}

double energy_partition_sup(const DrivingFunction& lambda,
                            const std::vector<double>& partition) {
  if (partition.size() < 2 || partition.front() != 0.0)
    throw malformed_input("partition must start at 0 with at least two points");
  double sum = 0.0;
  for (std::size_t j = 1; j < partition.size(); ++j) {
    double dt = partition[j] - partition[j - 1];
    if (!(dt > 0)) throw malformed_input("degenerate partition interval");
    double dl = lambda.value(partition[j]) - lambda.value(partition[j - 1]);
    sum += dl * dl / dt;
  }
  return sum;
}

HolderBound holder_half_norm_bound(const DrivingFunction& lambda, double T) {
  const auto& ts = lambda.times();
  const auto& vs = lambda.values();
  HolderBound hb;
  hb.bound = std::sqrt(2.0 * energy(lambda, T).total);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] > T) break;
    for (std::size_t j = i + 1; j < ts.size(); ++j) {
      double tj = std::min(ts[j], T);
      if (tj <= ts[i]) break;
      double r = std::abs(lambda.value(tj) - vs[i]) / std::sqrt(tj - ts[i]);
      hb.norm_estimate = std::max(hb.norm_estimate, r);
      if (ts[j] >= T) break;
    }
  }
  return hb;
}

DrivingFunction scale_driving(const DrivingFunction& lambda, double u) {
  if (!(u > 0)) throw domain_error("scale factor must be positive");
  std::vector<double> ts, vs;
  ts.reserve(lambda.size());
  vs.reserve(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    ts.push_back(u * u * lambda.times()[i]);
    vs.push_back(u * lambda.values()[i]);
  }
  return DrivingFunction(std::move(ts), std::move(vs));
}

DrivingFunction shift_restart(const DrivingFunction& lambda, double s) {
  if (!(s >= 0)) throw domain_error("shift must be nonnegative");
  const double base = lambda.value(s);
  std::vector<double> ts{0.0}, vs{0.0};
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (lambda.times()[i] > s) {
      ts.push_back(lambda.times()[i] - s);
      vs.push_back(lambda.values()[i] - base);
    }
  }
  if (ts.size() == 1) {
    ts.push_back(1.0);
    vs.push_back(0.0);
  }
  return DrivingFunction(std::move(ts), std::move(vs));
}

void write_csv(const DrivingFunction& lambda, std::ostream& os) {
  os << "t,lambda\n";
  os.precision(17);
  for (std::size_t i = 0; i < lambda.size(); ++i)
    os << lambda.times()[i] << ',' << lambda.values()[i] << '\n';
}

DrivingFunction read_driving_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw malformed_input("empty driving CSV");
  std::vector<double> ts, vs;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double t, v;
    char comma;
    if (!(ss >> t >> comma >> v)) throw malformed_input("bad driving CSV row: " + line);
    ts.push_back(t);
    vs.push_back(v);
  }
  return DrivingFunction(std::move(ts), std::move(vs));
}

std::string to_json(const DrivingFunction& lambda) {
  nlohmann::json j;
  j["times"] = lambda.times();
  j["values"] = lambda.values();
  return j.dump();
}

DrivingFunction driving_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  return DrivingFunction(j.at("times").get<std::vector<double>>(),
                         j.at("values").get<std::vector<double>>());
}

}  // namespace loewner
