// loewner_lab: command-line driver for the deterministic Loewner toolkit.
//
// Conventions (also stated in --help): angles are radians; all times are
// capacity times (hcap = 2t). Every command writes a deterministic JSON
// summary embedding its resolved configuration (schema_version 1) plus CSV
// data files where tabular; wall-clock metadata is isolated in metadata.json
// so data files are byte-reproducible. Exit codes: 0 success, 1 domain or
// geometry error, 2 numerical-accuracy error, 64 unknown command or
// malformed input.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "loewner/driving.hpp"
#include "loewner/errors.hpp"
#include "loewner/flow.hpp"
#include "loewner/minimizers.hpp"
#include "loewner/restriction.hpp"
#include "loewner/sle_mc.hpp"
#include "loewner/zipper.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace loewner;

namespace {

constexpr int kExitUsage = 64;

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  std::optional<double> resolution;
  std::optional<std::size_t> samples;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON run configuration");
  cmd->add_option("--out", o.out_dir, "output directory (created if missing)");
  cmd->add_option("--seed", o.seed, "RNG seed (stochastic commands)");
  cmd->add_option("--tolerance", o.tolerance, "numeric tolerance override");
  cmd->add_option("--resolution", o.resolution, "capacity-time resolution override");
  cmd->add_option("--samples", o.samples, "sample-count override");
  cmd->add_flag("--quiet", o.quiet, "suppress the summary echo on stdout");
}

json load_config(const CommonOpts& o) {
  if (o.config_path.empty()) return json::object();
  std::ifstream in(o.config_path);
  if (!in) throw malformed_input("cannot open config file: " + o.config_path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw malformed_input(std::string("config is not valid JSON: ") + e.what());
  }
  return j;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw malformed_input("cannot write " + p.string());
  out << text;
}

void finish(const CommonOpts& o, const std::string& command, json& summary) {
  summary["schema_version"] = 1;
  summary["command"] = command;
  fs::create_directories(o.out_dir);
  const fs::path dir(o.out_dir);
  write_text(dir / (command + "_summary.json"), summary.dump(2) + "\n");
  json meta;
  meta["written_at_unix_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count();
  write_text(dir / "metadata.json", meta.dump(2) + "\n");
  if (!o.quiet) std::cout << summary.dump(2) << "\n";
}

// Driver specification:
//   {"type":"zero","horizon":T}
//   {"type":"linear","slope":m,"horizon":T}
//   {"type":"samples","times":[...],"values":[...]}
//   {"type":"csv","path":"driver.csv"}           (header "t,lambda")
//   {"type":"minimizer","theta":angle}           (one-point minimizer)
DrivingFunction driver_from_spec(const json& spec) {
  if (!spec.is_object() || !spec.contains("type"))
    throw malformed_input("driver spec needs a \"type\" field");
  const std::string type = spec.at("type");
  if (type == "zero") return DrivingFunction::zero(spec.at("horizon").get<double>());
  if (type == "linear")
    return DrivingFunction::linear(spec.at("slope").get<double>(),
                                   spec.at("horizon").get<double>());
  if (type == "samples")
    return DrivingFunction(spec.at("times").get<std::vector<double>>(),
                           spec.at("values").get<std::vector<double>>());
  if (type == "csv") {
    std::ifstream in(spec.at("path").get<std::string>());
    if (!in) throw malformed_input("cannot open driver CSV");
    return read_driving_csv(in);
  }
  if (type == "minimizer")
    return one_point_minimizer(spec.at("theta").get<double>()).driving;
  throw malformed_input("unknown driver type: " + type);
}

json driver_echo(const DrivingFunction& lam) {
  return json{{"knots", lam.size()}, {"horizon", lam.horizon()}};
}

ConstraintSet constraints_from(const json& arr) {
  if (!arr.is_array() || arr.empty())
    throw malformed_input("\"constraints\" must be a non-empty array");
  ConstraintSet cs;
  for (const auto& c : arr)
    cs.points.push_back({cplx(c.at("re").get<double>(), c.at("im").get<double>()),
                         c.at("side").get<int>()});
  return cs;
}

json constraints_echo(const ConstraintSet& cs) {
  json arr = json::array();
  for (const auto& c : cs.points)
    arr.push_back({{"re", c.z.real()}, {"im", c.z.imag()}, {"side", c.side}});
  return arr;
}

SlitHull hull_from(const json& spec) {
  SlitHull K;
  const std::string kind = spec.at("kind");
  if (kind == "vertical-slit")
    K.kind = HullKind::vertical_slit;
  else if (kind == "half-disk")
    K.kind = HullKind::half_disk;
  else
    throw malformed_input("hull kind must be \"vertical-slit\" or \"half-disk\"");
  K.base = spec.at("base").get<double>();
  K.size = spec.at("size").get<double>();
  return K;
}

std::uint64_t require_seed(const CommonOpts& o, const json& cfg) {
  if (o.seed) return *o.seed;
  if (cfg.contains("seed")) return cfg.at("seed").get<std::uint64_t>();
  throw malformed_input("a seed is mandatory for stochastic commands");
}

void save_driver_csv(const fs::path& p, const DrivingFunction& lam) {
  std::ostringstream os;
  write_csv(lam, os);
  write_text(p, os.str());
}

// --- commands ---------------------------------------------------------------

int cmd_energy(const CommonOpts& o) {
  json cfg = load_config(o);
  DrivingFunction lam = driver_from_spec(
      cfg.contains("driver") ? cfg.at("driver") : json{{"type", "zero"}, {"horizon", 1.0}});
  const double T = cfg.value("T", lam.horizon());
  EnergyReport rep = energy(lam, T);
  json s;
  s["config"] = {{"driver", driver_echo(lam)}, {"T", T}};
  s["total"] = rep.total;
  s["horizon"] = rep.horizon;
  s["per_interval"] = rep.per_interval;
  finish(o, "energy", s);
  return 0;
}

int cmd_trace(const CommonOpts& o) {
  json cfg = load_config(o);
  DrivingFunction lam = driver_from_spec(cfg.at("driver"));
  const double T = cfg.value("T", lam.horizon());
  TraceConfig tc;
  tc.resolution = o.resolution.value_or(cfg.value("resolution", 1e-3));
  CurveSample curve = trace(lam, T, tc.resolution, tc);
  std::ostringstream os;
  write_csv(curve, os);
  fs::create_directories(o.out_dir);
  write_text(fs::path(o.out_dir) / "trace.csv", os.str());
  json s;
  s["config"] = {{"driver", driver_echo(lam)}, {"T", T}, {"resolution", tc.resolution}};
  s["samples"] = curve.points.size();
  s["hcap"] = hcap(curve);
  s["data"] = "trace.csv";
  finish(o, "trace", s);
  return 0;
}

int cmd_invert(const CommonOpts& o) {
  json cfg = load_config(o);
  std::vector<cplx> pts;
  if (cfg.contains("curve_csv")) {
    std::ifstream in(cfg.at("curve_csv").get<std::string>());
    if (!in) throw malformed_input("cannot open curve CSV");
    pts = read_curve_csv(in).points;
  } else {
    for (const auto& p : cfg.at("points"))
      pts.emplace_back(p.at("re").get<double>(), p.at("im").get<double>());
  }
  const double base = cfg.value("base", 0.0);
  DrivingFunction lam = inverse_transform(pts, base);
  fs::create_directories(o.out_dir);
  save_driver_csv(fs::path(o.out_dir) / "driving.csv", lam);
  json s;
  s["config"] = {{"points", pts.size()}, {"base", base}};
  s["capacity"] = lam.horizon();
  s["energy"] = energy(lam, lam.horizon()).total;
  s["data"] = "driving.csv";
  finish(o, "invert", s);
  return 0;
}

int cmd_reverse_check(const CommonOpts& o) {
  json cfg = load_config(o);
  DrivingFunction lam = driver_from_spec(
      cfg.contains("driver") ? cfg.at("driver")
                             : json{{"type", "linear"}, {"slope", 1.0}, {"horizon", 1.0}});
  const double T = cfg.value("T", lam.horizon());
  std::vector<double> res = cfg.value("resolutions", std::vector<double>{4e-3, 2e-3, 1e-3});
  std::vector<double> tails =
      cfg.value("tail_capacities", std::vector<double>(res.size(), 1e2));
  if (o.resolution) res = {*o.resolution};
  if (res.size() == 1 && tails.size() != 1) tails = {tails.back()};
  auto table = reversal_table(lam, T, res, tails);
  std::ostringstream os;
  os << "resolution,tail_capacity,energy_fwd,energy_rev,rel_err\n";
  json rows = json::array();
  for (const auto& r : table) {
    os << r.resolution << "," << r.tail_capacity << "," << r.energy_fwd << ","
       << r.energy_rev << "," << r.rel_err << "\n";
    rows.push_back({{"resolution", r.resolution},
                    {"tail_capacity", r.tail_capacity},
                    {"energy_fwd", r.energy_fwd},
                    {"energy_rev", r.energy_rev},
                    {"rel_err", r.rel_err}});
  }
  fs::create_directories(o.out_dir);
  write_text(fs::path(o.out_dir) / "reversal.csv", os.str());
  json s;
  s["config"] = {{"driver", driver_echo(lam)},
                 {"T", T},
                 {"resolutions", res},
                 {"tail_capacities", tails}};
  s["forward_energy"] = table.empty() ? 0.0 : table.front().energy_fwd;
  s["table"] = rows;
  s["data"] = "reversal.csv";
  finish(o, "reverse-check", s);
  return 0;
}

int cmd_minimizer(const CommonOpts& o) {
  json cfg = load_config(o);
  const double theta = cfg.value("theta", 1.5707963267948966);
  MinimizerResult r = one_point_minimizer(theta);
  fs::create_directories(o.out_dir);
  save_driver_csv(fs::path(o.out_dir) / "minimizer.csv", r.driving);
  json s;
  s["config"] = {{"theta", theta}};
  s["energy"] = r.energy;
  s["reference"] = -8.0 * std::log(std::sin(theta));
  s["tau"] = r.status.empty() ? 0.0 : r.status[0].tau;
  s["data"] = "minimizer.csv";
  finish(o, "minimizer", s);
  return 0;
}

int cmd_constrained_min(const CommonOpts& o) {
  json cfg = load_config(o);
  ConstraintSet cs = constraints_from(cfg.at("constraints"));
  const double T = cfg.value("T", 0.0);
  MinimizeOptions opt;
  opt.knots = cfg.value("knots", opt.knots);
  MinimizerResult r = minimize_constrained(cs, T, opt);
  fs::create_directories(o.out_dir);
  save_driver_csv(fs::path(o.out_dir) / "constrained.csv", r.driving);
  json s;
  s["config"] = {{"constraints", constraints_echo(cs)}, {"T", T}, {"knots", opt.knots}};
  s["energy"] = r.energy;
  s["converged"] = r.converged;
  json st = json::array();
  for (const auto& p : r.status)
    st.push_back({{"hit", p.hit}, {"tau", p.tau}, {"w", p.w}, {"compatible", p.compatible}});
  s["status"] = st;
  s["data"] = "constrained.csv";
  finish(o, "constrained-min", s);
  return 0;
}

int cmd_sle_passage(const CommonOpts& o) {
  json cfg = load_config(o);
  const double kappa = cfg.value("kappa", 2.0);
  ConstraintSet cs = constraints_from(cfg.at("constraints"));
  const double T = cfg.value("T", 2.0);
  const double dt = o.resolution.value_or(cfg.value("dt", 1e-3));
  const std::size_t n = o.samples.value_or(cfg.value("samples", std::size_t{100000}));
  const std::uint64_t seed = require_seed(o, cfg);
  PassageEstimate est = estimate_passage(kappa, cs, T, dt, n, seed);
  json s;
  s["config"] = {{"kappa", kappa}, {"constraints", constraints_echo(cs)},
                 {"T", T},         {"dt", dt},
                 {"samples", n},   {"seed", seed}};
  s["kappa"] = est.kappa;
  s["constraint"] = constraints_echo(est.constraint);
  s["p"] = est.probability;
  s["ci"] = est.half_width;
  s["n"] = est.samples;
  s["seed"] = est.seed;
  finish(o, "sle-passage", s);
  return 0;
}

int cmd_ld_rate(const CommonOpts& o) {
  json cfg = load_config(o);
  std::vector<double> kappas =
      cfg.value("kappas", std::vector<double>{1.0, 0.5, 0.25, 0.1});
  ConstraintSet cs = constraints_from(cfg.at("constraints"));
  const double T = cfg.value("T", 2.0);
  const double dt = o.resolution.value_or(cfg.value("dt", 1e-3));
  const std::size_t n = o.samples.value_or(cfg.value("samples", std::size_t{100000}));
  const std::string method_name = cfg.value("method", std::string("auto"));
  RateMethod method = RateMethod::automatic_choice;
  if (method_name == "quadrature")
    method = RateMethod::quadrature;
  else if (method_name == "monte-carlo")
    method = RateMethod::monte_carlo;
  else if (method_name != "auto")
    throw malformed_input("method must be auto, quadrature or monte-carlo");
  std::uint64_t seed = 0;
  const bool needs_seed = method != RateMethod::quadrature;
  if (needs_seed) seed = require_seed(o, cfg);
  auto rows = ld_rate(kappas, cs, T, dt, n, seed, method);
  std::ostringstream os;
  os << "kappa,rate,reference\n";
  json jr = json::array();
  for (const auto& r : rows) {
    os << r.kappa << "," << r.rate << "," << r.reference << "\n";
    jr.push_back({{"kappa", r.kappa},
                  {"rate", r.rate},
                  {"reference", r.reference},
                  {"monte_carlo", r.monte_carlo},
                  {"lower_bound", r.lower_bound}});
  }
  fs::create_directories(o.out_dir);
  write_text(fs::path(o.out_dir) / "rates.csv", os.str());
  json s;
  s["config"] = {{"kappas", kappas}, {"constraints", constraints_echo(cs)},
                 {"T", T},           {"dt", dt},
                 {"samples", n},     {"method", method_name},
                 {"seed", seed}};
  s["rows"] = jr;
  s["data"] = "rates.csv";
  finish(o, "ld-rate", s);
  return 0;
}

int cmd_restriction(const CommonOpts& o) {
  json cfg = load_config(o);
  SlitHull K = hull_from(cfg.at("hull"));
  DrivingFunction lam = driver_from_spec(cfg.at("driver"));
  const double t = cfg.value("t", lam.horizon());
  std::vector<double> grid =
      cfg.value("t_values", std::vector<double>{0.25 * t, 0.5 * t, 0.75 * t, t});
  RestrictionConfig rc;
  rc.nodes = cfg.value("nodes", rc.nodes);
  rc.hull_samples = cfg.value("hull_samples", rc.hull_samples);
  rc.trace_resolution = o.resolution.value_or(cfg.value("resolution", rc.trace_resolution));
  std::ostringstream os;
  os << "t,lhs,rhs,residual\n";
  json rows = json::array();
  RestrictionReport last;
  for (double tv : grid) {
    last = restriction_identity(K, lam, tv, rc);
    const double resid = std::abs(last.restricted - last.schwarzian_form);
    os << tv << "," << last.restricted << "," << last.schwarzian_form << "," << resid
       << "\n";
    rows.push_back({{"t", tv},
                    {"lhs", last.restricted},
                    {"rhs", last.schwarzian_form},
                    {"residual", resid}});
  }
  fs::create_directories(o.out_dir);
  write_text(fs::path(o.out_dir) / "restriction.csv", os.str());
  json s;
  s["config"] = {{"hull", cfg.at("hull")},
                 {"driver", driver_echo(lam)},
                 {"t_values", grid},
                 {"nodes", rc.nodes},
                 {"hull_samples", rc.hull_samples},
                 {"resolution", rc.trace_resolution}};
  s["rows"] = rows;
  s["final"] = {{"restricted", last.restricted},
                {"schwarzian_form", last.schwarzian_form},
                {"zipped_image", last.zipped_image},
                {"loop_measure", last.loop},
                {"psi0_prime", last.psi0_prime},
                {"psit_prime", last.psit_prime},
                {"curve_energy", last.curve_energy}};
  s["data"] = "restriction.csv";
  finish(o, "restriction", s);
  return 0;
}

int cmd_commute(const CommonOpts& o) {
  json cfg = load_config(o);
  TwoSlitConfig tc;
  tc.W = driver_from_spec(cfg.at("W"));
  tc.U = driver_from_spec(cfg.at("U"));
  tc.T = cfg.value("T", tc.W.horizon());
  tc.S = cfg.value("S", tc.U.horizon());
  std::vector<double> grid = cfg.value("t_values", std::vector<double>{tc.T});
  RestrictionConfig rc;
  rc.nodes = cfg.value("nodes", rc.nodes);
  rc.trace_resolution = o.resolution.value_or(cfg.value("resolution", rc.trace_resolution));
  std::ostringstream os;
  os << "t,lhs,rhs,residual\n";
  json rows = json::array();
  for (double tv : grid) {
    TwoSlitConfig cur = tc;
    cur.T = tv;
    const auto r = commutation_check(cur, rc);
    os << tv << "," << r.lhs << "," << r.rhs << "," << r.residual << "\n";
    rows.push_back(
        {{"t", tv}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"residual", r.residual}});
  }
  fs::create_directories(o.out_dir);
  write_text(fs::path(o.out_dir) / "commute.csv", os.str());
  json s;
  s["config"] = {{"W", driver_echo(tc.W)}, {"U", driver_echo(tc.U)},
                 {"T", tc.T},              {"S", tc.S},
                 {"t_values", grid},       {"resolution", rc.trace_resolution},
                 {"nodes", rc.nodes}};
  s["rows"] = rows;
  s["data"] = "commute.csv";
  finish(o, "commute", s);
  return 0;
}

int cmd_welding(const CommonOpts& o) {
  json cfg = load_config(o);
  DrivingFunction lam = driver_from_spec(cfg.at("driver"));
  const double T = cfg.value("T", lam.horizon());
  std::vector<double> times;
  if (cfg.contains("curve_times")) {
    times = cfg.at("curve_times").get<std::vector<double>>();
  } else {
    const int n = cfg.value("count", 9);
    for (int k = 1; k <= n; ++k) times.push_back(T * double(k) / double(n + 1));
  }
  WeldingReport rep = welding(lam, T, times);
  std::ostringstream os;
  os << "curve_time,x_neg,x_pos\n";
  json rows = json::array();
  for (const auto& p : rep.pairs) {
    os << p.curve_time << "," << p.x_neg << "," << p.x_pos << "\n";
    rows.push_back({{"curve_time", p.curve_time}, {"x_neg", p.x_neg}, {"x_pos", p.x_pos}});
  }
  fs::create_directories(o.out_dir);
  write_text(fs::path(o.out_dir) / "welding.csv", os.str());
  json s;
  s["config"] = {{"driver", driver_echo(lam)}, {"T", T}, {"curve_times", times}};
  s["pairs"] = rows;
  s["ratio1"] = {{"min", rep.ratio1_min}, {"max", rep.ratio1_max}};
  s["ratio2"] = {{"min", rep.ratio2_min}, {"max", rep.ratio2_max}};
  s["data"] = "welding.csv";
  finish(o, "welding", s);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "loewner_lab: deterministic Loewner chains, energy minimizers, SLE "
      "sampling and restriction identities.\n"
      "Angles are radians; times are capacity times (hcap = 2t)."};
  app.require_subcommand(1);

  struct Cmd {
    const char* name;
    const char* help;
    int (*run)(const CommonOpts&);
  };
  const Cmd cmds[] = {
      {"energy", "Dirichlet energy of a driving function", cmd_energy},
      {"trace", "trace a driver to a curve; CSV t,re,im", cmd_trace},
      {"invert", "curve to driving function; CSV t,lambda", cmd_invert},
      {"reverse-check",
       "forward vs time-reversed energy; CSV "
       "resolution,tail_capacity,energy_fwd,energy_rev,rel_err",
       cmd_reverse_check},
      {"minimizer", "one-point minimal-energy driver; CSV t,lambda", cmd_minimizer},
      {"constrained-min", "penalized minimal energy under side constraints",
       cmd_constrained_min},
      {"sle-passage", "Monte Carlo passage probability (seed required)",
       cmd_sle_passage},
      {"ld-rate", "large-deviation rate table; CSV kappa,rate,reference", cmd_ld_rate},
      {"restriction", "domain-restriction identity table; CSV t,lhs,rhs,residual",
       cmd_restriction},
      {"commute", "two-slit commutation table; CSV t,lhs,rhs,residual", cmd_commute},
      {"welding", "conformal welding pairs; CSV curve_time,x_neg,x_pos", cmd_welding},
  };

  std::vector<CommonOpts> opts(std::size(cmds));
  std::vector<std::pair<CLI::App*, const Cmd*>> subs;
  for (std::size_t i = 0; i < std::size(cmds); ++i) {
    CLI::App* sub = app.add_subcommand(cmds[i].name, cmds[i].help);
    add_common(sub, opts[i]);
    subs.emplace_back(sub, &cmds[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (subs[i].first->parsed()) return subs[i].second->run(opts[i]);
    return kExitUsage;
  } catch (const malformed_input& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const geometry_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const accuracy_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const resolution_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const loewner_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
