#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "robicurve/acceptance.hpp"
#include "robicurve/estimators.hpp"
#include "robicurve/ic_solver.hpp"
#include "robicurve/maxmin_tests.hpp"
#include "robicurve/radius_minimax.hpp"
#include "robicurve/risk.hpp"
#include "robicurve/sp_projection.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

// exit codes: 0 success, 2 config error, 3 solver nonconvergence
constexpr int kOk = 0, kConfigError = 2, kSolverError = 3;

using robicurve::kInf;

std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

double parse_radius(const std::string& s) {
  if (s == "inf") return kInf;
  size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size() || v < 0.0) throw robicurve::ConfigError("r: expected radius >= 0 or inf");
  return v;
}

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(parse_radius(tok));
  if (out.empty()) throw robicurve::ConfigError("grid: expected comma-separated radii");
  return out;
}

// Every run opens with a comment recording version, the full config echo, and
// the seed, so outputs are self-describing and byte-identical given a config.
struct CsvWriter {
  std::ostream* out = &std::cout;
  std::ofstream file;

  void open(const std::string& path, const std::string& config_echo, uint64_t seed) {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw robicurve::ConfigError("out: cannot open '" + path + "'");
      out = &file;
    }
    *out << "# robicurve " << kVersion << " | " << config_echo << " | seed=" << seed << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) *out << (i ? "," : "") << cells[i];
    *out << "\n";
  }
};

struct ModelOpts {
  std::string model = "location";
  int k = 1;
  std::string kind = "c";
  std::string design = "normal";
  double x1 = 1.0, x2 = -1.0, p = 0.5;
  int alpha = 1;
  std::string target = "theta";

  void attach(CLI::App* cmd) {
    cmd->add_option("--model", model, "location | scale | regression | regression-scale | regression-intercept")
        ->check(CLI::IsMember({"location", "scale", "regression", "regression-scale",
                               "regression-intercept"}));
    cmd->add_option("--k", k, "parameter dimension")->check(CLI::PositiveNumber);
    cmd->add_option("--kind", kind, "neighborhood kind: c | v | h")
        ->check(CLI::IsMember({"c", "v", "h"}));
    cmd->add_option("--design", design, "regression design: normal | two-point")
        ->check(CLI::IsMember({"normal", "two-point"}));
    cmd->add_option("--x1", x1, "two-point design: first atom");
    cmd->add_option("--x2", x2, "two-point design: second atom");
    cmd->add_option("--p", p, "two-point design: weight of x1");
    cmd->add_option("--alpha", alpha, "conditional neighborhood exponent (regression)")
        ->check(CLI::IsMember({1, 2}));
    cmd->add_option("--target", target, "regression-scale target: theta | sigma | joint")
        ->check(CLI::IsMember({"theta", "sigma", "joint"}));
  }

  robicurve::RegressorDist dist() const {
    if (design == "two-point") return robicurve::RegressorDist::two_point(x1, x2, p);
    return robicurve::RegressorDist::standard_normal(k);
  }

  robicurve::InfluenceCurve solve(double r) const {
    using robicurve::RegScaleTarget;
    if (model == "location") {
      if (kind != "c") throw robicurve::ConfigError("kind: only c is solvable for location");
      return robicurve::solve_location(k, r);
    }
    if (model == "scale") {
      if (kind == "c") return robicurve::solve_scale_c(r);
      if (kind == "v") return robicurve::solve_scale_v(r);
      throw robicurve::ConfigError("kind: scale supports c and v");
    }
    if (kind != "c") throw robicurve::ConfigError("kind: regression models support c only");
    if (model == "regression") return robicurve::solve_regression_c1(r, dist(), alpha);
    if (model == "regression-scale") {
      const RegScaleTarget t = target == "theta"   ? RegScaleTarget::theta
                               : target == "sigma" ? RegScaleTarget::sigma
                                                   : RegScaleTarget::joint;
      return robicurve::solve_regression_scale(r, dist(), t);
    }
    return robicurve::solve_regression_intercept(r, dist());
  }

  robicurve::RiskModel risk_model() const {
    if (model == "location" && kind == "c")
      return k == 1 ? robicurve::RiskModel::Location1 : robicurve::RiskModel::LocationK;
    if (model == "scale" && kind == "c") return robicurve::RiskModel::ScaleC;
    if (model == "scale" && kind == "v") return robicurve::RiskModel::ScaleV;
    throw robicurve::ConfigError("model/kind: risk tables cover location-c, scale-c, scale-v");
  }

  std::string echo() const {
    std::ostringstream os;
    os << "model=" << model << " k=" << k << " kind=" << kind;
    if (model.rfind("regression", 0) == 0) {
      os << " design=" << design;
      if (design == "two-point") os << " x1=" << num(x1) << " x2=" << num(x2) << " p=" << num(p);
      os << " alpha=" << alpha;
      if (model == "regression-scale") os << " target=" << target;
    }
    return os.str();
  }
};

int run_ic(const ModelOpts& m, const std::string& r_spec, const std::string& out) {
  CsvWriter csv;
  csv.open(out, "ic " + m.echo() + " r=" + r_spec, 0);
  csv.row({"model", "kind", "k", "r", "A", "A2", "center", "clip_lower", "clip_upper", "bias",
           "variance"});
  for (double r : parse_grid(r_spec)) {
    const auto ic = m.solve(r);
    csv.row({m.model, m.kind, std::to_string(m.k), num(r), num(ic.A), num(ic.A2),
             num(ic.center), num(ic.clip_lower), num(ic.clip_upper), num(ic.bias),
             num(ic.variance)});
  }
  return kOk;
}

int run_risk(const ModelOpts& m, const std::string& r0_spec, const std::string& r_spec,
             const std::string& out) {
  const auto model = m.risk_model();
  CsvWriter csv;
  csv.open(out, "risk " + m.echo() + " r0=" + r0_spec + " r=" + r_spec, 0);
  csv.row({"model", "kind", "k", "r0", "r", "maxmse", "relmse"});
  for (double r0 : parse_grid(r0_spec)) {
    const auto ic = robicurve::solve_for(model, m.k, r0);
    for (double r : parse_grid(r_spec))
      csv.row({m.model, m.kind, std::to_string(m.k), num(r0), num(r),
               num(robicurve::max_mse(ic, r)), num(robicurve::rel_mse(model, m.k, r0, r))});
  }
  return kOk;
}

int run_rminimax(const ModelOpts& m, double lo, double hi, const std::string& out) {
  const auto res = robicurve::least_favorable_radius(m.risk_model(), m.k, lo, hi);
  CsvWriter csv;
  csv.open(out, "rminimax " + m.echo() + " lo=" + num(lo) + " hi=" + num(hi), 0);
  csv.row({"model", "kind", "k", "r_lo", "r_hi", "r_star", "inefficiency", "sup_argmax"});
  csv.row({m.model, m.kind, std::to_string(m.k), num(res.r_lo), num(res.r_hi), num(res.r_star),
           num(res.inefficiency), num(res.inner_sup_argmax)});
  return kOk;
}

int run_project(const ModelOpts& m, double r, const std::string& out) {
  using robicurve::NeighborhoodSpec;
  const auto sv = robicurve::scores(m.model == "scale" ? robicurve::ModelSpec::scale()
                                                       : robicurve::ModelSpec::location(m.k));
  const NeighborhoodSpec::Kind kind = m.kind == "c"   ? NeighborhoodSpec::Kind::c
                                      : m.kind == "v" ? NeighborhoodSpec::Kind::v
                                                      : NeighborhoodSpec::Kind::h;
  const auto pr = robicurve::project_ball(sv, kind, r);
  CsvWriter csv;
  csv.open(out, "project " + m.echo() + " r=" + num(r), 0);
  csv.row({"model", "kind", "k", "r", "coord", "h_shrink", "v_lo", "v_hi", "u_clip",
           "unbounded", "tv_equiv_radius"});
  for (int j = 0; j < pr.k; ++j) {
    const double vlo = pr.v_lo.empty() ? -kInf : pr.v_lo[j];
    const double vhi = pr.v_hi.empty() ? kInf : pr.v_hi[j];
    const double uclip = pr.u_clip.empty() ? kInf : pr.u_clip[j];
    const double req = kind == NeighborhoodSpec::Kind::v ? robicurve::tv_equiv_radius(r) : kInf;
    csv.row({m.model, m.kind, std::to_string(m.k), num(r), std::to_string(j),
             num(pr.h_shrink), num(vlo), num(vhi), num(uclip),
             pr.unbounded_sp_ic ? "1" : "0", num(req)});
  }
  return kOk;
}

int run_test(const ModelOpts& m, double tau, double r0, double r1, double alpha,
             const std::string& out) {
  const auto sv = robicurve::scores(m.model == "scale" ? robicurve::ModelSpec::scale()
                                                       : robicurve::ModelSpec::location(1));
  robicurve::TestPlan plan;
  if (m.kind == "h")
    plan = robicurve::hellinger_test_plan(tau, r0, r1, alpha, sv);
  else if (m.kind == "v")
    plan = robicurve::tv_test_plan(tau, r0, r1, alpha, sv);
  else
    plan = robicurve::contamination_test_plan(tau, r0, r1, alpha, sv);
  CsvWriter csv;
  csv.open(out,
           "test " + m.echo() + " tau=" + num(tau) + " r0=" + num(r0) + " r1=" + num(r1) +
               " alpha=" + num(alpha),
           0);
  csv.row({"model", "kind", "tau", "r0", "r1", "alpha", "clip_lo", "clip_hi", "critical_value",
           "asymptotic_power"});
  csv.row({m.model, m.kind, num(tau), num(r0), num(r1), num(alpha), num(plan.clip_lo),
           num(plan.clip_hi), num(plan.critical_value), num(plan.asymptotic_power)});
  return kOk;
}

int run_estimate(const ModelOpts& m, double r, const std::string& data_path,
                 const std::string& start_kind, const std::string& out) {
  std::ifstream in(data_path);
  if (!in) throw robicurve::ConfigError("data: cannot open '" + data_path + "'");
  robicurve::Sample sample;
  double v = 0.0;
  while (in >> v) sample.y.push_back(v);
  if (sample.y.empty()) throw robicurve::ConfigError("data: no observations in file");
  sample.contaminated.assign(sample.y.size(), 0);

  const auto model = m.model == "scale" ? robicurve::ModelSpec::scale()
                                        : robicurve::ModelSpec::location(1);
  const auto ic = m.solve(r);
  const auto start_enum = start_kind == "least-squares"
                              ? robicurve::SimConfig::Start::LeastSquares
                              : robicurve::SimConfig::Start::MedianMad;
  const double start = robicurve::start_estimate(model, sample, start_enum);
  const double est = robicurve::one_step(ic, sample, start);

  CsvWriter csv;
  csv.open(out, "estimate " + m.echo() + " r=" + num(r) + " data=" + data_path +
                    " start=" + start_kind,
           0);
  csv.row({"model", "kind", "r", "n", "start", "onestep", "mestimate", "root_found"});
  std::string mest = "inf", root = "0";
  if (model.variant == robicurve::ModelSpec::Variant::Location) {
    const auto fit = robicurve::m_estimate(ic, sample);
    mest = num(fit.estimate);
    root = fit.root_found ? "1" : "0";
  }
  csv.row({m.model, m.kind, num(r), std::to_string(sample.n()), num(start), num(est), mest,
           root});
  return kOk;
}

int run_simulate(const ModelOpts& m, double r0, double r_true, int n, int reps, uint64_t seed,
                 const std::string& h_spec, const std::string& start_kind,
                 const std::string& out) {
  const auto model = m.model == "scale" ? robicurve::ModelSpec::scale()
                                        : robicurve::ModelSpec::location(1);
  const auto ic = m.solve(r0);

  robicurve::SimConfig cfg;
  cfg.n = n;
  cfg.replications = reps;
  cfg.seed = seed;
  cfg.r = r_true;
  cfg.start = start_kind == "least-squares" ? robicurve::SimConfig::Start::LeastSquares
                                            : robicurve::SimConfig::Start::MedianMad;
  // H spec: point:X0 | normal:MU:SIGMA
  if (h_spec.rfind("point:", 0) == 0) {
    cfg.H = robicurve::ContaminationH::point_mass(std::stod(h_spec.substr(6)));
  } else if (h_spec.rfind("normal:", 0) == 0) {
    const std::string rest = h_spec.substr(7);
    const size_t colon = rest.find(':');
    if (colon == std::string::npos)
      throw robicurve::ConfigError("H: expected normal:MU:SIGMA");
    cfg.H = robicurve::ContaminationH::normal(std::stod(rest.substr(0, colon)),
                                              std::stod(rest.substr(colon + 1)));
  } else if (!h_spec.empty()) {
    throw robicurve::ConfigError("H: expected point:X0 or normal:MU:SIGMA");
  }

  const auto rec = robicurve::monte_carlo_mse(ic, model, cfg);
  CsvWriter csv;
  csv.open(out,
           "simulate " + m.echo() + " r0=" + num(r0) + " r=" + num(r_true) +
               " n=" + std::to_string(n) + " reps=" + std::to_string(reps) + " H=" +
               (h_spec.empty() ? "point:0" : h_spec) + " start=" + start_kind,
           seed);
  csv.row({"model", "kind", "r0", "r_true", "n", "reps", "seed", "nmse", "mcse"});
  csv.row({m.model, m.kind, num(r0), num(r_true), std::to_string(n), std::to_string(reps),
           std::to_string(seed), num(rec.nmse), num(rec.mcse)});
  return kOk;
}

int run_selftest(bool fast) {
  const auto results = robicurve::run_acceptance_suite(!fast);
  int failures = 0;
  for (const auto& r : results) {
    std::printf("criterion %02d [%s] %s — %s\n", r.id, r.pass ? "pass" : "FAIL",
                r.name.c_str(), r.detail.c_str());
    if (!r.pass) ++failures;
  }
  std::printf("selftest: %zu criteria, %d failed\n", results.size(), failures);
  return failures == 0 ? kOk : 1;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robicurve: optimally robust influence curves, risks, and tests"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "flat key=value config with [subcommand] sections");
  app.allow_config_extras(false);  // unknown keys rejected
  app.require_subcommand(0, 1);

  bool selftest = false, selftest_fast = false;
  app.add_flag("--selftest", selftest, "run the acceptance suite, one line per criterion");
  app.add_flag("--selftest-fast", selftest_fast, "acceptance suite with a reduced MC budget");

  std::string out;
  std::vector<std::string> r_spec{"0.5"}, r0_spec{"0.5"};
  double lo = 0.1, hi = 0.9, tau = 1.0, r0 = 0.1, r1 = 0.1, alpha = 0.05, r_true = 0.0;
  int n = 100, reps = 100;
  uint64_t seed = 0;
  std::string data_path, h_spec, start_kind = "median-mad";

  ModelOpts ic_m, risk_m, rmin_m, proj_m, test_m, est_m, sim_m;

  auto* c_ic = app.add_subcommand("ic", "solve an optimally robust influence curve");
  ic_m.attach(c_ic);
  c_ic->add_option("--r", r_spec, "radius or comma grid; inf for the minimal-bias limit")
      ->expected(1, -1);
  c_ic->add_option("--out", out, "output CSV path (default stdout)");

  auto* c_risk = app.add_subcommand("risk", "maxMSE / relMSE over radius grids");
  risk_m.attach(c_risk);
  c_risk->add_option("--r0", r0_spec, "design radius grid")->expected(1, -1);
  c_risk->add_option("--r", r_spec, "true radius grid")->expected(1, -1);
  c_risk->add_option("--out", out, "output CSV path");

  auto* c_rmin = app.add_subcommand("rminimax", "least favorable design radius on [lo, hi]");
  rmin_m.attach(c_rmin);
  c_rmin->add_option("--lo", lo, "interval lower endpoint");
  c_rmin->add_option("--hi", hi, "interval upper endpoint");
  c_rmin->add_option("--out", out, "output CSV path");

  auto* c_proj = app.add_subcommand("project", "score projection on a tangent ball");
  proj_m.attach(c_proj);
  double proj_r = 0.25;
  c_proj->add_option("--r", proj_r, "ball radius");
  c_proj->add_option("--out", out, "output CSV path");

  auto* c_test = app.add_subcommand("test", "maxmin test plan for a neighborhood pair");
  test_m.attach(c_test);
  c_test->add_option("--tau", tau, "alternative separation");
  c_test->add_option("--r0", r0, "null neighborhood radius");
  c_test->add_option("--r1", r1, "alternative neighborhood radius");
  c_test->add_option("--level", alpha, "asymptotic level of the test");
  c_test->add_option("--out", out, "output CSV path");

  auto* c_est = app.add_subcommand("estimate", "one-step / M-estimate from a data file");
  est_m.attach(c_est);
  double est_r = 0.5;
  c_est->add_option("--r", est_r, "design radius of the influence curve");
  c_est->add_option("--data", data_path, "whitespace-separated observations")->required();
  c_est->add_option("--start", start_kind, "median-mad | least-squares")
      ->check(CLI::IsMember({"median-mad", "least-squares"}));
  c_est->add_option("--out", out, "output CSV path");

  auto* c_sim = app.add_subcommand("simulate", "Monte Carlo n*MSE under contamination");
  sim_m.attach(c_sim);
  double sim_r0 = 0.5;
  c_sim->add_option("--r0", sim_r0, "design radius of the influence curve");
  c_sim->add_option("--r", r_true, "true contamination radius");
  c_sim->add_option("--n", n, "sample size")->check(CLI::PositiveNumber);
  c_sim->add_option("--reps", reps, "replications")->check(CLI::PositiveNumber);
  c_sim->add_option("--seed", seed, "64-bit seed");
  c_sim->add_option("--H", h_spec, "contaminant: point:X0 | normal:MU:SIGMA");
  c_sim->add_option("--start", start_kind, "median-mad | least-squares")
      ->check(CLI::IsMember({"median-mad", "least-squares"}));
  c_sim->add_option("--out", out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForVersion")
      return app.exit(e);
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (selftest || selftest_fast) return run_selftest(selftest_fast);
    if (c_ic->parsed()) return run_ic(ic_m, join(r_spec), out);
    if (c_risk->parsed()) return run_risk(risk_m, join(r0_spec), join(r_spec), out);
    if (c_rmin->parsed()) return run_rminimax(rmin_m, lo, hi, out);
    if (c_proj->parsed()) return run_project(proj_m, proj_r, out);
    if (c_test->parsed()) return run_test(test_m, tau, r0, r1, alpha, out);
    if (c_est->parsed()) return run_estimate(est_m, est_r, data_path, start_kind, out);
    if (c_sim->parsed())
      return run_simulate(sim_m, sim_r0, r_true, n, reps, seed, h_spec, start_kind, out);
    std::cerr << app.help();
    return kConfigError;
  } catch (const robicurve::SolverNonconvergence& e) {
    std::cerr << "solver nonconvergence: " << e.what() << "\n";
    return kSolverError;
  } catch (const robicurve::OracleNonconvergence& e) {
    std::cerr << "solver nonconvergence: " << e.what() << "\n";
    return kSolverError;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
}
