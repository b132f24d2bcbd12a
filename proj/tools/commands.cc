// Copyright 2026 The finsler_ccm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "commands.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "finsler_ccm/sampled_loop.h"
#include "finsler_ccm/verify.h"
#include "output.h"

namespace finsler_ccm::cli {
namespace {

namespace fs = std::filesystem;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string vec(const Vector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) s += ", ";
    s += num(v(i));
  }
  return s + ")";
}

std::string verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

struct Problem {
  ControlAffineSystem sys;
  FinslerMetric metric;
};

Problem load_problem(const RunConfig& c) {
  Problem p{load_example(c.system), load_metric(c.metric)};
  if (p.metric.dim() != p.sys.state_dim()) {
    throw ConfigError("metric '" + c.metric + "' has dimension " +
                      std::to_string(p.metric.dim()) + " but system '" + c.system +
                      "' has state dimension " + std::to_string(p.sys.state_dim()));
  }
  return p;
}

Vector sized_or_zero(const Vector& v, int size, const std::string& what) {
  if (v.size() == 0) return Vector::Zero(size);
  if (v.size() != size) {
    throw ConfigError(what + " has " + std::to_string(v.size()) + " entries, expected " +
                      std::to_string(size));
  }
  return v;
}

Box required_box(const Vector& lower, const Vector& upper, int dim, const std::string& what) {
  if (lower.size() == 0 && upper.size() == 0) {
    throw ConfigError("[verify] " + what + "_lower and " + what + "_upper are required");
  }
  if (lower.size() != dim) {
    throw ConfigError("[verify] " + what + " box has " + std::to_string(lower.size()) +
                      " entries, expected " + std::to_string(dim));
  }
  return Box{lower, upper};
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path.string());
  file << content;
}

fs::path prepare_dir(const std::string& dir) {
  const fs::path path(dir);
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
  return path;
}

std::string config_text(const RunConfig& c) {
  std::ostringstream s;
  write_config(c, s);
  return s.str();
}

class KeyValues {
 public:
  void add(const std::string& key, const std::string& value) {
    text_ += key + "=" + value + "\n";
  }
  void add(const std::string& key, double value) { add(key, format_g12(value)); }
  void add(const std::string& key, long value) { add(key, std::to_string(value)); }
  void add(const std::string& key, int value) { add(key, std::to_string(value)); }
  void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

double peak_abs_control(const Trajectory& traj) {
  double peak = 0.0;
  for (const TrajectorySample& s : traj.samples) {
    if (s.control.size() > 0) peak = std::max(peak, s.control.cwiseAbs().maxCoeff());
  }
  return peak;
}

void write_plots(const fs::path& dir, const RunConfig& c, const Trajectory& traj,
                 const FinslerMetric& metric, const Vector& target) {
  std::vector<double> t;
  for (const TrajectorySample& s : traj.samples) t.push_back(s.t);

  std::vector<Series> states;
  for (int i = 0; i < traj.state_dim; ++i) {
    Series x{"x" + std::to_string(i + 1), kPalette[i % 5], t, {}};
    for (const TrajectorySample& s : traj.samples) x.y.push_back(s.state(i));
    states.push_back(std::move(x));
    states.push_back(Series{"x*" + std::to_string(i + 1), kPalette[i % 5], t,
                            std::vector<double>(t.size(), target(i)), true});
  }
  std::ofstream state_svg(dir / "state.svg", std::ios::binary);
  write_line_plot(state_svg, "State vs time (" + c.system + ", " + c.metric + ")", "t",
                  "x", states);

  std::vector<Series> controls;
  for (int i = 0; i < traj.input_dim; ++i) {
    Series u{"u" + std::to_string(i + 1), kPalette[i % 5], t, {}};
    for (const TrajectorySample& s : traj.samples) u.y.push_back(s.control(i));
    controls.push_back(std::move(u));
  }
  std::ofstream control_svg(dir / "control.svg", std::ios::binary);
  write_line_plot(control_svg, "Control vs time", "t", "u", controls);

  std::vector<Series> energy;
  Series e{"energy", kPalette[0], t, {}};
  for (const TrajectorySample& s : traj.samples) e.y.push_back(s.energy);
  energy.push_back(e);
  if (c.rate_kind == "linear" && !traj.empty()) {
    const double e0 = traj.samples.front().energy;
    const double rate = c.lambda / metric.p();
    Series envelope{"E(0) exp(-lambda t / p)", kPalette[1], t, {}, true};
    for (double ti : t) envelope.y.push_back(e0 * std::exp(-rate * ti));
    energy.push_back(std::move(envelope));
  }
  std::ofstream energy_svg(dir / "energy.svg", std::ios::binary);
  write_line_plot(energy_svg, "Path energy vs time", "t", "energy", energy);
}

}  // namespace

int cmd_simulate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Problem p = load_problem(c);
  const int n = p.sys.state_dim();
  const int m = p.sys.input_dim();
  if (c.x0.size() == 0) throw ConfigError("[run] x0 is required");
  const Vector x0 = sized_or_zero(c.x0, n, "[run] x0");
  const Vector target_x = sized_or_zero(c.target_state, n, "[target] state");
  const Vector target_u = sized_or_zero(c.target_control, m, "[target] control");
  const TargetTrajectory target = TargetTrajectory::constant(target_x, target_u);
  const RateSpec rate = c.rate();

  RunOptions opts;
  opts.horizon = c.horizon;
  opts.dt = c.dt;
  opts.path_nodes = c.path_nodes;
  opts.variant = c.variant;
  opts.tol = c.tol;

  // Ratio guard over the box spanned by the initial path; logged only.
  RatioOptions guard;
  guard.state_box = Box{p.sys.domain().clamp(x0.cwiseMin(target_x)),
                        p.sys.domain().clamp(x0.cwiseMax(target_x))};
  guard.delta_min = c.delta_min;
  guard.delta_max = c.delta_max;
  guard.samples = c.verify_samples;
  guard.seed = c.seed;
  guard.cap = c.ratio_cap;
  const VerificationReport ratio = check_ratio_bound(p.sys, p.metric, guard);

  const Trajectory traj =
      c.mode == RunMode::kOpen
          ? open_loop_run(p.sys, p.metric, rate, target, x0, opts)
          : closed_loop_run(p.sys, p.metric, rate, target, x0,
                            SampleSchedule::uniform(0.0, c.period, c.horizon), c.policy, opts);

  const VerificationReport diss = dissipation_monitor(traj, rate, c.tol.diss_tol);
  std::optional<ConvergenceReport> conv;
  std::string conv_note = "skipped (rate is not linear)";
  if (rate.kind() == RateSpec::Kind::kLinear) {
    try {
      conv = convergence_report(traj, p.metric, rate);
    } catch (const InsufficientSamples& e) {
      conv_note = std::string("skipped: ") + e.what();
    }
  }
  const bool violated = traj.termination == Termination::kConditionViolated;
  const int code = violated || !diss.passed() ? kExitFailure : kExitOk;

  std::ostringstream report;
  report << "finsler-ccm simulate\n"
         << "system: " << c.system << "\nmetric: " << c.metric << " (p = " << num(p.metric.p())
         << ", c1 = " << num(p.metric.c1()) << ", c2 = " << num(p.metric.c2()) << ")\n"
         << "rate: " << c.rate_kind;
  if (c.rate_kind == "linear") report << " (lambda = " << num(c.lambda) << ")";
  report << "\nmode: " << mode_name(c.mode) << ", rho: " << variant_name(c.variant)
         << ", horizon: " << num(c.horizon) << ", dt: " << num(c.dt)
         << ", path nodes: " << c.path_nodes << "\n"
         << "x0: " << vec(x0) << "  target: " << vec(target_x) << " / " << vec(target_u)
         << "\n\n";
  report << "ratio guard on [" << vec(guard.state_box.lower) << ", "
         << vec(guard.state_box.upper) << "]: max ratio " << num(ratio.max_ratio)
         << (ratio.ratio_unbounded() ? " (exceeds cap " + num(c.ratio_cap) + ")" : "")
         << "\n";
  report << "termination: " << (violated ? "condition violated" : "completed") << "\n";
  if (!traj.diagnostic.empty()) report << "diagnostic: " << traj.diagnostic << "\n";
  if (!traj.empty()) {
    report << "recorded samples: " << traj.samples.size() << ", final t = "
           << num(traj.back().t) << "\nfinal state: " << vec(traj.back().state)
           << "\nfinal energy: " << num(traj.back().energy)
           << ", initial energy: " << num(traj.samples.front().energy)
           << "\npeak |u|: " << num(peak_abs_control(traj)) << "\n";
  }
  if (traj.regularity_lost) report << "note: path regularity lost during the run\n";
  if (traj.boundary_touched) report << "note: path nodes clamped to the state domain\n";
  report << "\ndissipation: " << verdict(diss.passed()) << " (" << diss.checked_samples
         << " node steps, " << diss.violations.size()
         << " violations, tolerance " << num(c.tol.diss_tol) << ")\n";
  for (std::size_t i = 0; i < diss.violations.size() && i < 5; ++i) {
    const Violation& v = diss.violations[i];
    report << "  t = " << num(v.t) << ", node " << v.node << ": dV/dt = " << num(v.lhs)
           << " > " << num(v.rhs) << "\n";
  }
  if (conv) {
    report << "convergence rate: fitted " << num(conv->fitted_rate) << " vs predicted "
           << num(conv->predicted_rate) << ": " << verdict(conv->rate_ok()) << "\n"
           << "overshoot: observed " << num(conv->overshoot_observed) << " vs bound "
           << num(conv->overshoot_bound) << ": " << verdict(conv->overshoot_ok()) << "\n"
           << "envelope ratio: " << num(conv->envelope_ratio) << "\n";
  } else {
    report << "convergence: " << conv_note << "\n";
  }
  int adopted = 0;
  for (const SampleEvent& e : traj.events) adopted += e.adopted ? 1 : 0;
  if (c.mode == RunMode::kClosed) {
    report << "closed loop: " << traj.events.size() << " sample instants, " << adopted
           << " shortened paths adopted\n";
  }

  KeyValues kv;
  kv.add("command", std::string("simulate"));
  kv.add("termination", std::string(violated ? "condition_violated" : "completed"));
  kv.add("samples", static_cast<long>(traj.samples.size()));
  if (!traj.empty()) {
    kv.add("final_t", traj.back().t);
    for (int i = 0; i < n; ++i) kv.add("final_x" + std::to_string(i + 1), traj.back().state(i));
    kv.add("initial_energy", traj.samples.front().energy);
    kv.add("final_energy", traj.back().energy);
    kv.add("peak_abs_u", peak_abs_control(traj));
  }
  kv.add("ratio_guard_max", ratio.max_ratio);
  kv.add("dissipation_checked", diss.checked_samples);
  kv.add("dissipation_violations", static_cast<long>(diss.violations.size()));
  kv.add("dissipation_pass", diss.passed());
  if (conv) {
    kv.add("fitted_rate", conv->fitted_rate);
    kv.add("predicted_rate", conv->predicted_rate);
    kv.add("overshoot_observed", conv->overshoot_observed);
    kv.add("overshoot_bound", conv->overshoot_bound);
    kv.add("envelope_ratio", conv->envelope_ratio);
    kv.add("rate_ok", conv->rate_ok());
    kv.add("overshoot_ok", conv->overshoot_ok());
  }
  kv.add("regularity_lost", traj.regularity_lost);
  kv.add("boundary_touched", traj.boundary_touched);
  if (c.mode == RunMode::kClosed) kv.add("adopted_paths", adopted);
  kv.add("exit_code", code);
  report << "\n# key=value\n" << kv.text();

  const fs::path dir = prepare_dir(c.out_dir);
  write_file(dir / "config.resolved.ini", config_text(c));
  std::ostringstream csv;
  write_trajectory_csv(traj, csv);
  write_file(dir / "trajectory.csv", csv.str());
  write_file(dir / "report.txt", report.str());
  write_plots(dir, c, traj, p.metric, target_x);

  out << report.str() << "output: " << dir.string() << "\n";
  if (violated) err << "error: " << traj.diagnostic << "\n";
  return code;
}

int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Problem p = load_problem(c);
  const int n = p.sys.state_dim();
  const int m = p.sys.input_dim();
  const Box state_box = required_box(c.state_lower, c.state_upper, n, "state");
  const Box control_box = required_box(c.control_lower, c.control_upper, m, "control");
  const RateSpec rate = c.rate();

  Th1Options th1_opts;
  th1_opts.state_box = state_box;
  th1_opts.control_box = control_box;
  th1_opts.samples = c.verify_samples;
  th1_opts.kernel_tol = c.kernel_tol;
  th1_opts.margin_eps = c.margin_eps;
  th1_opts.seed = c.seed;
  const VerificationReport th1 = check_th1(p.sys, p.metric, rate, th1_opts);

  RatioOptions ratio_opts;
  ratio_opts.state_box = state_box;
  ratio_opts.delta_min = c.delta_min;
  ratio_opts.delta_max = c.delta_max;
  ratio_opts.samples = c.verify_samples;
  ratio_opts.seed = c.seed;
  ratio_opts.cap = c.ratio_cap;
  const VerificationReport ratio = check_ratio_bound(p.sys, p.metric, ratio_opts);

  const bool ok = th1.passed() && ratio.passed();
  std::ostringstream report;
  report << "finsler-ccm verify\nsystem: " << c.system << "\nmetric: " << c.metric
         << "\nrate: " << c.rate_kind;
  if (c.rate_kind == "linear") report << " (lambda = " << num(c.lambda) << ")";
  report << "\nstate box: [" << vec(state_box.lower) << ", " << vec(state_box.upper)
         << "], control box: [" << vec(control_box.lower) << ", " << vec(control_box.upper)
         << "]\nseed: " << c.seed << "\n\n";
  report << "controllability implication: " << verdict(th1.passed()) << " ("
         << th1.checked_samples << " kernel points checked, " << th1.violations.size()
         << " violations)\n";
  for (const std::string& note : th1.notes) report << "  note: " << note << "\n";
  for (std::size_t i = 0; i < th1.violations.size() && i < 5; ++i) {
    const Violation& v = th1.violations[i];
    report << "  witness: x = " << vec(v.x) << ", u = " << vec(v.u) << ", delta = "
           << vec(v.delta) << ": lhs " << num(v.lhs) << " >= " << num(v.rhs) << "\n";
  }
  report << "ratio bound: " << verdict(ratio.passed()) << " (max ratio " << num(ratio.max_ratio)
         << ", cap " << num(c.ratio_cap) << ", " << ratio.checked_samples << " samples)\n";
  for (const Violation& v : ratio.violations) {
    report << "  witness: x = " << vec(v.x) << ", delta = " << vec(v.delta)
           << ": numerator " << num(v.lhs) << ", b = " << num(v.rhs) << "\n";
  }

  KeyValues kv;
  kv.add("command", std::string("verify"));
  kv.add("th1_pass", th1.passed());
  kv.add("th1_checked", th1.checked_samples);
  kv.add("th1_violations", static_cast<long>(th1.violations.size()));
  kv.add("ratio_pass", ratio.passed());
  kv.add("max_ratio", ratio.max_ratio);
  kv.add("ratio_unbounded", ratio.ratio_unbounded());
  kv.add("exit_code", ok ? kExitOk : kExitFailure);
  report << "\n# key=value\n" << kv.text();

  const fs::path dir = prepare_dir(c.out_dir);
  write_file(dir / "config.resolved.ini", config_text(c));
  write_file(dir / "report.txt", report.str());
  out << report.str() << "output: " << dir.string() << "\n";
  if (!ok) err << "verification failed\n";
  return ok ? kExitOk : kExitFailure;
}

int cmd_distance(const std::string& metric_name, const Vector& x1, const Vector& x2,
                 const DistanceOptions& opts, std::ostream& out, std::ostream&) {
  const FinslerMetric metric = load_metric(metric_name);
  if (x1.size() != metric.dim() || x2.size() != metric.dim()) {
    throw ConfigError("points must have dimension " + std::to_string(metric.dim()) +
                      " for metric '" + metric.name() + "'");
  }
  const DistanceResult forward = approx_distance(x1, x2, metric, opts);
  const DistanceResult backward = approx_distance(x2, x1, metric, opts);
  char line[160];
  out << "metric: " << metric.name() << "\n";
  std::snprintf(line, sizeof(line), "d(x1, x2) <= %.6f  (%d accepted iterations)\n",
                forward.upper_bound, forward.accepted_iters);
  out << line;
  std::snprintf(line, sizeof(line), "d(x2, x1) <= %.6f  (%d accepted iterations)\n",
                backward.upper_bound, backward.accepted_iters);
  out << line << "forward=" << format_g12(forward.upper_bound)
      << "\nbackward=" << format_g12(backward.upper_bound) << "\n";
  return kExitOk;
}

int cmd_axioms(const std::string& metric_name, const SampleSpec& spec, std::ostream& out,
               std::ostream& err) {
  const FinslerMetric metric = load_metric(metric_name);
  SampleSpec resolved = spec;
  if (resolved.box.dim() != metric.dim()) resolved.box = Box::unbounded(metric.dim());
  const AxiomReport report = check_finsler_axioms(metric, resolved);
  out << "metric: " << metric.name() << " (" << resolved.count << " samples, seed "
      << resolved.seed << ")\n";
  char line[160];
  for (const AxiomResult& r : report.results) {
    std::snprintf(line, sizeof(line), "%-14s %s  checked=%d  worst=%.6g\n", r.axiom.c_str(),
                  r.passed ? "PASS" : "FAIL", r.checked, r.worst);
    out << line;
    if (!r.passed) {
      out << "  witness: x = " << vec(r.x) << ", delta = " << vec(r.delta);
      if (r.delta2.size() > 0) out << ", delta2 = " << vec(r.delta2);
      out << "\n";
    }
    out << "  " << r.note << "\n";
  }
  out << "axioms=" << verdict(report.passed()) << "\n";
  if (!report.passed()) err << "axiom check failed for metric '" << metric.name() << "'\n";
  return report.passed() ? kExitOk : kExitFailure;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finsler control contraction metrics: simulation and verification"};
  app.name("finsler-ccm");
  app.require_subcommand(1);

  std::string config_path;
  std::string mode;
  std::string out_dir;
  long long seed = -1;

  auto* simulate = app.add_subcommand("simulate", "run a simulation from a config file");
  simulate->add_option("--config", config_path, "configuration file")->required();
  simulate->add_option("--mode", mode, "open or closed (overrides [run] mode)")
      ->check(CLI::IsMember({"open", "closed"}));
  simulate->add_option("--out", out_dir, "output directory (overrides [output] dir)");
  simulate->add_option("--seed", seed, "seed (overrides [output] seed)")
      ->check(CLI::NonNegativeNumber);

  auto* verify = app.add_subcommand("verify", "sampled verification of a system and metric");
  verify->add_option("--config", config_path, "configuration file")->required();
  verify->add_option("--out", out_dir, "output directory (overrides [output] dir)");
  verify->add_option("--seed", seed, "seed (overrides [output] seed)")
      ->check(CLI::NonNegativeNumber);

  std::string metric_name;
  std::string from_text;
  std::string to_text;
  DistanceOptions dist_opts;
  auto* distance = app.add_subcommand("distance", "distance upper bounds in both directions");
  distance->add_option("--metric", metric_name, "built-in metric name")->required();
  distance->add_option("--from", from_text, "first point, e.g. \"0,0\"")->required();
  distance->add_option("--to", to_text, "second point")->required();
  distance->add_option("--nodes", dist_opts.node_count, "path nodes")
      ->check(CLI::Range(2, 100000));
  distance->add_option("--iters", dist_opts.max_iters, "optimizer iteration budget")
      ->check(CLI::NonNegativeNumber);

  SampleSpec spec;
  int samples = 1000;
  auto* axioms = app.add_subcommand("axioms", "sampled Finsler axiom checks");
  axioms->add_option("--metric", metric_name, "built-in metric name")->required();
  axioms->add_option("--samples", samples, "sample count")->check(CLI::Range(1, 100000000));
  axioms->add_option("--seed", seed, "seed")->check(CLI::NonNegativeNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*simulate || *verify) {
      RunConfig config = load_config(config_path);
      if (!mode.empty()) config.mode = mode == "open" ? RunMode::kOpen : RunMode::kClosed;
      if (!out_dir.empty()) config.out_dir = out_dir;
      if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
      return *simulate ? cmd_simulate(config, out, err) : cmd_verify(config, out, err);
    }
    if (*distance) {
      return cmd_distance(metric_name, parse_vector(from_text), parse_vector(to_text),
                          dist_opts, out, err);
    }
    spec.count = samples;
    if (seed >= 0) spec.seed = static_cast<std::uint64_t>(seed);
    return cmd_axioms(metric_name, spec, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UnknownExample& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UnknownMetric& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DegeneratePath& e) {
    err << "DegeneratePath: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ShapeError& e) {
    err << "shape error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConditionViolated& e) {
    err << "ConditionViolated: " << e.what() << "\n";
    return kExitFailure;
  } catch (const NumericalBlowup& e) {
    err << "NumericalBlowup: " << e.what() << "\n";
    return kExitBlowup;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace finsler_ccm::cli
