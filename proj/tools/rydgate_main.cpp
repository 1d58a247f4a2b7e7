/* Copyright 2026 The RydGate Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
//
// rydgate: gate design, simulation, sweeps, and pulse optimization for the
// asymmetric pi-2pi-pi Rydberg controlled-phase protocol. All quantities in
// V=1 units. Every command emits its effective configuration so a run is
// reproducible from the config file alone. Exit codes: 0 success,
// 2 precondition violation, 3 optimizer non-convergence.

#include <clocale>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rydgate/io.hpp"

namespace {

using namespace rydgate;

// Angles accept "pi" forms: "pi", "pi/2", "3pi/4", "0.75pi", or a number.
double parse_angle(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c)))
      s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  require(!s.empty(), "angle: empty string");
  auto to_double = [](const std::string& t) {
    size_t idx = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &idx);
    } catch (const std::exception&) {
      throw PreconditionError("angle: cannot parse number '" + t + "'");
    }
    require(idx == t.size(), "angle: trailing characters in '" + t + "'");
    return v;
  };
  const auto pos = s.find("pi");
  if (pos == std::string::npos) return to_double(s);
  const std::string pre = s.substr(0, pos);
  const std::string post = s.substr(pos + 2);
  double coeff = 1.0;
  if (pre == "-")
    coeff = -1.0;
  else if (!pre.empty())
    coeff = to_double(pre);
  double den = 1.0;
  if (!post.empty()) {
    require(post[0] == '/', "angle: expected '/denominator' after pi");
    den = to_double(post.substr(1));
    require(den != 0.0, "angle: zero denominator");
  }
  return coeff * kPi / den;
}

// Rabi ratios accept "inf".
double parse_ratio(const std::string& raw) {
  if (raw == "inf" || raw == "Inf" || raw == "INF" || raw == "infinity")
    return std::numeric_limits<double>::infinity();
  size_t idx = 0;
  double v = 0.0;
  try {
    v = std::stod(raw, &idx);
  } catch (const std::exception&) {
    throw PreconditionError("ratio: cannot parse '" + raw + "'");
  }
  require(idx == raw.size(), "ratio: trailing characters in '" + raw + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// Comma list of numbers ("inf" allowed), or "start:stop:count" linspace.
std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> out;
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    require(parts.size() == 3, "grid: expected start:stop:count");
    const double a = parse_ratio(parts[0]);
    const double b = parse_ratio(parts[1]);
    const int n = static_cast<int>(std::stod(parts[2]));
    require(n >= 2, "grid: count must be >= 2");
    for (int i = 0; i < n; ++i)
      out.push_back(a + (b - a) * i / (n - 1));
    return out;
  }
  for (const auto& tok : split(s, ','))
    if (!tok.empty()) out.push_back(parse_ratio(tok));
  require(!out.empty(), "grid: empty");
  return out;
}

std::vector<double> symmetric_scan_grid(double half_width, int points) {
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i)
    g[i] = -half_width + 2.0 * half_width * i / (points - 1);
  return g;
}

std::string out_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

struct GlobalOpts {
  std::uint64_t seed = 0;
  std::string out = ".";
  std::string config;
  int threads = 1;
};

// Values from --config fill any option the command line left untouched; the
// effective configuration is then emitted for reproducible reruns.
class ConfigSync {
 public:
  ConfigSync(CLI::App* cmd, const json& loaded) : cmd_(cmd), loaded_(loaded) {
    effective_["command"] = cmd->get_name();
  }

  template <typename T>
  void sync(const std::string& flag, const std::string& key, T& var) {
    if (cmd_->count(flag) == 0 && loaded_.contains(key))
      var = loaded_.at(key).get<T>();
    effective_[key] = var;
  }

  void store(const std::string& key, const json& value) {
    effective_[key] = value;
  }

  const json& effective() const { return effective_; }

 private:
  CLI::App* cmd_;
  json loaded_;
  json effective_ = json::object();
};

void emit_config(const GlobalOpts& g, const ConfigSync& cs) {
  json cfg = cs.effective();
  cfg["seed"] = g.seed;
  write_json_file(out_path(g.out, "config.json"), cfg);
}

// ---------------------------------------------------------------------------
// design

struct DesignArgs {
  std::string theta = "pi";
  double v = 1.0;
  std::string p = "1";
  int loops = 1;
  int n0 = 0;
  int nv = 0;
  double omega = 0.0;
  std::string branch = "+";
  double tau = 0.0;  // optional lifetime (V=1 units) for the error estimate
  double mhz = 0.0;  // optional V/2pi in MHz, display only
};

int run_design(const GlobalOpts& g, const DesignArgs& a, ConfigSync& cs) {
  GateDesign d;
  if (a.n0 > 0 || a.nv > 0) {
    require(a.n0 >= 1 && a.nv >= 1 && a.omega > 0.0,
            "design: two-loop mode needs --n0 >= 1, --nV >= 1, --omega > 0");
    require(a.branch == "+" || a.branch == "-",
            "design: --branch must be '+' or '-'");
    const DetuningBranches br =
        detuning_branches(a.n0, a.nv, a.omega, a.v);
    if (!br.valid) throw PreconditionError("design: " + br.status);
    const double delta =
        a.branch == "+" ? br.delta_plus : br.delta_minus;
    d = branch_design(a.n0, a.nv, delta, a.omega, a.v);
    d.branch = a.branch[0];
    d.p = parse_ratio(a.p);
  } else {
    d = design_phase_gate(parse_angle(a.theta), a.v, a.loops);
    d.p = parse_ratio(a.p);
    require(d.p >= 1.0, "design: p must be >= 1 (or inf)");
  }

  write_json_file(out_path(g.out, "design.json"), design_to_json(d));
  json seq;
  if (std::isinf(d.p)) {
    PulseSegment target{d.t_target, 0.0, d.omega, 0.0, d.delta};
    seq = json{{"units", "V=1"},
               {"note",
                "p=inf: control pulses are instantaneous pi maps; only the "
                "target segment is listed"},
               {"segments", json::array({segment_to_json(target)})}};
  } else {
    seq = sequence_to_json(design_sequence(d));
  }
  write_json_file(out_path(g.out, "sequence.json"), seq);
  emit_config(g, cs);

  const PhasePair ph =
      target_pulse_phases(d.omega, d.delta, d.V, d.t_target);
  const double theta_bell = wrap_angle(ph.phi - ph.phi_v);
  const double t_gate = design_gate_duration(d);
  std::cout << "phi = " << format_sci(ph.phi) << "\n";
  std::cout << "phi_V = " << format_sci(ph.phi_v) << "\n";
  std::cout << "theta = " << format_sci(theta_bell) << "\n";
  std::cout << "t_gate = " << format_sci(t_gate) << " (V=1 units)\n";
  const bool basic_cz = d.branch == '0' &&
                        std::abs(d.theta - kPi) < 1e-12 && d.loops == 1;
  if (basic_cz) {
    std::cout << "eps*V*tau = " << format_sci(scattering_error(d.p, 1.0, 1.0))
              << "\n";
    if (a.tau > 0.0)
      std::cout << "eps = " << format_sci(scattering_error(d.p, d.V, a.tau))
                << " at V*tau = " << format_sci(d.V * a.tau) << "\n";
  }
  if (a.mhz > 0.0) {
    // Display conversion: V/2pi = a.mhz MHz, so time unit is 1/(2pi mhz) us.
    std::cout << "display: V/2pi = " << a.mhz
              << " MHz, Omega/2pi = " << d.omega * a.mhz
              << " MHz, t_gate = " << t_gate / (2.0 * kPi * a.mhz) << " us\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// sweep-error

struct SweepArgs {
  std::string pgrid = "1,1.25,1.5,2,2.5,3,4,5,7,10,15,20,30,50,100,inf";
  double vtau = 1e5;
};

int run_sweep_error(const GlobalOpts& g, const SweepArgs& a, ConfigSync& cs) {
  const std::vector<double> ps = parse_grid(a.pgrid);
  require(a.vtau > 0.0, "sweep-error: --vtau must be positive");
  const double gamma = 1.0 / a.vtau;  // V = 1

  const auto rows = parallel_map<std::array<double, 3>>(
      static_cast<int>(ps.size()), g.threads, [&](int i) {
        const double p = ps[i];
        GateDesign d = design_cz(1.0, p);
        const Mat4 m = computational_block(simulate_design(d, gamma));
        const double sim =
            (1.0 - optimize_local_phases(m, cz_target()).fstar) * a.vtau;
        return std::array<double, 3>{scattering_error(p, 1.0, 1.0), sim,
                                     gate_duration(p, 1.0) / (2.0 * kPi)};
      });

  const double ddp = eps_ddp(1.0, 1.0);
  CsvBuilder csv(
      "p,eps_vtau_formula,eps_vtau_simulated,t_gate_v_over_2pi,"
      "eps_ddp_vtau,eps_mto_vtau");
  for (size_t i = 0; i < ps.size(); ++i) {
    csv.row(std::vector<std::string>{
        std::isinf(ps[i]) ? "inf" : format_sci(ps[i]),
        format_sci(rows[i][0]), format_sci(rows[i][1]),
        format_sci(rows[i][2]), format_sci(ddp), format_sci(1.33 * ddp)});
  }
  write_text_file(out_path(g.out, "sweep_error.csv"), csv.str());
  emit_config(g, cs);
  std::cout << "wrote sweep_error.csv (" << ps.size() << " rows)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// branches

struct BranchArgs {
  int n0 = 2;
  int nv = 1;
  double v = 1.0;
  std::string omega_grid = "0.02:1.0:50";
};

int run_branches(const GlobalOpts& g, const BranchArgs& a, ConfigSync& cs) {
  const std::vector<double> omegas = parse_grid(a.omega_grid);
  CsvBuilder csv(
      "omega_over_v,delta_plus_over_v,delta_minus_over_v,theta_plus,"
      "theta_minus,valid");
  for (double om : omegas) {
    const DetuningBranches br = detuning_branches(a.n0, a.nv, om, a.v);
    if (!br.valid) {
      csv.row(std::vector<std::string>{format_sci(om / a.v), "", "", "", "",
                                       "0"});
      continue;
    }
    const BranchPhases bp =
        branch_phases(a.n0, a.nv, br.delta_plus, om, a.v);
    const BranchPhases bm =
        branch_phases(a.n0, a.nv, br.delta_minus, om, a.v);
    csv.row(std::vector<std::string>{
        format_sci(om / a.v), format_sci(br.delta_plus / a.v),
        format_sci(br.delta_minus / a.v), format_sci(wrap_angle(bp.theta)),
        format_sci(wrap_angle(bm.theta)), "1"});
  }
  write_text_file(out_path(g.out, "branches.csv"), csv.str());
  emit_config(g, cs);
  std::cout << "wrote branches.csv (" << omegas.size() << " rows)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// optimize

struct OptimizeArgs {
  std::string mode;  // time | robust-rabi | robust-v
  double omega = std::sqrt(3.0) / 2.0;
  double v = 1.0;
  double duration = 0.0;
  double tmult = 0.0;
  double topt = 0.0;
  int segments = 0;  // 0 = mode default (64 time, 128 robust)
  int restarts = -1;
  int maxiter = 0;
  double target = 1e-8;
  double resolution = 1e-3;
  int modes = 8;
  double spread = 0.05;
  int scan_points = 41;
};

OptimizerConfig make_optimizer_config(const GlobalOpts& g,
                                      const OptimizeArgs& a, bool robust) {
  OptimizerConfig cfg = robust ? robust_defaults() : OptimizerConfig{};
  if (a.segments > 0) cfg.n_segments = a.segments;
  if (a.restarts >= 0) cfg.restarts = a.restarts;
  if (a.maxiter > 0) cfg.max_iter = a.maxiter;
  cfg.target = a.target;
  cfg.seed = g.seed;
  cfg.threads = g.threads;
  return cfg;
}

double resolve_duration(const GlobalOpts& g, const OptimizeArgs& a,
                        double* topt_out) {
  if (a.duration > 0.0) {
    if (topt_out) *topt_out = a.topt;
    return a.duration;
  }
  require(a.tmult > 0.0,
          "optimize: robust modes need --duration or --tmult");
  double topt = a.topt;
  if (topt <= 0.0) {
    const OptimizerConfig tc = make_optimizer_config(g, a, false);
    topt = time_optimal_search(a.omega, a.v, tc, a.resolution).duration;
    std::cout << "t_opt = " << format_sci(topt) << " (from search)\n";
  }
  if (topt_out) *topt_out = topt;
  return a.tmult * topt;
}

int run_optimize(const GlobalOpts& g, const OptimizeArgs& a, ConfigSync& cs) {
  require(a.scan_points >= 2, "optimize: --scan-points must be >= 2");
  PhaseWaveform w;
  std::vector<std::array<double, 3>> log;
  ScanParameter scan_param = ScanParameter::kRabi;
  if (a.mode == "time") {
    const OptimizerConfig cfg = make_optimizer_config(g, a, false);
    const TimeOptimalResult res =
        time_optimal_search(a.omega, a.v, cfg, a.resolution);
    w = res.waveform;
    log = res.log;
    std::cout << "duration = " << format_sci(res.duration)
              << " (omega*t = " << format_sci(res.duration * a.omega)
              << ", V*t/2pi = "
              << format_sci(res.duration * a.v / (2.0 * kPi)) << ")\n";
    std::cout << "objective = " << format_sci(res.objective) << "\n";
    std::cout << "best_init = " << res.best_init << "\n";
    cs.store("result_duration", res.duration);
  } else if (a.mode == "robust-rabi" || a.mode == "robust-v") {
    const bool rabi = a.mode == "robust-rabi";
    scan_param = rabi ? ScanParameter::kRabi : ScanParameter::kInteraction;
    double topt = 0.0;
    const double duration = resolve_duration(g, a, &topt);
    const OptimizerConfig cfg = make_optimizer_config(g, a, true);
    RobustSpec spec;
    spec.parameter = rabi ? RobustSpec::Parameter::kRabi
                          : RobustSpec::Parameter::kInteraction;
    spec.spread = a.spread;
    const RobustResult res =
        robust_optimize(a.omega, a.v, duration, spec, cfg, a.modes);
    w = res.waveform;
    log = res.log;
    std::cout << "duration = " << format_sci(duration) << "\n";
    std::cout << "objective = " << format_sci(res.objective) << "\n";
    std::cout << "dmax_over_omega = " << format_sci(res.dmax / a.omega)
              << "\n";
    std::cout << "best_init = " << res.best_init << "\n";
    cs.store("result_duration", duration);
  } else {
    throw PreconditionError(
        "optimize: --mode must be time, robust-rabi, or robust-v");
  }

  write_json_file(out_path(g.out, "waveform.json"), waveform_to_json(w));
  const auto curve = fidelity_scan(
      w, scan_param, symmetric_scan_grid(0.10, a.scan_points), 0.0,
      g.threads);
  write_text_file(out_path(g.out, "scan.csv"), scan_to_csv(curve));
  write_text_file(out_path(g.out, "log.csv"), log_to_csv(log));
  emit_config(g, cs);
  std::cout << "wrote waveform.json, scan.csv, log.csv\n";
  return 0;
}

// ---------------------------------------------------------------------------
// average-error

struct AverageArgs {
  std::string waveform;  // single-waveform mode
  std::string mode = "robust-rabi";
  std::string tmults = "1.25,1.5,2,2.5,3";
  double omega = std::sqrt(3.0) / 2.0;
  double v = 1.0;
  double topt = 0.0;
  double sigma = 0.02;
  double omega_over_gamma = 2.0 * kPi * 150.0;
  int nodes = 15;
  int segments = 0;
  int restarts = -1;
  int maxiter = 0;
  int modes = 8;
  double spread = 0.05;
  double resolution = 1e-3;
};

int run_average_error(const GlobalOpts& g, const AverageArgs& a,
                      ConfigSync& cs) {
  require(a.sigma > 0.0, "average-error: --sigma must be positive");
  require(a.omega_over_gamma > 0.0,
          "average-error: --omega-over-gamma must be positive");
  const NoiseModel noise{a.sigma};
  CsvBuilder csv("pulse,t_mult,duration,avg_err_nodecay,avg_err_decay,dmax");

  if (!a.waveform.empty()) {
    const PhaseWaveform w = waveform_from_json(read_json_file(a.waveform));
    const double gamma = w.omega / a.omega_over_gamma;
    const double tm = a.topt > 0.0 ? w.duration / a.topt : 0.0;
    csv.row(std::vector<std::string>{
        "file", a.topt > 0.0 ? format_sci(tm) : "",
        format_sci(w.duration),
        format_sci(weighted_average_error(w, noise, 0.0, a.nodes)),
        format_sci(weighted_average_error(w, noise, gamma, a.nodes)),
        format_sci(max_instantaneous_detuning(w))});
    write_text_file(out_path(g.out, "average_error.csv"), csv.str());
    emit_config(g, cs);
    std::cout << "wrote average_error.csv (1 row)\n";
    return 0;
  }

  const bool rabi = a.mode == "robust-rabi";
  require(rabi || a.mode == "robust-v",
          "average-error: --mode must be robust-rabi or robust-v");
  const double gamma = a.omega / a.omega_over_gamma;

  double topt = a.topt;
  if (topt <= 0.0) {
    OptimizeArgs oa;
    oa.omega = a.omega;
    oa.v = a.v;
    oa.resolution = a.resolution;
    const OptimizerConfig tc = make_optimizer_config(g, oa, false);
    topt = time_optimal_search(a.omega, a.v, tc, a.resolution).duration;
    std::cout << "t_opt = " << format_sci(topt) << " (from search)\n";
  }
  cs.store("topt_effective", topt);

  // Flat reference: the analytic pulse, duration 2pi/V.
  const PhaseWaveform flat = flat_waveform(a.omega, a.v, 2.0 * kPi / a.v);
  csv.row(std::vector<std::string>{
      "flat", format_sci(flat.duration / topt), format_sci(flat.duration),
      format_sci(weighted_average_error(flat, noise, 0.0, a.nodes)),
      format_sci(weighted_average_error(flat, noise, gamma, a.nodes)), ""});

  OptimizerConfig cfg = robust_defaults();
  if (a.segments > 0) cfg.n_segments = a.segments;
  if (a.restarts >= 0) cfg.restarts = a.restarts;
  if (a.maxiter > 0) cfg.max_iter = a.maxiter;
  cfg.seed = g.seed;
  cfg.threads = g.threads;
  RobustSpec spec;
  spec.parameter = rabi ? RobustSpec::Parameter::kRabi
                        : RobustSpec::Parameter::kInteraction;
  spec.spread = a.spread;

  for (double tm : parse_grid(a.tmults)) {
    require(tm > 0.0, "average-error: t multiples must be positive");
    const double duration = tm * topt;
    const RobustResult res =
        robust_optimize(a.omega, a.v, duration, spec, cfg, a.modes);
    csv.row(std::vector<std::string>{
        "robust", format_sci(tm), format_sci(duration),
        format_sci(weighted_average_error(res.waveform, noise, 0.0, a.nodes)),
        format_sci(
            weighted_average_error(res.waveform, noise, gamma, a.nodes)),
        format_sci(res.dmax)});
    char name[64];
    std::snprintf(name, sizeof(name), "waveform_robust_%g.json", tm);
    write_json_file(out_path(g.out, name),
                    waveform_to_json(res.waveform));
  }
  write_text_file(out_path(g.out, "average_error.csv"), csv.str());
  emit_config(g, cs);
  std::cout << "wrote average_error.csv\n";
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string sequence;
  std::string design;
  std::string waveform;
  double gamma = 0.0;
  std::string theta = "pi";
};

int run_simulate(const GlobalOpts& g, const SimulateArgs& a, ConfigSync& cs) {
  const int sources = (!a.sequence.empty()) + (!a.design.empty()) +
                      (!a.waveform.empty());
  require(sources == 1,
          "simulate: give exactly one of --sequence, --design, --waveform");
  const double theta = parse_angle(a.theta);
  Mat4 m;
  if (!a.sequence.empty()) {
    const PulseSequence seq =
        sequence_from_json(read_json_file(a.sequence));
    m = computational_block(
        propagate_sequence(seq, PhysicsParams{1.0, a.gamma}));
  } else if (!a.design.empty()) {
    const GateDesign d = design_from_json(read_json_file(a.design));
    m = computational_block(simulate_design(d, a.gamma));
  } else {
    const PhaseWaveform w = waveform_from_json(read_json_file(a.waveform));
    m = waveform_gate_block(w, w.omega, w.V, a.gamma);
  }
  const FidelityReport rep = fidelity_report(m, cphase_target(theta));
  write_json_file(out_path(g.out, "report.json"), report_to_json(rep));
  emit_config(g, cs);
  std::cout << "fstar = " << format_sci(rep.fstar) << "\n";
  std::cout << "infidelity = " << format_sci(1.0 - rep.fstar) << "\n";
  std::cout << "controlled_phase = "
            << format_sci(controlled_phase_of(m.diagonal())) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  CLI::App app{
      "rydgate: asymmetric pi-2pi-pi Rydberg controlled-phase gate designer "
      "and pulse optimizer (V=1 units)"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "RNG seed for optimizer restarts");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--config", g.config, "JSON run config (CLI flags win)");
  app.add_option("--threads", g.threads, "worker threads")
      ->check(CLI::PositiveNumber);

  DesignArgs da;
  CLI::App* design = app.add_subcommand(
      "design", "closed-form controlled-phase gate design");
  design->fallthrough();
  design->add_option("--theta", da.theta, "target phase (accepts pi forms)");
  design->add_option("--V", da.v, "interaction strength");
  design->add_option("--p", da.p, "control/target Rabi ratio (or inf)");
  design->add_option("--loops", da.loops, "target loop repetitions");
  design->add_option("--n0", da.n0, "loops with control in ground");
  design->add_option("--nV", da.nv, "loops with control in Rydberg");
  design->add_option("--omega", da.omega, "target Rabi rate (two-loop mode)");
  design->add_option("--branch", da.branch, "detuning branch: + or -");
  design->add_option("--tau", da.tau, "Rydberg lifetime for error estimate");
  design->add_option("--mhz", da.mhz, "V/2pi in MHz, display only");

  SweepArgs sa;
  CLI::App* sweep = app.add_subcommand(
      "sweep-error", "scattering-limited error and duration vs p");
  sweep->fallthrough();
  sweep->add_option("--pgrid", sa.pgrid, "p values (comma list, inf ok)");
  sweep->add_option("--vtau", sa.vtau, "V*tau for the simulated column");

  BranchArgs ba;
  CLI::App* branches = app.add_subcommand(
      "branches", "two-loop detuning branches and gate phases vs Omega");
  branches->fallthrough();
  branches->add_option("--n0", ba.n0, "loops with control in ground");
  branches->add_option("--nV", ba.nv, "loops with control in Rydberg");
  branches->add_option("--V", ba.v, "interaction strength");
  branches->add_option("--omega-grid", ba.omega_grid,
                       "comma list or start:stop:count");

  OptimizeArgs oa;
  CLI::App* optimize = app.add_subcommand(
      "optimize", "phase-waveform synthesis (GRAPE)");
  optimize->fallthrough();
  optimize->add_option("--mode", oa.mode, "time | robust-rabi | robust-v")
      ->required();
  optimize->add_option("--omega", oa.omega, "target Rabi rate");
  optimize->add_option("--V", oa.v, "interaction strength");
  optimize->add_option("--duration", oa.duration, "pulse duration");
  optimize->add_option("--tmult", oa.tmult, "duration as multiple of t_opt");
  optimize->add_option("--topt", oa.topt, "t_opt override for --tmult");
  optimize->add_option("--segments", oa.segments, "waveform segments");
  optimize->add_option("--restarts", oa.restarts, "random restarts");
  optimize->add_option("--maxiter", oa.maxiter, "max iterations per start");
  optimize->add_option("--target", oa.target, "target infidelity");
  optimize->add_option("--resolution", oa.resolution,
                       "relative duration resolution (time mode)");
  optimize->add_option("--modes", oa.modes, "cosine modes (robust modes)");
  optimize->add_option("--spread", oa.spread, "robust spread (fractional)");
  optimize->add_option("--scan-points", oa.scan_points, "scan grid points");

  AverageArgs aa;
  CLI::App* average = app.add_subcommand(
      "average-error", "noise-averaged error vs duration (or one waveform)");
  average->fallthrough();
  average->add_option("--waveform", aa.waveform, "evaluate this waveform");
  average->add_option("--mode", aa.mode, "robust-rabi | robust-v");
  average->add_option("--tmults", aa.tmults, "duration multiples of t_opt");
  average->add_option("--omega", aa.omega, "target Rabi rate");
  average->add_option("--V", aa.v, "interaction strength");
  average->add_option("--topt", aa.topt, "t_opt override");
  average->add_option("--sigma", aa.sigma, "fractional Rabi noise sigma");
  average->add_option("--omega-over-gamma", aa.omega_over_gamma,
                      "Omega/Gamma ratio for the decay column");
  average->add_option("--nodes", aa.nodes, "Gauss-Hermite nodes");
  average->add_option("--segments", aa.segments, "waveform segments");
  average->add_option("--restarts", aa.restarts, "random restarts");
  average->add_option("--maxiter", aa.maxiter, "max iterations per start");
  average->add_option("--modes", aa.modes, "cosine modes");
  average->add_option("--spread", aa.spread, "robust spread (fractional)");
  average->add_option("--resolution", aa.resolution,
                      "t_opt search resolution");

  SimulateArgs ma;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "propagate a sequence/design/waveform and report fidelity");
  simulate->fallthrough();
  simulate->add_option("--sequence", ma.sequence, "pulse sequence JSON");
  simulate->add_option("--design", ma.design, "gate design JSON");
  simulate->add_option("--waveform", ma.waveform, "phase waveform JSON");
  simulate->add_option("--gamma", ma.gamma, "Rydberg decay rate (V=1)");
  simulate->add_option("--theta", ma.theta, "target controlled phase");

  try {
    app.parse(argc, argv);

    json loaded = json::object();
    if (!g.config.empty()) loaded = read_json_file(g.config);
    if (app.count("--seed") == 0 && loaded.contains("seed"))
      g.seed = loaded.at("seed").get<std::uint64_t>();

    const auto sync_common = [&](CLI::App* cmd, ConfigSync& cs) {
      (void)cmd;
      cs.store("threads_hint", g.threads);
    };

    if (design->parsed()) {
      ConfigSync cs(design, loaded);
      cs.sync("--theta", "theta", da.theta);
      cs.sync("--V", "V", da.v);
      cs.sync("--p", "p", da.p);
      cs.sync("--loops", "loops", da.loops);
      cs.sync("--n0", "n0", da.n0);
      cs.sync("--nV", "nV", da.nv);
      cs.sync("--omega", "omega", da.omega);
      cs.sync("--branch", "branch", da.branch);
      cs.sync("--tau", "tau", da.tau);
      cs.sync("--mhz", "mhz", da.mhz);
      sync_common(design, cs);
      return run_design(g, da, cs);
    }
    if (sweep->parsed()) {
      ConfigSync cs(sweep, loaded);
      cs.sync("--pgrid", "pgrid", sa.pgrid);
      cs.sync("--vtau", "vtau", sa.vtau);
      sync_common(sweep, cs);
      return run_sweep_error(g, sa, cs);
    }
    if (branches->parsed()) {
      ConfigSync cs(branches, loaded);
      cs.sync("--n0", "n0", ba.n0);
      cs.sync("--nV", "nV", ba.nv);
      cs.sync("--V", "V", ba.v);
      cs.sync("--omega-grid", "omega_grid", ba.omega_grid);
      sync_common(branches, cs);
      return run_branches(g, ba, cs);
    }
    if (optimize->parsed()) {
      ConfigSync cs(optimize, loaded);
      cs.sync("--mode", "mode", oa.mode);
      cs.sync("--omega", "omega", oa.omega);
      cs.sync("--V", "V", oa.v);
      cs.sync("--duration", "duration", oa.duration);
      cs.sync("--tmult", "tmult", oa.tmult);
      cs.sync("--topt", "topt", oa.topt);
      cs.sync("--segments", "segments", oa.segments);
      cs.sync("--restarts", "restarts", oa.restarts);
      cs.sync("--maxiter", "maxiter", oa.maxiter);
      cs.sync("--target", "target", oa.target);
      cs.sync("--resolution", "resolution", oa.resolution);
      cs.sync("--modes", "modes", oa.modes);
      cs.sync("--spread", "spread", oa.spread);
      cs.sync("--scan-points", "scan_points", oa.scan_points);
      sync_common(optimize, cs);
      return run_optimize(g, oa, cs);
    }
    if (average->parsed()) {
      ConfigSync cs(average, loaded);
      cs.sync("--waveform", "waveform", aa.waveform);
      cs.sync("--mode", "mode", aa.mode);
      cs.sync("--tmults", "tmults", aa.tmults);
      cs.sync("--omega", "omega", aa.omega);
      cs.sync("--V", "V", aa.v);
      cs.sync("--topt", "topt", aa.topt);
      cs.sync("--sigma", "sigma", aa.sigma);
      cs.sync("--omega-over-gamma", "omega_over_gamma", aa.omega_over_gamma);
      cs.sync("--nodes", "nodes", aa.nodes);
      cs.sync("--segments", "segments", aa.segments);
      cs.sync("--restarts", "restarts", aa.restarts);
      cs.sync("--maxiter", "maxiter", aa.maxiter);
      cs.sync("--modes", "modes", aa.modes);
      cs.sync("--spread", "spread", aa.spread);
      cs.sync("--resolution", "resolution", aa.resolution);
      sync_common(average, cs);
      return run_average_error(g, aa, cs);
    }
    if (simulate->parsed()) {
      ConfigSync cs(simulate, loaded);
      cs.sync("--sequence", "sequence", ma.sequence);
      cs.sync("--design", "design", ma.design);
      cs.sync("--waveform", "waveform", ma.waveform);
      cs.sync("--gamma", "gamma", ma.gamma);
      cs.sync("--theta", "theta", ma.theta);
      sync_common(simulate, cs);
      return run_simulate(g, ma, cs);
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const rydgate::PreconditionError& e) {
    std::cerr << "precondition violation: " << e.what() << "\n";
    return 2;
  } catch (const rydgate::NonConvergenceError& e) {
    std::cerr << "optimizer did not converge: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
