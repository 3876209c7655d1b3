// rpmsim: simulator, stability analysis and experiment harness front end.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 runtime failure.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "rpm/core/errors.hpp"
#include "rpm/experiments/experiments.hpp"
#include "rpm/sim/simulator.hpp"
#include "rpm/stability/report.hpp"

namespace {

using namespace rpm;

// Writes to `path`, or stdout for "-".
template <class Fn>
void emit(const std::string& path, Fn&& write) {
  if (path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open output file: " + path);
  write(os);
  if (!os) throw RuntimeError("write failed: " + path);
}

struct SimulateArgs {
  std::string config;
  std::string out = "-";
  std::string flows_out;
};

struct StabilityArgs {
  double c = 0;
  double d = 0;
  double ds = 0;
  std::string sweep;
  std::size_t samples = 9;
  double s_factor = 1.05;
  double eta_scale = 1.0;
  std::string out = "-";
};

struct ExperimentArgs {
  std::string kind;
  std::string mode = "rpm";
  double scale = 0.001;
  std::uint32_t reps = 10;
  int variant = 2;
  std::optional<double> duration_s;
  std::optional<std::uint64_t> buffer;
  unsigned threads = 0;
  std::string out = "-";
};

void run_simulate(const SimulateArgs& a) {
  const auto cfg = sim::load_scenario(a.config);
  const auto trace = sim::simulate(cfg);
  emit(a.out, [&](std::ostream& os) { sim::write_trace_csv(os, trace); });
  if (!a.flows_out.empty()) emit(a.flows_out, [&](std::ostream& os) { sim::write_flow_summary_csv(os, trace); });
}

void run_stability(const StabilityArgs& a) {
  stability::ReportOptions opt;
  opt.s_factor = a.s_factor;
  opt.eta_scale = a.eta_scale;
  emit(a.out, [&](std::ostream& os) {
    stability::write_stability_header(os);
    if (a.sweep.empty()) {
      const auto row = stability::stability_report(a.c, a.d, a.ds, opt);
      stability::write_stability_row(os, row);
      // The row already carries the message; the exit status still reports it.
      if (row.verdict == stability::Verdict::Error) throw ConfigError(row.error);
      return;
    }
    if (a.sweep != "ds") throw ConfigError("only --sweep ds is supported");
    for (const auto& r : stability::sweep_ds(a.c, a.d, a.samples, 0.1, 0.9, opt)) stability::write_stability_row(os, r);
  });
}

void run_experiment(const ExperimentArgs& a) {
  experiments::ExperimentConfig cfg;
  cfg.mode = sim::parse_aqm_mode(a.mode);
  cfg.scale = a.scale;
  cfg.reps = a.reps;
  cfg.fairness_variant = a.variant;
  cfg.threads = a.threads;
  cfg.buffer_bytes = a.buffer;
  if (a.duration_s) cfg.duration = SimTime::from_seconds(*a.duration_s);
  if (a.kind == "fairness") {
    cfg.kind = experiments::ExperimentKind::Fairness;
    const auto r = experiments::run_fairness(cfg);
    emit(a.out, [&](std::ostream& os) { experiments::write_fairness_csv(os, r); });
  } else if (a.kind == "fct") {
    cfg.kind = experiments::ExperimentKind::Fct;
    const auto r = experiments::run_fct(cfg);
    emit(a.out, [&](std::ostream& os) { experiments::write_fct_csv(os, r); });
  } else if (a.kind == "reaction") {
    cfg.kind = experiments::ExperimentKind::Reaction;
    const auto r = experiments::run_reaction(cfg);
    emit(a.out, [&](std::ostream& os) { experiments::write_reaction_csv(os, r); });
  } else {
    throw ConfigError("unknown experiment: " + a.kind);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RPM simulator and stability toolkit"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "run a JSON scenario and write the event trace as CSV");
  sim_cmd->add_option("config", sim_args.config, "scenario file")->required();
  sim_cmd->add_option("--out", sim_args.out, "trace CSV (- for stdout)");
  sim_cmd->add_option("--flows", sim_args.flows_out, "per-flow summary CSV");

  StabilityArgs st;
  auto* st_cmd = app.add_subcommand("stability", "fluid-model stability report");
  st_cmd->add_option("--c", st.c, "capacity, packets/s")->required();
  st_cmd->add_option("--d", st.d, "loop delay d, s")->required();
  auto* ds_opt = st_cmd->add_option("--ds", st.ds, "short loop delay d_s, s");
  st_cmd->add_option("--sweep", st.sweep, "sweep variable (ds: d_s over [0.1d, 0.9d])");
  st_cmd->add_option("--samples", st.samples, "sweep sample count");
  st_cmd->add_option("--s-factor", st.s_factor, "s = factor * s*");
  st_cmd->add_option("--eta-scale", st.eta_scale, "multiplier applied to eta before the root scan");
  st_cmd->add_option("--out", st.out, "CSV output (- for stdout)");

  ExperimentArgs ex;
  auto* ex_cmd = app.add_subcommand("experiment", "repeated dumbbell experiments");
  ex_cmd->add_option("kind", ex.kind, "fairness | fct | reaction")
      ->required()
      ->check(CLI::IsMember({"fairness", "fct", "reaction"}));
  ex_cmd->add_option("--mode", ex.mode, "fwd | rpm | rpm-port")->check(CLI::IsMember({"fwd", "rpm", "rpm-port"}));
  ex_cmd->add_option("--scale", ex.scale, "capacity scale relative to 10/100 Gbps");
  ex_cmd->add_option("--reps", ex.reps, "repetitions (seeds 1..n)");
  ex_cmd->add_option("--exp", ex.variant, "receiver delay row for fairness and reaction (1-3)");
  ex_cmd->add_option("--duration", ex.duration_s, "run length, s");
  ex_cmd->add_option("--buffer", ex.buffer, "switch buffer, bytes");
  ex_cmd->add_option("--threads", ex.threads, "parallel repetitions (0: all cores)");
  ex_cmd->add_option("--out", ex.out, "CSV output (- for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*sim_cmd) run_simulate(sim_args);
    if (*st_cmd) {
      if (st.sweep.empty() && !*ds_opt) throw ConfigError("--ds is required without --sweep");
      run_stability(st);
    }
    if (*ex_cmd) run_experiment(ex);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
