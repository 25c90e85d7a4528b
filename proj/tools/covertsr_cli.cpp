// Experiment runner for the IRS-assisted covert symbiotic-radio toolkit:
// DEP analysis sweeps, phase-shift optimization sweeps, threshold solving,
// and the named reproduction presets.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "covertsr/detection.hpp"
#include "covertsr/experiment.hpp"

namespace {

using covertsr::experiment::ExperimentSpec;

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  long trials = 0;
  std::string mode;
  std::string wcsi;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config file");
  cmd->add_option("--out", opts.out_path, "output CSV path (default stdout)");
  cmd->add_option("--seed", opts.seed, "RNG seed")->each([&](const std::string&) {
    opts.seed_set = true;
  });
  cmd->add_option("--trials", opts.trials, "Monte Carlo trials per point");
  cmd->add_option("--mode", opts.mode, "psr|csr|both");
  cmd->add_option("--wcsi", opts.wcsi, "stat|none");
}

void apply_common(const CommonOpts& opts, ExperimentSpec& spec) {
  if (opts.seed_set) spec.seed = opts.seed;
  if (opts.trials > 0) spec.trials = opts.trials;
  if (!opts.out_path.empty()) spec.out_path = opts.out_path;
  if (!opts.mode.empty()) {
    if (opts.mode == "psr") spec.mode = covertsr::experiment::ModeSelect::psr;
    else if (opts.mode == "csr") spec.mode = covertsr::experiment::ModeSelect::csr;
    else if (opts.mode == "both") spec.mode = covertsr::experiment::ModeSelect::both;
    else throw CLI::ValidationError("--mode", "expected psr|csr|both");
  }
  if (!opts.wcsi.empty()) {
    if (opts.wcsi == "stat") spec.wcsi = covertsr::experiment::Wcsi::statistical;
    else if (opts.wcsi == "none") spec.wcsi = covertsr::experiment::Wcsi::none;
    else throw CLI::ValidationError("--wcsi", "expected stat|none");
  }
}

ExperimentSpec load_spec(const CommonOpts& opts) {
  ExperimentSpec spec;
  if (!opts.config_path.empty()) {
    spec = covertsr::experiment::parse_config_file(opts.config_path);
  }
  apply_common(opts, spec);
  return spec;
}

void write_table(const covertsr::experiment::Table& table,
                 const std::string& path) {
  if (path.empty()) {
    covertsr::experiment::emit_csv(table, std::cout);
  } else {
    covertsr::experiment::emit_csv(table, path);
    std::cerr << "wrote " << table.rows.size() << " rows to " << path << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"covert symbiotic-radio analysis and optimization toolkit"};
  app.require_subcommand(1);

  CommonOpts dep_opts, opt_opts, preset_opts;

  auto* dep = app.add_subcommand("dep", "closed-form vs Monte Carlo DEP sweep");
  add_common(dep, dep_opts);

  auto* opt = app.add_subcommand("optimize", "phase-shift optimization sweep");
  add_common(opt, opt_opts);

  auto* thr = app.add_subcommand("threshold", "warden threshold for given parameters");
  double thr_p_dbm = 25.0, thr_alpha = 0.2;
  std::string thr_config;
  thr->add_option("--config", thr_config, "experiment config file");
  thr->add_option("--p-dbm", thr_p_dbm, "transmit power in dBm");
  thr->add_option("--alpha", thr_alpha, "reflection coefficient");

  auto* pre = app.add_subcommand("preset", "run a named reproduction preset");
  std::string preset_name;
  pre->add_option("name", preset_name, "fig3..fig9")->required();
  add_common(pre, preset_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (dep->parsed()) {
      auto spec = load_spec(dep_opts);
      write_table(covertsr::experiment::run_dep_analysis(spec), spec.out_path);
    } else if (opt->parsed()) {
      auto spec = load_spec(opt_opts);
      write_table(covertsr::experiment::run_optimization(spec), spec.out_path);
    } else if (thr->parsed()) {
      covertsr::channel::SystemConfig cfg;
      if (!thr_config.empty()) {
        cfg = covertsr::experiment::parse_config_file(thr_config).scenario;
      }
      const double p = covertsr::channel::dbm_to_watt(thr_p_dbm);
      auto params = covertsr::detection::DetectionParams::from_config(
          cfg, 0.0, p, thr_alpha);
      const double tau = covertsr::detection::optimal_threshold_theorem1(
          p, thr_alpha, params.lambda, params.l1, params.l2, params.sigma2);
      params.tau = tau;
      const auto rep = covertsr::detection::avg_dep_closed_form(
          params, cfg.quadrature_order);
      std::printf("tau_w,%0.9g\n", tau);
      std::printf("tau_dbm,%0.9g\n", covertsr::channel::watt_to_dbm(tau));
      std::printf("xi,%0.9g\np_fa,%0.9g\np_md,%0.9g\n", rep.xi, rep.p_fa, rep.p_md);
    } else if (pre->parsed()) {
      auto spec = covertsr::experiment::preset(preset_name);
      apply_common(preset_opts, spec);
      const auto table = covertsr::experiment::preset_is_dep_analysis(preset_name)
                             ? covertsr::experiment::run_dep_analysis(spec)
                             : covertsr::experiment::run_optimization(spec);
      write_table(table, spec.out_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
