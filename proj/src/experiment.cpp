#include "covertsr/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "covertsr/detection.hpp"
#include "covertsr/optimizer.hpp"
#include "covertsr/strategy.hpp"

namespace covertsr::experiment {

using channel::SystemConfig;
using channel::dbm_to_watt;
using channel::watt_to_dbm;
using numerics::RngStream;

namespace {

const char* const kSweepNames[] = {"p_max_dbm", "alpha", "m", "eps_sic",
                                   "eps_c", "eta"};

bool known_sweep(const std::string& name) {
  for (const char* s : kSweepNames) {
    if (name == s) return true;
  }
  return false;
}

// applies one sweep value to a (config, alpha) pair
void apply_sweep(const std::string& name, double value, SystemConfig& cfg,
                 double& alpha) {
  if (name == "p_max_dbm") {
    cfg.p_max_w = dbm_to_watt(value);
  } else if (name == "alpha") {
    alpha = value;
  } else if (name == "m") {
    cfg.irs_elements = static_cast<int>(std::lround(value));
  } else if (name == "eps_sic") {
    cfg.eps_sic = value;
  } else if (name == "eps_c") {
    cfg.eps_c = value;
  } else if (name == "eta") {
    cfg.symbol_ratio = static_cast<int>(std::lround(value));
  } else {
    throw std::runtime_error("unknown sweep parameter: " + name);
  }
}

// stream-id bases keeping every randomized stage on its own sub-stream space
constexpr std::uint64_t kStreamDepMc = 1ULL << 24;
constexpr std::uint64_t kStreamChannels = 1ULL << 44;
constexpr std::uint64_t kStreamInit = 1ULL << 45;
constexpr std::uint64_t kStreamBaseline = 1ULL << 46;

}  // namespace

void ExperimentSpec::validate() const {
  scenario.validate();
  if (sweep_values.empty()) throw std::invalid_argument("experiment: empty sweep");
  if (!known_sweep(sweep_name)) {
    throw std::invalid_argument("experiment: unknown sweep parameter " + sweep_name);
  }
  if (trials < 1) throw std::invalid_argument("experiment: trials >= 1");
}

Table run_dep_analysis(const ExperimentSpec& spec) {
  spec.validate();
  Table t;
  t.columns = {"sweep_param",  "sweep_value", "alpha",      "tau_w",
               "xi_closed",    "p_fa_closed", "p_md_closed", "xi_mc",
               "p_fa_mc",      "p_md_mc",     "abs_dev",     "trials"};

  double frozen_tau = spec.fixed_tau_w;
  for (std::size_t idx = 0; idx < spec.sweep_values.size(); ++idx) {
    const double value = spec.sweep_values[idx];
    SystemConfig cfg = spec.scenario;
    double alpha = spec.alpha;
    apply_sweep(spec.sweep_name, value, cfg, alpha);
    cfg.validate();

    const double p = cfg.p_max_w;
    detection::DetectionParams params =
        detection::DetectionParams::from_config(cfg, 0.0, p, alpha);
    double tau;
    if (spec.wcsi == Wcsi::statistical) {
      tau = detection::optimal_threshold_theorem1(p, alpha, params.lambda,
                                                  params.l1, params.l2,
                                                  params.sigma2);
    } else {
      if (frozen_tau <= 0.0) {
        frozen_tau = detection::optimal_threshold_theorem1(
            p, alpha, params.lambda, params.l1, params.l2, params.sigma2);
      }
      tau = frozen_tau;
    }
    params.tau = tau;

    const auto closed = detection::avg_dep_closed_form(params, cfg.quadrature_order);
    const auto mc = detection::avg_dep_monte_carlo(
        cfg, p, alpha, tau, spec.trials,
        RngStream(spec.seed, kStreamDepMc * (idx + 1)));

    t.rows.push_back({spec.sweep_name, value, alpha, tau, closed.xi,
                      closed.p_fa, closed.p_md, mc.xi, mc.p_fa, mc.p_md,
                      std::fabs(closed.xi - mc.xi),
                      static_cast<long long>(spec.trials)});
  }
  return t;
}

namespace {

struct BaselineResult {
  double best_xi = 0.0;
  long long feasible_draws = 0;
};

// best-of-N random phase draws, alpha at the mode's feasible lower bound
BaselineResult random_baseline(const SystemConfig& cfg,
                               const channel::ChannelRealization& ch,
                               rates::Mode mode, int draws, RngStream rng) {
  BaselineResult out;
  const double p = cfg.p_max_w;
  const double sigma2 = cfg.noise_power_w;
  detection::DetectionParams params =
      detection::DetectionParams::from_config(cfg, 0.0, p, 1.0);
  for (int i = 0; i < draws; ++i) {
    const auto phase = channel::PhaseProfile::random(cfg.irs_elements, rng);
    const auto gains = channel::cascade_gains(ch, phase, cfg.path_loss);
    double alpha = 0.0;
    bool ok = false;
    if (mode == rates::Mode::psr) {
      const auto region =
          strategy::alpha_region_psr(p, gains, sigma2, cfg.gamma_c(), cfg.gamma_sic());
      ok = region.feasible;
      alpha = region.chosen();
    } else {
      const auto regime = strategy::snr_regime(p, gains.h_sr, sigma2, cfg.gamma_sic());
      const auto bound =
          strategy::alpha_lower_csr(p, gains, sigma2, cfg.gamma_sic(),
                                    cfg.symbol_ratio, cfg.eps_c, regime);
      ok = bound.feasible;
      alpha = bound.value;
    }
    if (!ok) continue;
    ++out.feasible_draws;
    try {
      const double tau = detection::optimal_threshold_theorem1(
          p, alpha, params.lambda, params.l1, params.l2, sigma2);
      params.tau = tau;
      params.alpha = alpha;
      const auto rep = detection::avg_dep_closed_form(params, cfg.quadrature_order);
      out.best_xi = std::max(out.best_xi, rep.xi);
    } catch (const std::exception&) {
      // threshold solver can reject degenerate draws; skip them
    }
  }
  return out;
}

const char* mode_name(rates::Mode m) {
  return m == rates::Mode::psr ? "psr" : "csr";
}

}  // namespace

Table run_optimization(const ExperimentSpec& spec) {
  spec.validate();
  Table t;
  t.columns = {"sweep_param", "sweep_value", "mode",       "regime",
               "feasible",    "xi_opt",      "alpha",      "p_dbm",
               "iterations",  "converged",   "gamma_final", "xi_random_best",
               "baseline_feasible_draws"};

  std::vector<rates::Mode> modes;
  if (spec.mode != ModeSelect::csr) modes.push_back(rates::Mode::psr);
  if (spec.mode != ModeSelect::psr) modes.push_back(rates::Mode::csr);

  for (std::size_t idx = 0; idx < spec.sweep_values.size(); ++idx) {
    const double value = spec.sweep_values[idx];
    SystemConfig cfg = spec.scenario;
    double alpha_unused = spec.alpha;
    apply_sweep(spec.sweep_name, value, cfg, alpha_unused);
    cfg.validate();

    RngStream ch_rng(spec.seed, kStreamChannels + idx);
    const auto ch = channel::sample_channels(cfg, ch_rng);

    for (std::size_t mi = 0; mi < modes.size(); ++mi) {
      const rates::Mode mode = modes[mi];
      RngStream init_rng(spec.seed, kStreamInit + 4 * idx + mi);
      optimizer::OptimResult result =
          mode == rates::Mode::psr ? optimizer::optimize_psr(ch, cfg, init_rng)
                                   : optimizer::optimize_csr(ch, cfg, init_rng);
      const BaselineResult base = random_baseline(
          cfg, ch, mode, spec.random_baseline_draws,
          RngStream(spec.seed, kStreamBaseline + 4 * idx + mi));

      t.rows.push_back(
          {spec.sweep_name, value, std::string(mode_name(mode)),
           std::string(result.regime == strategy::SnrRegime::high ? "high" : "low"),
           static_cast<long long>(result.feasible ? 1 : 0),
           result.feasible ? result.dep.xi : 0.0,
           result.feasible ? result.alpha : 0.0, watt_to_dbm(result.p),
           static_cast<long long>(result.iterations),
           static_cast<long long>(result.converged ? 1 : 0), result.gamma_final,
           base.best_xi, base.feasible_draws});
    }
  }
  return t;
}

namespace {
std::string format_cell(const Cell& cell) {
  if (std::holds_alternative<std::string>(cell)) return std::get<std::string>(cell);
  if (std::holds_alternative<long long>(cell)) {
    return std::to_string(std::get<long long>(cell));
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", std::get<double>(cell));
  return buf;
}
}  // namespace

void emit_csv(const Table& table, std::ostream& os) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) os << ',';
    os << table.columns[c];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ',';
      os << format_cell(row[c]);
    }
    os << '\n';
  }
}

void emit_csv(const Table& table, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("emit_csv: cannot open " + path);
  emit_csv(table, os);
  os.flush();
  if (!os) throw std::runtime_error("emit_csv: write failed for " + path);
}

namespace {

channel::Vec2 parse_vec2(const std::string& text, const std::string& where) {
  channel::Vec2 v;
  char comma = 0;
  std::istringstream ss(text);
  if (!(ss >> v.x >> comma >> v.y) || comma != ',') {
    throw std::runtime_error(where + ": expected \"x,y\", got \"" + text + "\"");
  }
  return v;
}

std::vector<double> parse_values(const std::string& text, const std::string& where) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw std::runtime_error(where + ": bad number \"" + item + "\"");
    }
  }
  return out;
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out;
  if (count == 1) {
    out.push_back(lo);
    return out;
  }
  for (int i = 0; i < count; ++i) {
    out.push_back(lo + (hi - lo) * i / (count - 1));
  }
  return out;
}

}  // namespace

ExperimentSpec parse_config(std::istream& is, const std::string& origin) {
  ExperimentSpec spec;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(line_no);
    if (eq == std::string::npos) {
      throw std::runtime_error(where + ": expected key = value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      auto& sc = spec.scenario;
      if (key == "m") sc.irs_elements = std::stoi(value);
      else if (key == "rician_b") sc.rician_factor = std::stod(value);
      else if (key == "sigma2_dbm") sc.noise_power_w = dbm_to_watt(std::stod(value));
      else if (key == "p_max_dbm") sc.p_max_w = dbm_to_watt(std::stod(value));
      else if (key == "eta") sc.symbol_ratio = std::stoi(value);
      else if (key == "eps_sic") sc.eps_sic = std::stod(value);
      else if (key == "eps_c") sc.eps_c = std::stod(value);
      else if (key == "q") sc.quadrature_order = std::stoi(value);
      else if (key == "lipschitz") sc.lipschitz = std::stod(value);
      else if (key == "tol") sc.tol = std::stod(value);
      else if (key == "pos_s") sc.pos_source = parse_vec2(value, where);
      else if (key == "pos_bd") sc.pos_backscatter = parse_vec2(value, where);
      else if (key == "pos_r") sc.pos_receiver = parse_vec2(value, where);
      else if (key == "pos_w") sc.pos_warden = parse_vec2(value, where);
      else if (key == "pos_irs") sc.pos_irs = parse_vec2(value, where);
      else if (key == "pl_intercept_db") sc.path_loss.intercept_db = std::stod(value);
      else if (key == "pl_slope_db") sc.path_loss.slope_db_per_decade = std::stod(value);
      else if (key == "gain_tx_dbi") sc.path_loss.gain_tx_dbi = std::stod(value);
      else if (key == "gain_rx_dbi") sc.path_loss.gain_rx_dbi = std::stod(value);
      else if (key == "alpha") spec.alpha = std::stod(value);
      else if (key == "trials") spec.trials = std::stol(value);
      else if (key == "seed") spec.seed = std::stoull(value);
      else if (key == "out") spec.out_path = value;
      else if (key == "fixed_tau_dbm") spec.fixed_tau_w = dbm_to_watt(std::stod(value));
      else if (key == "baseline_draws") spec.random_baseline_draws = std::stoi(value);
      else if (key == "mode") {
        if (value == "psr") spec.mode = ModeSelect::psr;
        else if (value == "csr") spec.mode = ModeSelect::csr;
        else if (value == "both") spec.mode = ModeSelect::both;
        else throw std::runtime_error("mode must be psr|csr|both");
      } else if (key == "wcsi") {
        if (value == "stat") spec.wcsi = Wcsi::statistical;
        else if (value == "none") spec.wcsi = Wcsi::none;
        else throw std::runtime_error("wcsi must be stat|none");
      } else if (key == "sweep") {
        spec.sweep_name = value;
      } else if (key == "sweep_values") {
        spec.sweep_values = parse_values(value, where);
      } else if (key == "sweep_range") {
        // start:stop:count inclusive
        double lo, hi;
        int count;
        char c1, c2;
        std::istringstream ss(value);
        if (!(ss >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':') {
          throw std::runtime_error("sweep_range must be start:stop:count");
        }
        spec.sweep_values = linspace(lo, hi, count);
      } else {
        throw std::runtime_error("unknown key \"" + key + "\"");
      }
    } catch (const std::runtime_error&) {
      throw;
    } catch (const std::exception& e) {
      throw std::runtime_error(where + ": " + e.what());
    }
  }
  return spec;
}

ExperimentSpec parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path);
  return parse_config(is, path);
}

bool preset_is_dep_analysis(const std::string& name) {
  return name == "fig3" || name == "fig9";
}

ExperimentSpec preset(const std::string& name) {
  ExperimentSpec spec;  // scenario defaults already match the published setup
  spec.out_path = name + ".csv";
  if (name == "fig3") {
    spec.scenario.irs_elements = 30;
    spec.alpha = 0.2;
    spec.sweep_name = "p_max_dbm";
    spec.sweep_values = linspace(0.0, 30.0, 31);
    spec.wcsi = Wcsi::statistical;
  } else if (name == "fig4") {
    spec.sweep_name = "m";
    spec.sweep_values = {10, 30};
    spec.mode = ModeSelect::both;
  } else if (name == "fig5") {
    spec.sweep_name = "p_max_dbm";
    spec.sweep_values = linspace(5.0, 30.0, 6);
    spec.mode = ModeSelect::both;
  } else if (name == "fig6") {
    spec.sweep_name = "eps_sic";
    spec.sweep_values = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
    spec.mode = ModeSelect::both;
  } else if (name == "fig7") {
    spec.sweep_name = "eps_c";
    spec.sweep_values = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5};
    spec.mode = ModeSelect::both;
  } else if (name == "fig8") {
    spec.sweep_name = "eta";
    spec.sweep_values = {1, 2, 4, 8, 16, 32};
    spec.mode = ModeSelect::csr;
  } else if (name == "fig9") {
    spec.sweep_name = "p_max_dbm";
    spec.sweep_values = linspace(0.0, 30.0, 31);
    spec.wcsi = Wcsi::none;
  } else {
    throw std::invalid_argument("unknown preset " + name +
                                " (expected fig3..fig9)");
  }
  return spec;
}

}  // namespace covertsr::experiment
