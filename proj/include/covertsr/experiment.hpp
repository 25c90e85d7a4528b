#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "covertsr/channel.hpp"
#include "covertsr/rates.hpp"

namespace covertsr::experiment {

enum class Wcsi { statistical, none };
enum class ModeSelect { psr, csr, both };

/// One experiment: a scenario, exactly one swept parameter, and the
/// Monte Carlo / output controls.
struct ExperimentSpec {
  channel::SystemConfig scenario;
  std::string sweep_name = "p_max_dbm";
  std::vector<double> sweep_values;
  ModeSelect mode = ModeSelect::both;
  Wcsi wcsi = Wcsi::statistical;
  long trials = 100000;
  std::uint64_t seed = 1;
  std::string out_path;
  double alpha = 0.2;         // reflection coefficient for DEP analysis runs
  double fixed_tau_w = 0.0;   // non-WCSI threshold; 0 derives one from the
                              // first sweep point and keeps it fixed
  int random_baseline_draws = 100;

  void validate() const;
};

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Closed-form vs Monte Carlo DEP across the sweep, with the warden
/// threshold column (optimal per point under statistical WCSI, fixed
/// otherwise).
Table run_dep_analysis(const ExperimentSpec& spec);

/// Phase-shift optimization across the sweep, one row per (value, mode),
/// with a best-of-N random-phase baseline column. Infeasible instances are
/// flagged rows, not errors.
Table run_optimization(const ExperimentSpec& spec);

/// Comma-separated output: header row, then data rows; floating point at
/// 9 significant digits, deterministic column order.
void emit_csv(const Table& table, std::ostream& os);
void emit_csv(const Table& table, const std::string& path);

/// Parse the key = value experiment format (README documents the schema).
/// Throws std::runtime_error with a line diagnostic on malformed input.
ExperimentSpec parse_config(std::istream& is, const std::string& origin);
ExperimentSpec parse_config_file(const std::string& path);

/// Named reproduction presets fig3..fig9 binding the published scenario.
ExperimentSpec preset(const std::string& name);
bool preset_is_dep_analysis(const std::string& name);

}  // namespace covertsr::experiment
