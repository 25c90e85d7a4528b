#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

#include "covertsr/numerics.hpp"

namespace covertsr::channel {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w * 1e3); }

/// Distance-power law in dB: intercept + slope*log10(d) - G_t - G_r.
struct PathLossModel {
  double intercept_db = 35.1;
  double slope_db_per_decade = 36.7;
  double gain_tx_dbi = 10.0;
  double gain_rx_dbi = 10.0;
};

double path_loss_db(double d_meters, const PathLossModel& model);
/// 10^(L_dB/10); throws std::domain_error for d <= 0.
double path_loss_linear(double d_meters, const PathLossModel& model);

/// Full scenario description. All powers in watts, rates in bits/s/Hz,
/// positions in meters on a 2-D plane.
struct SystemConfig {
  int irs_elements = 10;  // M
  Vec2 pos_source{0.0, 0.0};
  Vec2 pos_backscatter{20.0, 0.0};
  Vec2 pos_receiver{40.0, 0.0};
  Vec2 pos_warden{45.0, 0.0};
  Vec2 pos_irs{20.0, 25.0};
  double rician_factor = 3.0;     // B; 0 gives Rayleigh, ->inf pure LoS
  double noise_power_w = 1e-11;   // sigma0^2, -80 dBm
  double p_max_w = 0.31622776601683794;  // 25 dBm
  int symbol_ratio = 4;           // eta >= 1
  double eps_sic = 2.0;
  double eps_c = 0.5;
  int quadrature_order = 5;       // Q
  double lipschitz = 2.5e-3;
  double tol = 1e-3;              // delta, outer-loop convergence threshold
  PathLossModel path_loss{};

  double lambda() const { return 1.0 / irs_elements; }
  double gamma_c() const { return std::exp2(eps_c) - 1.0; }
  double gamma_sic() const { return std::exp2(eps_sic) - 1.0; }

  double dist_source_irs() const { return distance(pos_source, pos_irs); }
  double dist_backscatter_irs() const { return distance(pos_backscatter, pos_irs); }
  double dist_receiver_irs() const { return distance(pos_receiver, pos_irs); }
  double dist_warden_irs() const { return distance(pos_warden, pos_irs); }

  double loss_source() const { return path_loss_linear(dist_source_irs(), path_loss); }
  double loss_backscatter() const { return path_loss_linear(dist_backscatter_irs(), path_loss); }
  double loss_receiver() const { return path_loss_linear(dist_receiver_irs(), path_loss); }
  double loss_warden() const { return path_loss_linear(dist_warden_irs(), path_loss); }

  /// Throws std::invalid_argument when a field violates its range.
  void validate() const;
};

/// One coherence block: the four node-IRS channel vectors (unit second
/// moment per entry) and the node-IRS distances they were drawn for.
struct ChannelRealization {
  VectorXcd g_s, g_b, g_r, g_w;
  double d_s = 0, d_b = 0, d_r = 0, d_w = 0;
};

/// Rician composition sqrt(B/(1+B)) e^{j phi} + sqrt(1/(1+B)) CN(0,1),
/// phi uniform on [0, 2pi). B = 0 degenerates to Rayleigh.
ChannelRealization sample_channels(const SystemConfig& config,
                                   numerics::RngStream& rng);

struct PhaseProfile {
  VectorXd theta;  // each in [0, 2pi]

  int size() const { return static_cast<int>(theta.size()); }
  /// Unit-modulus vector e^{j theta_m}.
  VectorXcd unit_vector() const;

  static PhaseProfile zeros(int m);
  static PhaseProfile random(int m, numerics::RngStream& rng);
  static PhaseProfile from_unit_vector(const VectorXcd& v);
};

/// (sum_m conj(g_i_m) e^{j theta_m} g_j_m) / sqrt(l_i * l_j).
std::complex<double> cascade_gain(const VectorXcd& g_i, const VectorXcd& g_j,
                                  const PhaseProfile& phase, double l_i,
                                  double l_j);

/// The five path-loss-scaled cascade channels the formulas use.
struct CascadeGains {
  std::complex<double> h_sr, h_sb, h_br, h_sw, h_bw;
};

CascadeGains cascade_gains(const ChannelRealization& ch,
                           const PhaseProfile& phase,
                           const PathLossModel& model);

/// Rank-one lifted outer products G_ij = a a^H with a = diag(g_i) conj(g_j),
/// so that v^H G_ij v = |g_i^H Theta g_j|^2, plus their zero-padded
/// (M+1)-dimensional forms Q_ij used by the lifted programs.
struct LiftedMatrices {
  MatrixXcd g_sb, g_br, g_sr;  // M x M
  MatrixXcd q_sb, q_br, q_sr;  // (M+1) x (M+1), zero last row/column
};

LiftedMatrices build_lifted(const ChannelRealization& ch);
/// Same construction on path-loss-scaled vectors g_i / sqrt(L_i), so that
/// v^H G_ij v = |h_ij|^2 in physical units.
LiftedMatrices build_lifted_scaled(const ChannelRealization& ch,
                                   const PathLossModel& model);

/// [v; 1] [v; 1]^H.
MatrixXcd lift_phase_vector(const VectorXcd& v);

}  // namespace covertsr::channel
