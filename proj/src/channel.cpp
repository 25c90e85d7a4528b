#include "covertsr/channel.hpp"

#include <cmath>

namespace covertsr::channel {

double path_loss_db(double d_meters, const PathLossModel& model) {
  if (!(d_meters > 0.0)) throw std::domain_error("path_loss: requires d > 0");
  return model.intercept_db + model.slope_db_per_decade * std::log10(d_meters) -
         model.gain_tx_dbi - model.gain_rx_dbi;
}

double path_loss_linear(double d_meters, const PathLossModel& model) {
  return std::pow(10.0, path_loss_db(d_meters, model) / 10.0);
}

void SystemConfig::validate() const {
  if (irs_elements < 1) throw std::invalid_argument("config: M >= 1 required");
  if (!(noise_power_w > 0.0)) throw std::invalid_argument("config: sigma0^2 > 0");
  if (!(p_max_w > 0.0)) throw std::invalid_argument("config: p_max > 0");
  if (symbol_ratio < 1) throw std::invalid_argument("config: eta >= 1");
  if (rician_factor < 0.0) throw std::invalid_argument("config: B >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("config: delta > 0");
  if (quadrature_order < 1) throw std::invalid_argument("config: Q >= 1");
  if (!(lipschitz > 0.0)) throw std::invalid_argument("config: L > 0");
  if (eps_sic < 0.0 || eps_c < 0.0) throw std::invalid_argument("config: rates >= 0");
  // derived distances must be positive (nodes may not sit on the IRS)
  for (double d : {dist_source_irs(), dist_backscatter_irs(),
                   dist_receiver_irs(), dist_warden_irs()}) {
    if (!(d > 0.0)) throw std::invalid_argument("config: node on top of IRS");
  }
}

namespace {
VectorXcd sample_vector(int m, double rician_b, numerics::RngStream& rng) {
  VectorXcd g(m);
  const double los_amp = std::sqrt(rician_b / (1.0 + rician_b));
  const double nlos_amp = std::sqrt(1.0 / (1.0 + rician_b));
  for (int i = 0; i < m; ++i) {
    const double phi = 2.0 * M_PI * rng.uniform();
    const std::complex<double> los{std::cos(phi), std::sin(phi)};
    g[i] = los_amp * los + nlos_amp * rng.cgaussian();
  }
  return g;
}
}  // namespace

ChannelRealization sample_channels(const SystemConfig& config,
                                   numerics::RngStream& rng) {
  ChannelRealization ch;
  const int m = config.irs_elements;
  const double b = config.rician_factor;
  ch.g_s = sample_vector(m, b, rng);
  ch.g_b = sample_vector(m, b, rng);
  ch.g_r = sample_vector(m, b, rng);
  ch.g_w = sample_vector(m, b, rng);
  ch.d_s = config.dist_source_irs();
  ch.d_b = config.dist_backscatter_irs();
  ch.d_r = config.dist_receiver_irs();
  ch.d_w = config.dist_warden_irs();
  return ch;
}

VectorXcd PhaseProfile::unit_vector() const {
  VectorXcd v(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    v[i] = std::complex<double>{std::cos(theta[i]), std::sin(theta[i])};
  }
  return v;
}

PhaseProfile PhaseProfile::zeros(int m) {
  PhaseProfile p;
  p.theta = VectorXd::Zero(m);
  return p;
}

PhaseProfile PhaseProfile::random(int m, numerics::RngStream& rng) {
  PhaseProfile p;
  p.theta.resize(m);
  for (int i = 0; i < m; ++i) p.theta[i] = 2.0 * M_PI * rng.uniform();
  return p;
}

PhaseProfile PhaseProfile::from_unit_vector(const VectorXcd& v) {
  PhaseProfile p;
  p.theta.resize(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double a = std::arg(v[i]);
    if (a < 0.0) a += 2.0 * M_PI;
    p.theta[i] = a;
  }
  return p;
}

std::complex<double> cascade_gain(const VectorXcd& g_i, const VectorXcd& g_j,
                                  const PhaseProfile& phase, double l_i,
                                  double l_j) {
  if (g_i.size() != g_j.size() || g_i.size() != phase.theta.size()) {
    throw std::invalid_argument("cascade_gain: dimension mismatch");
  }
  if (!(l_i > 0.0) || !(l_j > 0.0)) {
    throw std::domain_error("cascade_gain: path losses must be positive");
  }
  std::complex<double> acc{0.0, 0.0};
  const VectorXcd v = phase.unit_vector();
  for (Eigen::Index m = 0; m < g_i.size(); ++m) {
    acc += std::conj(g_i[m]) * v[m] * g_j[m];
  }
  return acc / std::sqrt(l_i * l_j);
}

CascadeGains cascade_gains(const ChannelRealization& ch,
                           const PhaseProfile& phase,
                           const PathLossModel& model) {
  const double l_s = path_loss_linear(ch.d_s, model);
  const double l_b = path_loss_linear(ch.d_b, model);
  const double l_r = path_loss_linear(ch.d_r, model);
  const double l_w = path_loss_linear(ch.d_w, model);
  CascadeGains g;
  g.h_sr = cascade_gain(ch.g_s, ch.g_r, phase, l_s, l_r);
  g.h_sb = cascade_gain(ch.g_s, ch.g_b, phase, l_s, l_b);
  g.h_br = cascade_gain(ch.g_b, ch.g_r, phase, l_b, l_r);
  g.h_sw = cascade_gain(ch.g_s, ch.g_w, phase, l_s, l_w);
  g.h_bw = cascade_gain(ch.g_b, ch.g_w, phase, l_b, l_w);
  return g;
}

namespace {
MatrixXcd rank_one_lift(const VectorXcd& g_i, const VectorXcd& g_j) {
  // a_m = g_i_m * conj(g_j_m), so a^H v = g_i^H Theta g_j
  const VectorXcd a = g_i.array() * g_j.conjugate().array();
  return a * a.adjoint();
}

MatrixXcd pad_trailing_zero(const MatrixXcd& g) {
  const Eigen::Index m = g.rows();
  MatrixXcd q = MatrixXcd::Zero(m + 1, m + 1);
  q.topLeftCorner(m, m) = g;
  return q;
}

LiftedMatrices lift_from_vectors(const VectorXcd& g_s, const VectorXcd& g_b,
                                 const VectorXcd& g_r) {
  LiftedMatrices lm;
  lm.g_sb = rank_one_lift(g_s, g_b);
  lm.g_br = rank_one_lift(g_b, g_r);
  lm.g_sr = rank_one_lift(g_s, g_r);
  lm.q_sb = pad_trailing_zero(lm.g_sb);
  lm.q_br = pad_trailing_zero(lm.g_br);
  lm.q_sr = pad_trailing_zero(lm.g_sr);
  return lm;
}
}  // namespace

LiftedMatrices build_lifted(const ChannelRealization& ch) {
  return lift_from_vectors(ch.g_s, ch.g_b, ch.g_r);
}

LiftedMatrices build_lifted_scaled(const ChannelRealization& ch,
                                   const PathLossModel& model) {
  const double l_s = path_loss_linear(ch.d_s, model);
  const double l_b = path_loss_linear(ch.d_b, model);
  const double l_r = path_loss_linear(ch.d_r, model);
  return lift_from_vectors(ch.g_s / std::sqrt(l_s), ch.g_b / std::sqrt(l_b),
                           ch.g_r / std::sqrt(l_r));
}

MatrixXcd lift_phase_vector(const VectorXcd& v) {
  const Eigen::Index m = v.size();
  VectorXcd ext(m + 1);
  ext.head(m) = v;
  ext[m] = std::complex<double>{1.0, 0.0};
  return ext * ext.adjoint();
}

}  // namespace covertsr::channel
