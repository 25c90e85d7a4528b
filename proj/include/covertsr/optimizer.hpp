#pragma once

#include <string>
#include <vector>

#include "covertsr/detection.hpp"
#include "covertsr/sdp.hpp"
#include "covertsr/strategy.hpp"

namespace covertsr::optimizer {

using channel::ChannelRealization;
using channel::MatrixXcd;
using channel::SystemConfig;
using channel::VectorXcd;

/// Double-reflection gain product (v^H G_sb v)(v^H G_br v).
double gamma_obj(const VectorXcd& v, const MatrixXcd& g_sb,
                 const MatrixXcd& g_br);

/// Gradient 2 W v0 with W = G_sb v0 v0^H G_br + G_br v0 v0^H G_sb.
VectorXcd gamma_gradient(const VectorXcd& v0, const MatrixXcd& g_sb,
                         const MatrixXcd& g_br);

/// Quadratic minorant of gamma_obj anchored at v0:
///   gamma(v) >= gamma(v0) + Re{grad^H (v - v0)} - (L/2) ||v - v0||^2
/// packaged as (L/2) Tr(U V) + constant over lifted V = [v;1][v;1]^H.
/// The trace form is validated against the anchored expansion on random
/// unit-modulus samples at construction and rebuilt from the expansion when
/// the two disagree; max_discrepancy records the observed mismatch of the
/// discarded variant.
struct Surrogate {
  VectorXcd v0;
  MatrixXcd w_mat;
  MatrixXcd u;        // (M+1) x (M+1) Hermitian
  double constant = 0.0;
  double lipschitz = 0.0;
  double max_discrepancy = 0.0;

  /// (L/2) [v;1]^H U [v;1] + constant.
  double value(const VectorXcd& v) const;
  /// Anchored expansion evaluated directly.
  double lemma_value(const VectorXcd& v, const MatrixXcd& g_sb,
                     const MatrixXcd& g_br) const;
};

Surrogate build_surrogate(const VectorXcd& v0, const MatrixXcd& g_sb,
                          const MatrixXcd& g_br, double lipschitz);

/// First-order upper bound of chi(t) = sqrt(s2^2 (1+gsic) - 4 s2 p t) around
/// t = trace_anchor, evaluated at t = trace_val. Requires the anchor to stay
/// inside the low-SNR domain (positive radicand).
double taylor_chi_upper(double trace_val, double trace_anchor, double p_hat,
                        double sigma2, double gamma_sic);

struct IterationRow {
  int iteration = 0;
  double surrogate_value = 0.0;  // matrix-form surrogate at the solved V
  double true_objective = 0.0;   // gamma (psr) or alpha bound (csr)
  double rank_ratio = 0.0;
  strategy::SnrRegime regime = strategy::SnrRegime::high;
  double lipschitz = 0.0;
};

struct OptimResult {
  rates::Mode mode = rates::Mode::psr;
  channel::PhaseProfile phase;
  double alpha = 0.0;
  double p = 0.0;
  double tau = 0.0;
  detection::DepReport dep;
  std::vector<IterationRow> trace;
  int iterations = 0;
  bool converged = false;
  bool feasible = false;
  strategy::SnrRegime regime = strategy::SnrRegime::high;
  double gamma_final = 0.0;  // raw double-reflection product at the solution
  std::string message;
};

/// Alternating surrogate maximization of the double-reflection gain under
/// the interference-mode rate constraints; returns alpha at the feasible
/// lower bound, p = p_max, and the DEP under the warden's optimal threshold.
OptimResult optimize_psr(const ChannelRealization& ch,
                         const SystemConfig& config,
                         numerics::RngStream& init_rng);

/// Multipath-mode counterpart. Classifies the primary SNR regime at the
/// current phase, solves the epigraph program (low regime) or the reduced
/// floor program (high regime), and re-solves once in the other regime if
/// the optimized phase crosses the boundary.
OptimResult optimize_csr(const ChannelRealization& ch,
                         const SystemConfig& config,
                         numerics::RngStream& init_rng);

}  // namespace covertsr::optimizer
