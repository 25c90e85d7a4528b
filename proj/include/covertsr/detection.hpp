#pragma once

#include "covertsr/channel.hpp"

namespace covertsr::detection {

using channel::CascadeGains;
using channel::SystemConfig;

enum class Hypothesis { h0, h1 };

/// Average received power at the warden for one channel realization.
/// h0: p|h_sw|^2 + s2;  h1: a p |h_sb h_bw|^2 + p|h_sw|^2 + s2.
double received_power(Hypothesis hyp, double p, double alpha,
                      const CascadeGains& g, double sigma2);

/// Scalars the analytic detection formulas run on. l1 = L(d_S) L(d_W),
/// l2 = l1 L(d_B)^2, lambda = 1/M; z is recomputed on access.
struct DetectionParams {
  double tau = 0.0;
  double p = 0.0;
  double alpha = 0.0;
  double lambda = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double sigma2 = 0.0;

  double z() const { return (tau - sigma2) / p; }

  static DetectionParams from_config(const SystemConfig& config, double tau,
                                     double p, double alpha);
};

enum class DepMethod { closed_form, quadrature, monte_carlo };

struct DepReport {
  double p_fa = 0.0;
  double p_md = 0.0;
  double xi = 0.0;
  DepMethod method = DepMethod::closed_form;
  long trials = 0;      // monte carlo only
  int quad_order = 0;   // quadrature only
};

/// 1 when tau <= sigma0^2, else exp(-lambda l1 z).
double prob_false_alarm(const DetectionParams& params);

enum class MdMode { integral, quadrature };

/// Miss-detection probability. Exact mode evaluates
///   2 lambda^2 int_0^{l2 z/a} (1 - e^{-l1 lz + (l1/l2) a l x}) K0(2 l sqrt(x)) dx
/// through the substitution u = 2 lambda sqrt(x); quadrature mode evaluates
/// the Q-point closed form built on K1 and the Chebyshev nodes.
double prob_miss_detection(const DetectionParams& params, MdMode mode,
                           int quad_order, double tol = 1e-10);

/// p_fa + p_md with the Q-point quadrature miss-detection term;
/// xi = 1 when tau <= sigma0^2.
DepReport avg_dep_closed_form(const DetectionParams& params, int quad_order);

/// Same, with the miss-detection integral evaluated adaptively.
DepReport avg_dep_integral(const DetectionParams& params, double tol = 1e-10);

/// Seeded hypothesis-count estimate: one fresh channel realization per trial
/// under each hypothesis; FA counts power > tau under h0, MD counts
/// power < tau under h1. Trials are partitioned into fixed 4096-trial chunks
/// with one RNG sub-stream each, so the result is identical for any worker
/// count.
DepReport avg_dep_monte_carlo(const SystemConfig& config, double p,
                              double alpha, double tau, long trials,
                              const numerics::RngStream& stream_base,
                              int max_workers = 0);

/// Detection threshold solving
///   int_0^{l2 (tau - s2)/(a p)} e^{(l1 a l / l2) x} K0(2 l sqrt(x)) dx = 1/(2 l^2)
/// by bracketed root finding on the residual; the left end of the bracket is
/// s2 (1 + 1e-9), the right end s2 + 50 p / (lambda l1), expanded
/// geometrically when the sign change lies further out.
double optimal_threshold_theorem1(double p, double alpha, double lambda,
                                  double l1, double l2, double sigma2);

/// Closed-form threshold for a fixed power ratio omega = Y/X:
/// tau* = p (1 + a w) ln(1 + a w) / (lambda l1 a w) + s2.
double optimal_threshold_ratio_form(double omega, double p, double alpha,
                                    double lambda, double l1, double sigma2);

/// Deterministic-ratio DEP at a fixed threshold:
/// 1 - e^{-l l1 (tau - s2) / (p (1 + a w))} + e^{-l l1 (tau - s2)/p}.
double dep_ratio_form(double tau, double omega, double p, double alpha,
                      double lambda, double l1, double sigma2);

}  // namespace covertsr::detection
