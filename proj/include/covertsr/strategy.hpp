#pragma once

#include "covertsr/rates.hpp"

namespace covertsr::strategy {

using channel::CascadeGains;

/// Feasible reflection-coefficient interval for the interference-limited
/// case. The covert side picks the lower end (smaller alpha, higher DEP).
struct AlphaRegion {
  double lower = 0.0;
  double upper = 0.0;
  bool feasible = false;

  double chosen() const { return lower; }
};

/// lower = gc s2 / (p |h_sb h_br|^2);
/// upper = (p |h_sr|^2 - s2 gsic) / (p gsic |h_sb h_br|^2).
/// feasible iff 0 < lower <= min(1, upper).
AlphaRegion alpha_region_psr(double p, const CascadeGains& g, double sigma2,
                             double gamma_c, double gamma_sic);

enum class SnrRegime { low, high };

/// high iff p |h_sr|^2 / s2 >= (gamma_sic + 1) / 4.
SnrRegime snr_regime(double p, std::complex<double> h_sr, double sigma2,
                     double gamma_sic);

/// Which closed form supplies the SIC-driven alpha lower bound in the low
/// regime. The worst-case form guarantees the exact two-branch rate for any
/// cross-term phase; the legacy form is kept for comparison only, since it
/// does not survive substitution back into the exact rate.
enum class CsrSicBoundForm { worst_case, legacy };

struct CsrAlphaBound {
  double value = 0.0;       // max of the active bounds
  double qos_bound = 0.0;   // (2^{eta ec} - 1) s2 / (p eta |h_sb h_br|^2)
  double sic_bound = 0.0;   // 0 when vacuous (high regime or covered at alpha=0)
  SnrRegime regime = SnrRegime::high;
  bool sic_exact_ok = false;  // exact two-branch rate check at `value`
  bool feasible = false;      // value in (0, 1] and sic_exact_ok
};

CsrAlphaBound alpha_lower_csr(double p, const CascadeGains& g, double sigma2,
                              double gamma_sic, int eta, double eps_c,
                              SnrRegime regime,
                              CsrSicBoundForm form = CsrSicBoundForm::worst_case);

/// Interior stationary power for a fixed threshold and ratio omega:
/// p* = lambda l1 (tau - s2) w / ((1 + a w) ln(1 + a w)).
double interior_power_fixed_tau(double tau, double omega, double alpha,
                                double lambda, double l1, double sigma2);

/// Boundary rule: the DEP at a fixed threshold is unimodal in p with an
/// interior minimum, so the maximizer over [p_min_f, p_max] sits at one of
/// the two ends; returns the end with the larger ratio-form DEP.
double optimal_power_fixed_tau(double tau, double omega, double alpha,
                               double lambda, double l1, double sigma2,
                               double p_min_f, double p_max);

/// Smallest power in (0, p_max] satisfying a caller-supplied feasibility
/// predicate, located by bisection after a geometric probe; returns p_max + 1
/// when even p_max is infeasible.
double min_feasible_power(const std::function<bool(double)>& feasible,
                          double p_max, double rel_tol = 1e-9);

}  // namespace covertsr::strategy
