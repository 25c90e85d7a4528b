#include "covertsr/strategy.hpp"

#include <cmath>

#include "covertsr/detection.hpp"

namespace covertsr::strategy {

AlphaRegion alpha_region_psr(double p, const CascadeGains& g, double sigma2,
                             double gamma_c, double gamma_sic) {
  if (!(p > 0.0)) throw std::domain_error("alpha_region_psr: p > 0 required");
  const double gain2 = std::norm(g.h_sb) * std::norm(g.h_br);
  AlphaRegion region;
  if (gain2 <= 0.0) {
    region.lower = std::numeric_limits<double>::infinity();
    region.upper = 0.0;
    region.feasible = gamma_c == 0.0;
    if (region.feasible) region.lower = 0.0;
    return region;
  }
  region.lower = gamma_c * sigma2 / (p * gain2);
  region.upper =
      (p * std::norm(g.h_sr) - sigma2 * gamma_sic) / (p * gamma_sic * gain2);
  region.feasible =
      region.lower > 0.0 && region.lower <= std::min(1.0, region.upper);
  return region;
}

SnrRegime snr_regime(double p, std::complex<double> h_sr, double sigma2,
                     double gamma_sic) {
  if (!(p > 0.0)) throw std::domain_error("snr_regime: p > 0 required");
  const double snr_p = p * std::norm(h_sr) / sigma2;
  return snr_p >= 0.25 * (gamma_sic + 1.0) ? SnrRegime::high : SnrRegime::low;
}

namespace {

// Worst-case-phase SIC bound. Squaring the two-branch rate condition gives
//   (b - a + s2)^2 + 4 s2 a >= s2^2 (1 + gsic)^2,  a = p|h_sr|^2, b = a p G,
// once the cross term is taken at its most destructive value, so
//   b >= a - s2 + sqrt(s2^2 (1+gsic)^2 - 4 s2 a)
// is sufficient for every phase; when the radicand is negative no reflection
// is needed at all (alpha = 0 already satisfies SIC).
double sic_bound_worst_case(double a, double sigma2, double gamma_sic,
                            double p_gain2) {
  const double radicand =
      sigma2 * sigma2 * (1.0 + gamma_sic) * (1.0 + gamma_sic) -
      4.0 * sigma2 * a;
  if (radicand <= 0.0) return 0.0;
  const double b_min = a - sigma2 + std::sqrt(radicand);
  if (b_min <= 0.0) return 0.0;
  return b_min / p_gain2;
}

// Legacy closed form kept for comparison: coefficient 3 on a and the
// unsquared (1 + gsic) under the root.
double sic_bound_legacy(double a, double sigma2, double gamma_sic,
                        double p_gain2) {
  const double radicand =
      sigma2 * sigma2 * (1.0 + gamma_sic) - 4.0 * sigma2 * a;
  const double root = radicand > 0.0 ? std::sqrt(radicand) : 0.0;
  const double b_min = root - sigma2 + 3.0 * a;
  if (b_min <= 0.0) return 0.0;
  return b_min / p_gain2;
}

}  // namespace

CsrAlphaBound alpha_lower_csr(double p, const CascadeGains& g, double sigma2,
                              double gamma_sic, int eta, double eps_c,
                              SnrRegime regime, CsrSicBoundForm form) {
  if (!(p > 0.0)) throw std::domain_error("alpha_lower_csr: p > 0 required");
  if (eta < 1) throw std::domain_error("alpha_lower_csr: eta >= 1 required");
  CsrAlphaBound out;
  out.regime = regime;
  const double gain2 = std::norm(g.h_sb) * std::norm(g.h_br);
  if (gain2 <= 0.0) {
    out.qos_bound = std::numeric_limits<double>::infinity();
    out.value = out.qos_bound;
    return out;
  }
  const double e = static_cast<double>(eta);
  out.qos_bound =
      (std::exp2(e * eps_c) - 1.0) * sigma2 / (p * e * gain2);
  out.sic_bound = 0.0;
  if (regime == SnrRegime::low) {
    const double a = p * std::norm(g.h_sr);
    out.sic_bound = form == CsrSicBoundForm::worst_case
                        ? sic_bound_worst_case(a, sigma2, gamma_sic, p * gain2)
                        : sic_bound_legacy(a, sigma2, gamma_sic, p * gain2);
  }
  out.value = std::max(out.qos_bound, out.sic_bound);
  const double eps_sic = std::log2(1.0 + gamma_sic);
  out.sic_exact_ok =
      out.value <= 1.0 &&
      (regime == SnrRegime::high ||
       rates::sic_check_csr(p, std::min(out.value, 1.0), g, sigma2, eps_sic));
  out.feasible = out.value > 0.0 && out.value <= 1.0 && out.sic_exact_ok;
  return out;
}

double interior_power_fixed_tau(double tau, double omega, double alpha,
                                double lambda, double l1, double sigma2) {
  if (!(tau > sigma2)) throw std::domain_error("fixed_tau: tau > sigma2 required");
  if (!(omega > 0.0)) throw std::domain_error("fixed_tau: omega > 0 required");
  // stationary point of 1 - e^{-A/(p(1+u))} + e^{-A/p} in p, u = alpha omega:
  // A u / (p (1+u)) = ln(1+u). The numerator carries u, not omega; the
  // grid-argmax oracle in the tests pins this down.
  const double u = alpha * omega;
  return lambda * l1 * (tau - sigma2) * u / ((1.0 + u) * std::log1p(u));
}

double optimal_power_fixed_tau(double tau, double omega, double alpha,
                               double lambda, double l1, double sigma2,
                               double p_min_f, double p_max) {
  if (!(tau > sigma2)) throw std::domain_error("fixed_tau: tau > sigma2 required");
  if (!(omega > 0.0)) throw std::domain_error("fixed_tau: omega > 0 required");
  if (!(p_min_f > 0.0) || !(p_min_f < p_max)) {
    throw std::domain_error("fixed_tau: 0 < p_min_f < p_max required");
  }
  const double xi_lo =
      detection::dep_ratio_form(tau, omega, p_min_f, alpha, lambda, l1, sigma2);
  const double xi_hi =
      detection::dep_ratio_form(tau, omega, p_max, alpha, lambda, l1, sigma2);
  return xi_lo >= xi_hi ? p_min_f : p_max;
}

double min_feasible_power(const std::function<bool(double)>& feasible,
                          double p_max, double rel_tol) {
  if (!(p_max > 0.0)) throw std::domain_error("min_feasible_power: p_max > 0");
  if (!feasible(p_max)) return p_max + 1.0;
  // geometric probe downward for an infeasible witness
  double lo = p_max;
  for (int i = 0; i < 200 && feasible(lo); ++i) lo *= 0.5;
  if (feasible(lo)) return lo;  // feasible down to numerical zero
  double hi = 2.0 * lo;
  while (hi / lo - 1.0 > rel_tol) {
    const double mid = std::sqrt(lo * hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace covertsr::strategy
