#pragma once

#include "covertsr/channel.hpp"

namespace covertsr::rates {

using channel::CascadeGains;

enum class Mode { psr, csr };

/// Primary-signal rate when the backscatter component is decoded last and
/// therefore acts as interference: log2(1 + p|h_sr|^2 / (a p |h_sb h_br|^2 + s2)).
double rate_s_psr(double p, double alpha, const CascadeGains& g, double sigma2);

/// Backscatter rate after interference cancellation; the primary symbol has
/// unit modulus so the fast-fading expectation collapses to a constant.
double rate_c_psr(double p, double alpha, const CascadeGains& g, double sigma2);

/// Monte Carlo variant of rate_c_psr averaging over unit-modulus primary
/// symbols; must equal the closed form exactly (constant integrand).
double rate_c_psr_mc(double p, double alpha, const CascadeGains& g,
                     double sigma2, int draws, numerics::RngStream& rng);

/// Primary rate when the backscatter symbol rides as a BPSK multipath term:
/// the equal-probability average of the +1 / -1 branches.
double rate_s_csr(double p, double alpha, const CascadeGains& g, double sigma2);

/// Backscatter rate over eta primary symbol periods:
/// (1/eta) log2(1 + eta a p |h_sb h_br|^2 / s2).
double rate_c_csr(double p, double alpha, const CascadeGains& g, double sigma2,
                  int eta);

/// Exact two-branch SIC feasibility: rate_s_csr >= eps_sic.
bool sic_check_csr(double p, double alpha, const CascadeGains& g, double sigma2,
                   double eps_sic);

struct RateReport {
  double r_s = 0.0;
  double r_c = 0.0;
  Mode mode = Mode::psr;
  bool sic_feasible = false;
  bool qos_feasible = false;
};

RateReport evaluate(Mode mode, double p, double alpha, const CascadeGains& g,
                    double sigma2, int eta, double eps_sic, double eps_c);

}  // namespace covertsr::rates
