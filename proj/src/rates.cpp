#include "covertsr/rates.hpp"

#include <cmath>

namespace covertsr::rates {

namespace {
double abs2(std::complex<double> z) { return std::norm(z); }

void check_args(double p, double alpha) {
  if (!(p > 0.0)) throw std::domain_error("rates: p > 0 required");
  if (!(alpha >= 0.0) || alpha > 1.0) {
    throw std::domain_error("rates: alpha in [0, 1] required");
  }
}
}  // namespace

double rate_s_psr(double p, double alpha, const CascadeGains& g, double sigma2) {
  check_args(p, alpha);
  const double interference = alpha * p * abs2(g.h_sb) * abs2(g.h_br);
  return std::log2(1.0 + p * abs2(g.h_sr) / (interference + sigma2));
}

double rate_c_psr(double p, double alpha, const CascadeGains& g, double sigma2) {
  check_args(p, alpha);
  return std::log2(1.0 + alpha * p * abs2(g.h_sb) * abs2(g.h_br) / sigma2);
}

double rate_c_psr_mc(double p, double alpha, const CascadeGains& g,
                     double sigma2, int draws, numerics::RngStream& rng) {
  check_args(p, alpha);
  if (draws < 1) throw std::invalid_argument("rate_c_psr_mc: draws >= 1");
  double acc = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double phi = 2.0 * M_PI * rng.uniform();
    const std::complex<double> s{std::cos(phi), std::sin(phi)};
    acc += std::log2(1.0 + alpha * p * abs2(g.h_sb * g.h_br * s) / sigma2);
  }
  return acc / draws;
}

double rate_s_csr(double p, double alpha, const CascadeGains& g, double sigma2) {
  check_args(p, alpha);
  const std::complex<double> multipath = std::sqrt(alpha) * g.h_sb * g.h_br;
  const double plus = abs2(g.h_sr + multipath);
  const double minus = abs2(g.h_sr - multipath);
  return 0.5 * std::log2(1.0 + p * plus / sigma2) +
         0.5 * std::log2(1.0 + p * minus / sigma2);
}

double rate_c_csr(double p, double alpha, const CascadeGains& g, double sigma2,
                  int eta) {
  check_args(p, alpha);
  if (eta < 1) throw std::domain_error("rate_c_csr: eta >= 1 required");
  const double e = static_cast<double>(eta);
  return std::log2(1.0 + e * alpha * p * abs2(g.h_sb) * abs2(g.h_br) / sigma2) / e;
}

bool sic_check_csr(double p, double alpha, const CascadeGains& g, double sigma2,
                   double eps_sic) {
  return rate_s_csr(p, alpha, g, sigma2) >= eps_sic;
}

RateReport evaluate(Mode mode, double p, double alpha, const CascadeGains& g,
                    double sigma2, int eta, double eps_sic, double eps_c) {
  RateReport r;
  r.mode = mode;
  if (mode == Mode::psr) {
    r.r_s = rate_s_psr(p, alpha, g, sigma2);
    r.r_c = rate_c_psr(p, alpha, g, sigma2);
  } else {
    r.r_s = rate_s_csr(p, alpha, g, sigma2);
    r.r_c = rate_c_csr(p, alpha, g, sigma2, eta);
  }
  r.sic_feasible = r.r_s >= eps_sic;
  r.qos_feasible = r.r_c >= eps_c;
  return r;
}

}  // namespace covertsr::rates
