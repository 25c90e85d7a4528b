#include "covertsr/detection.hpp"

#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

#include "covertsr/numerics.hpp"

namespace covertsr::detection {

using numerics::bessel_k0;
using numerics::bessel_k1_scaled_by_x;
using numerics::RngStream;

double received_power(Hypothesis hyp, double p, double alpha,
                      const CascadeGains& g, double sigma2) {
  const double direct = p * std::norm(g.h_sw) + sigma2;
  if (hyp == Hypothesis::h0) return direct;
  return alpha * p * std::norm(g.h_sb) * std::norm(g.h_bw) + direct;
}

DetectionParams DetectionParams::from_config(const SystemConfig& config,
                                             double tau, double p,
                                             double alpha) {
  DetectionParams d;
  d.tau = tau;
  d.p = p;
  d.alpha = alpha;
  d.lambda = config.lambda();
  d.l1 = config.loss_source() * config.loss_warden();
  d.l2 = d.l1 * config.loss_backscatter() * config.loss_backscatter();
  d.sigma2 = config.noise_power_w;
  return d;
}

namespace {
void check_params(const DetectionParams& d, bool need_alpha) {
  if (!(d.p > 0.0)) throw std::domain_error("detection: p > 0 required");
  if (!(d.lambda > 0.0) || !(d.l1 > 0.0) || !(d.l2 > 0.0) || !(d.sigma2 > 0.0)) {
    throw std::domain_error("detection: lambda, l1, l2, sigma2 must be positive");
  }
  if (need_alpha && !(d.alpha > 0.0)) {
    throw std::domain_error("detection: alpha > 0 required for the analytic DEP");
  }
}
}  // namespace

double prob_false_alarm(const DetectionParams& d) {
  check_params(d, false);
  if (d.tau <= d.sigma2) return 1.0;
  return std::exp(-d.lambda * d.l1 * d.z());
}

namespace {

// Exact miss-detection integral after u = 2 lambda sqrt(x):
//   int_0^U u (1 - exp(c u^2 - lambda l1 z)) K0(u) du,
// with U = 2 lambda sqrt(l2 z / alpha) and c = l1 alpha / (4 lambda l2),
// so that c U^2 = lambda l1 z and the exponent never exceeds zero.
double md_integral(const DetectionParams& d, double tol) {
  const double z = d.z();
  const double big_u = 2.0 * d.lambda * std::sqrt(d.l2 * z / d.alpha);
  const double c = d.l1 * d.alpha / (4.0 * d.lambda * d.l2);
  const double a1 = d.lambda * d.l1 * z;  // c * U^2
  const double u_hi = std::min(big_u, 60.0);
  if (u_hi <= 0.0) return 0.0;
  auto f = [&](double u) {
    return u * (1.0 - std::exp(c * u * u - a1)) * bessel_k0(u);
  };
  return numerics::integrate_adaptive(f, 0.0, u_hi, tol);
}

double md_quadrature(const DetectionParams& d, int q_order) {
  const double z = d.z();
  const double ratio = d.l2 * z / d.alpha;
  const double big_a = 2.0 * d.lambda * std::sqrt(ratio);
  const double head = 1.0 - bessel_k1_scaled_by_x(big_a);

  const auto rule = numerics::chebyshev_nodes(q_order);
  const double coeff =
      d.lambda * d.lambda * d.l2 * z * M_PI / (d.alpha * q_order);
  const double a1 = d.lambda * d.l1 * z;
  double sum = 0.0;
  for (const double xq : rule.nodes) {
    const double arg = d.lambda * std::sqrt(2.0 * ratio * (xq + 1.0));
    if (arg > 705.0) continue;  // K0 underflows; the term is zero
    const double k0v = arg > 0.0 ? bessel_k0(arg) : 0.0;
    if (k0v == 0.0) continue;
    sum += std::sqrt(1.0 - xq * xq) * std::exp(0.5 * a1 * (xq - 1.0)) * k0v;
  }
  return head - coeff * sum;
}

}  // namespace

double prob_miss_detection(const DetectionParams& d, MdMode mode,
                           int quad_order, double tol) {
  check_params(d, true);
  if (d.tau <= d.sigma2) return 0.0;
  if (mode == MdMode::integral) return md_integral(d, tol);
  if (quad_order < 1) throw std::invalid_argument("prob_miss_detection: Q >= 1");
  return md_quadrature(d, quad_order);
}

DepReport avg_dep_closed_form(const DetectionParams& d, int quad_order) {
  check_params(d, true);
  DepReport r;
  r.method = DepMethod::quadrature;
  r.quad_order = quad_order;
  if (d.tau <= d.sigma2) {
    r.p_fa = 1.0;
    r.p_md = 0.0;
    r.xi = 1.0;
    return r;
  }
  r.p_fa = prob_false_alarm(d);
  r.p_md = prob_miss_detection(d, MdMode::quadrature, quad_order);
  r.xi = r.p_fa + r.p_md;
  return r;
}

DepReport avg_dep_integral(const DetectionParams& d, double tol) {
  check_params(d, true);
  DepReport r;
  r.method = DepMethod::closed_form;
  if (d.tau <= d.sigma2) {
    r.p_fa = 1.0;
    r.p_md = 0.0;
    r.xi = 1.0;
    return r;
  }
  r.p_fa = prob_false_alarm(d);
  r.p_md = prob_miss_detection(d, MdMode::integral, 0, tol);
  r.xi = r.p_fa + r.p_md;
  return r;
}

namespace {

struct TrialCounts {
  long fa = 0;
  long md = 0;
};

// One chunk of Monte Carlo trials on its own sub-stream. Entries are drawn
// element by element; the phase profile is immaterial for the statistics
// (unit-modulus rotations preserve the entry distributions), so Theta = I.
TrialCounts run_chunk(const SystemConfig& config, double p, double alpha,
                      double tau, long n_trials, RngStream rng) {
  TrialCounts counts;
  const int m = config.irs_elements;
  const double b = config.rician_factor;
  const double los_amp = std::sqrt(b / (1.0 + b));
  const double nlos_amp = std::sqrt(1.0 / (1.0 + b));
  const double l_s = config.loss_source();
  const double l_b = config.loss_backscatter();
  const double l_w = config.loss_warden();
  const double l1 = l_s * l_w;
  const double l2 = l1 * l_b * l_b;
  const double sigma2 = config.noise_power_w;

  auto draw = [&]() -> std::complex<double> {
    const double phi = 2.0 * M_PI * rng.uniform();
    return los_amp * std::complex<double>{std::cos(phi), std::sin(phi)} +
           nlos_amp * rng.cgaussian();
  };

  for (long t = 0; t < n_trials; ++t) {
    // H0 realization: only S and W channels matter
    std::complex<double> sw{0.0, 0.0};
    for (int i = 0; i < m; ++i) {
      const auto gs = draw();
      const auto gw = draw();
      sw += std::conj(gs) * gw;
    }
    const double power_h0 = p * std::norm(sw) / l1 + sigma2;
    if (power_h0 > tau) ++counts.fa;

    // fresh H1 realization
    std::complex<double> sb{0.0, 0.0}, bw{0.0, 0.0}, sw1{0.0, 0.0};
    for (int i = 0; i < m; ++i) {
      const auto gs = draw();
      const auto gb = draw();
      const auto gw = draw();
      sb += std::conj(gs) * gb;
      bw += std::conj(gb) * gw;
      sw1 += std::conj(gs) * gw;
    }
    const double power_h1 = alpha * p * std::norm(sb) * std::norm(bw) / l2 +
                            p * std::norm(sw1) / l1 + sigma2;
    if (power_h1 < tau) ++counts.md;
  }
  return counts;
}

}  // namespace

DepReport avg_dep_monte_carlo(const SystemConfig& config, double p,
                              double alpha, double tau, long trials,
                              const RngStream& stream_base, int max_workers) {
  if (trials < 1) throw std::invalid_argument("avg_dep_monte_carlo: trials >= 1");
  constexpr long kChunk = 4096;
  const long n_chunks = (trials + kChunk - 1) / kChunk;

  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  long workers = std::min<long>(max_workers > 0 ? max_workers : hw, n_chunks);

  std::vector<TrialCounts> per_chunk(n_chunks);
  std::atomic<long> next{0};
  auto body = [&]() {
    for (;;) {
      const long idx = next.fetch_add(1);
      if (idx >= n_chunks) return;
      const long lo = idx * kChunk;
      const long n = std::min(kChunk, trials - lo);
      RngStream rng(stream_base.seed(),
                    stream_base.stream_id() + static_cast<std::uint64_t>(idx));
      per_chunk[idx] = run_chunk(config, p, alpha, tau, n, rng);
    }
  };
  if (workers <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (long w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }

  TrialCounts total;
  for (const auto& c : per_chunk) {
    total.fa += c.fa;
    total.md += c.md;
  }
  DepReport r;
  r.method = DepMethod::monte_carlo;
  r.trials = trials;
  r.p_fa = static_cast<double>(total.fa) / static_cast<double>(trials);
  r.p_md = static_cast<double>(total.md) / static_cast<double>(trials);
  r.xi = r.p_fa + r.p_md;
  return r;
}

double optimal_threshold_theorem1(double p, double alpha, double lambda,
                                  double l1, double l2, double sigma2) {
  if (!(alpha > 0.0) || !(p > 0.0)) {
    throw std::domain_error("optimal_threshold: alpha > 0 and p > 0 required");
  }
  const double c = l1 * alpha / (4.0 * lambda * l2);
  if (!(c > 1e-200)) {
    throw numerics::BracketError(
        "optimal_threshold: alpha too small, threshold diverges to the noise floor");
  }

  // residual(w) with w = tau - sigma2:
  //   int_0^{U(w)} u e^{c u^2} K0(u) du - 1, rising from -1 at w -> 0+
  auto residual_w = [&](double w) {
    const double z = w / p;
    const double big_u = 2.0 * lambda * std::sqrt(l2 * z / alpha);
    if (c * big_u * big_u > 700.0) return 1e6;  // integrand overflow: far past the root
    const double u_hi = std::min(big_u, 1400.0);
    auto f = [&](double u) { return u * std::exp(c * u * u) * bessel_k0(u); };
    return numerics::integrate_adaptive(f, 0.0, u_hi, 1e-11) - 1.0;
  };

  // bracket on the offset, expanded geometrically in both directions: the
  // residual is monotone in w, negative toward the noise floor
  double w_hi = 50.0 * p / (lambda * l1);
  int expand = 0;
  while (residual_w(w_hi) < 0.0 && expand < 60) {
    w_hi *= 4.0;
    ++expand;
  }
  if (residual_w(w_hi) < 0.0) {
    throw numerics::BracketError("optimal_threshold: no sign change found");
  }
  double w_lo = std::min(1e-9 * sigma2, 0.0625 * w_hi);
  int shrink = 0;
  while (residual_w(w_lo) > 0.0 && shrink < 200) {
    w_lo *= 0.0625;
    ++shrink;
    if (w_lo < 1e-290) {
      throw numerics::BracketError("optimal_threshold: root below representable offset");
    }
  }
  auto residual_log = [&](double s) { return residual_w(std::exp(s)); };
  const double s_root = numerics::find_root_bracketed(
      residual_log, std::log(w_lo), std::log(w_hi), 1e-10);
  return sigma2 + std::exp(s_root);
}

double optimal_threshold_ratio_form(double omega, double p, double alpha,
                                    double lambda, double l1, double sigma2) {
  if (!(omega > 0.0)) throw std::domain_error("threshold_ratio_form: omega > 0");
  const double u = alpha * omega;
  return p * (1.0 + u) * std::log1p(u) / (lambda * l1 * u) + sigma2;
}

double dep_ratio_form(double tau, double omega, double p, double alpha,
                      double lambda, double l1, double sigma2) {
  const double base = lambda * l1 * (tau - sigma2) / p;
  return 1.0 - std::exp(-base / (1.0 + alpha * omega)) + std::exp(-base);
}

}  // namespace covertsr::detection
