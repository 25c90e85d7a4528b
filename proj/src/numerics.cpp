#include "covertsr/numerics.hpp"

#include <cmath>
#include <limits>

namespace covertsr::numerics {

namespace {

constexpr long double kEulerGamma = 0.5772156649015328606065120900824024L;

// Ascending series, A&S 9.6.10-13. Accurate while the cancellation between
// the log term and the sum stays below the extended-precision budget; we
// cap its use at x <= 6 where the amplification is ~1e5 * eps80.
long double k0_series(long double x) {
  const long double t2 = 0.25L * x * x;
  long double term = 1.0L;   // t2^k / (k!)^2
  long double i0 = 1.0L;
  long double sum = 0.0L;    // sum term * H_k
  long double hk = 0.0L;
  for (int k = 1; k < 60; ++k) {
    term *= t2 / static_cast<long double>(k) / static_cast<long double>(k);
    hk += 1.0L / static_cast<long double>(k);
    i0 += term;
    sum += term * hk;
    if (term < 1e-24L * i0) break;
  }
  return -(std::log(x * 0.5L) + kEulerGamma) * i0 + sum;
}

long double k1_series(long double x) {
  const long double t2 = 0.25L * x * x;
  // I1(x) = (x/2) sum t2^k / (k! (k+1)!)
  long double term = 1.0L;  // t2^k / (k!(k+1)!)
  long double i1s = 1.0L;
  long double hk = 0.0L, hk1 = 1.0L;
  long double psum = term * (hk + hk1);
  for (int k = 1; k < 60; ++k) {
    term *= t2 / static_cast<long double>(k) / static_cast<long double>(k + 1);
    hk += 1.0L / static_cast<long double>(k);
    hk1 += 1.0L / static_cast<long double>(k + 1);
    i1s += term;
    psum += term * (hk + hk1);
    if (term < 1e-24L * i1s) break;
  }
  const long double i1 = 0.5L * x * i1s;
  return std::log(x * 0.5L) * i1 + 1.0L / x -
         0.25L * x * (psum - 2.0L * kEulerGamma * i1s);
}

// K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt, trapezoid on [0, T].
// The integrand is even and analytic in a strip, so the trapezoid rule
// converges geometrically; h = 0.05 puts the discretization error far
// below 1e-18 and T is chosen so the truncated tail is negligible.
long double k_integral(long double x, int nu) {
  const long double h = 0.05L;
  const long double arg = 60.0L / x + 4.0L;
  const long double t_max = std::log(arg + std::sqrt(arg * arg - 1.0L)) + 1.0L;
  long double sum = 0.5L;  // t = 0 term (cosh 0 = 1), exp(-x) factored out
  const int n = static_cast<int>(t_max / h) + 1;
  for (int i = 1; i <= n; ++i) {
    const long double t = h * static_cast<long double>(i);
    const long double c = std::cosh(t);
    long double w = std::exp(-x * (c - 1.0L));
    if (nu == 1) w *= c;
    sum += w;
    if (w < 1e-24L) break;
  }
  return h * sum * std::exp(-x);
}

// Large-argument asymptotic series; the truncated tail is < 1e-12 for
// x >= 13 (terms are added while they still shrink).
long double k_asymptotic(long double x, int nu) {
  const long double mu = 4.0L * nu * nu;
  long double term = 1.0L;
  long double sum = 1.0L;
  long double prev = std::numeric_limits<long double>::max();
  for (int k = 0; k < 40; ++k) {
    const long double tk = 2 * k + 1;
    term *= (mu - tk * tk) / (8.0L * x * static_cast<long double>(k + 1));
    if (std::fabs(term) >= prev) break;  // asymptotic tail started growing
    sum += term;
    prev = std::fabs(term);
    if (std::fabs(term) < 1e-22L * std::fabs(sum)) break;
  }
  const long double pi = 3.14159265358979323846264338327950288L;
  return std::sqrt(pi / (2.0L * x)) * std::exp(-x) * sum;
}

long double k_hybrid(long double x, int nu) {
  if (x <= 6.0L) return nu == 0 ? k0_series(x) : k1_series(x);
  if (x < 13.0L) return k_integral(x, nu);
  return k_asymptotic(x, nu);
}

}  // namespace

double bessel_k0(double x) {
  if (!(x > 0.0)) throw std::domain_error("bessel_k0: requires x > 0");
  if (x > 705.0) return 0.0;  // below the double underflow threshold
  return static_cast<double>(k_hybrid(static_cast<long double>(x), 0));
}

double bessel_k1(double x) {
  if (!(x > 0.0)) throw std::domain_error("bessel_k1: requires x > 0");
  if (x > 705.0) return 0.0;
  return static_cast<double>(k_hybrid(static_cast<long double>(x), 1));
}

double bessel_k1_scaled_by_x(double x) {
  if (x < 0.0) throw std::domain_error("bessel_k1_scaled_by_x: requires x >= 0");
  if (x == 0.0) return 1.0;          // x K1(x) -> 1 as x -> 0+
  if (x > 705.0) return 0.0;
  return x * static_cast<double>(k_hybrid(static_cast<long double>(x), 1));
}

QuadratureRule chebyshev_nodes(int order) {
  if (order < 1) throw std::invalid_argument("chebyshev_nodes: order >= 1");
  QuadratureRule rule;
  rule.order = order;
  rule.nodes.resize(order);
  for (int q = 1; q <= order; ++q) {
    rule.nodes[q - 1] = std::cos((2.0 * q - 1.0) * M_PI / (2.0 * order));
  }
  return rule;
}

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol) {
  if (!(a < b)) throw std::invalid_argument("integrate_adaptive: a < b required");
  if (!(tol > 0.0)) throw std::invalid_argument("integrate_adaptive: tol > 0");
  const double c = 0.5 * (a + b);
  const double d = 0.5 * (b - a);
  const double t_max = 6.0;

  // abscissa/weight of the tanh-sinh map at parameter t
  auto node = [&](double t, double& x, double& w) {
    const double u = 0.5 * M_PI * std::sinh(t);
    const double ch = std::cosh(u);
    x = c + d * std::tanh(u);
    w = d * 0.5 * M_PI * std::cosh(t) / (ch * ch);
  };

  double h = 1.0;
  double x, w;
  node(0.0, x, w);
  double sum = f(x) * w;  // level-0 estimate with h = 1
  {
    for (int i = 1; i * h <= t_max; ++i) {
      for (double s : {i * h, -i * h}) {
        node(s, x, w);
        if (x <= a || x >= b || w == 0.0) continue;
        sum += f(x) * w;
      }
    }
  }
  double integral = sum * h;

  const int max_level = 12;
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    double add = 0.0;
    // new points are the odd multiples of the refined h
    for (int i = 1; i * h <= t_max; i += 2) {
      for (double s : {i * h, -i * h}) {
        node(s, x, w);
        if (x <= a || x >= b || w == 0.0) continue;
        const double fx = f(x);
        if (std::isfinite(fx)) add += fx * w;
      }
    }
    const double refined = 0.5 * integral + add * h;
    const double change = std::fabs(refined - integral);
    integral = refined;
    if (level >= 3 && change <= tol * std::max(1.0, std::fabs(integral))) {
      return integral;
    }
  }
  throw IntegrationError("integrate_adaptive: tolerance not reached");
}

double find_root_bracketed(const std::function<double(double)>& f, double lo,
                           double hi, double tol) {
  double fa = f(lo), fb = f(hi);
  if (fa == 0.0) return lo;
  if (fb == 0.0) return hi;
  if ((fa > 0.0) == (fb > 0.0)) {
    throw BracketError("find_root_bracketed: no sign change on [lo, hi]");
  }
  double a = lo, b = hi;
  double c = a, fc = fa;
  double e = b - a, dd = e;
  for (int iter = 0; iter < 200; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a; fc = fa; e = dd = b - a;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double eps_m = 2.0 * std::numeric_limits<double>::epsilon() *
                             std::fabs(b) + 1e-300;
    const double m = 0.5 * (c - b);
    if (std::fabs(fb) <= tol) return b;
    if (std::fabs(m) <= eps_m) return b;  // bracket exhausted
    if (std::fabs(e) >= eps_m && std::fabs(fa) > std::fabs(fb)) {
      // secant / inverse quadratic step
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q; else p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::fabs(eps_m * q),
                             std::fabs(e * q))) {
        e = dd; dd = p / q;
      } else {
        dd = m; e = m;
      }
    } else {
      dd = m; e = m;
    }
    a = b; fa = fb;
    b += (std::fabs(dd) > eps_m) ? dd : (m > 0.0 ? eps_m : -eps_m);
    fb = f(b);
  }
  return b;
}

namespace {
std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
inline std::uint64_t rotl(std::uint64_t v, int k) {
  return (v << k) | (v >> (64 - k));
}
}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::uint64_t s = seed ^ 0xA02BDBF7BB3C0A7ULL;
  (void)splitmix64(s);
  s ^= stream_id * 0xD2B74407B1CE6E93ULL + 0x9E3779B97F4A7C15ULL;
  for (auto& word : state_) word = splitmix64(s);
  // all-zero state is invalid for xoshiro
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] keeps the log finite
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * M_PI * u2;
  spare_ = r * std::sin(phi);
  have_spare_ = true;
  return r * std::cos(phi);
}

std::complex<double> RngStream::cgaussian() {
  const double scale = std::sqrt(0.5);
  const double re = gaussian();
  const double im = gaussian();
  return {scale * re, scale * im};
}

}  // namespace covertsr::numerics
