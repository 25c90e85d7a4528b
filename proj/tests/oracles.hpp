// Test-only reference implementations, kept independent of the library code
// they check.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracles {

// --- modified Bessel functions -------------------------------------------

// Ascending series (valid until the log/sum cancellation eats the extended
// precision, x <~ 10).
inline long double k0_series(long double x) {
  const long double euler = 0.5772156649015328606L;
  const long double t2 = 0.25L * x * x;
  long double term = 1.0L, i0 = 1.0L, sum = 0.0L, hk = 0.0L;
  for (int k = 1; k < 80; ++k) {
    term *= t2 / (static_cast<long double>(k) * k);
    hk += 1.0L / k;
    i0 += term;
    sum += term * hk;
    if (term < 1e-25L * i0) break;
  }
  return -(std::log(0.5L * x) + euler) * i0 + sum;
}

inline long double k1_series(long double x) {
  const long double euler = 0.5772156649015328606L;
  const long double t2 = 0.25L * x * x;
  long double term = 1.0L, i1s = 1.0L, hk = 0.0L, hk1 = 1.0L;
  long double psum = hk + hk1;
  for (int k = 1; k < 80; ++k) {
    term *= t2 / (static_cast<long double>(k) * (k + 1.0L));
    hk += 1.0L / k;
    hk1 += 1.0L / (k + 1.0L);
    i1s += term;
    psum += term * (hk + hk1);
    if (term < 1e-25L * i1s) break;
  }
  const long double i1 = 0.5L * x * i1s;
  return std::log(0.5L * x) * i1 + 1.0L / x - 0.25L * x * (psum - 2.0L * euler * i1s);
}

// Large-x asymptotic expansion, truncated at the smallest term (x >~ 13).
inline long double k_asym(long double x, int nu) {
  const long double pi = 3.141592653589793238462643L;
  const long double mu = 4.0L * nu * nu;
  long double term = 1.0L, sum = 1.0L, prev = 1e400L;
  for (int k = 0; k < 60; ++k) {
    const long double tk = 2 * k + 1;
    term *= (mu - tk * tk) / (8.0L * x * (k + 1.0L));
    if (std::fabs(term) >= prev) break;
    sum += term;
    prev = std::fabs(term);
  }
  return std::sqrt(pi / (2.0L * x)) * std::exp(-x) * sum;
}

// Everywhere-valid quadrature of K_nu(x) = int_0^inf e^{-x cosh t} cosh(nu t);
// uses a finer step than the library's mid-range evaluator.
inline long double k_quadrature(long double x, int nu) {
  const long double h = 0.02L;
  long double arg = 80.0L / x + 4.0L;
  const long double t_max = std::log(arg + std::sqrt(arg * arg - 1.0L)) + 1.5L;
  long double sum = 0.5L;
  const int n = static_cast<int>(t_max / h) + 1;
  for (int i = 1; i <= n; ++i) {
    const long double t = h * i;
    const long double c = std::cosh(t);
    long double w = std::exp(-x * (c - 1.0L));
    if (nu == 1) w *= c;
    sum += w;
    if (w < 1e-26L) break;
  }
  return h * sum * std::exp(-x);
}

// Benign all-positive series for I0 / I1 (no cancellation at any x used).
inline long double i_series(long double x, int nu) {
  const long double t2 = 0.25L * x * x;
  long double term = nu == 0 ? 1.0L : 0.5L * x;
  long double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= t2 / (static_cast<long double>(k) * (k + nu));
    sum += term;
    if (term < 1e-25L * sum) break;
  }
  return sum;
}

// --- generic helpers -------------------------------------------------------

// plain adaptive Simpson, independent of the library integrator
inline double simpson_adaptive(const std::function<double(double)>& f, double a,
                               double b, double tol, int depth = 28) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  std::function<double(double, double, double, double, double, double, double, int)>
      rec = [&](double lo, double hi, double flo, double fmid, double fhi,
                double whole, double eps, int d) -> double {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
    const double flm = f(lm), frm = f(rm);
    const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    if (d <= 0 || std::fabs(left + right - whole) <= 15.0 * eps) {
      return left + right + (left + right - whole) / 15.0;
    }
    return rec(lo, mid, flo, flm, fmid, left, 0.5 * eps, d - 1) +
           rec(mid, hi, fmid, frm, fhi, right, 0.5 * eps, d - 1);
  };
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return rec(a, b, fa, fm, fb, whole, tol, depth);
}

inline double golden_min(const std::function<double(double)>& f, double lo,
                         double hi, double tol) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a); fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace oracles
