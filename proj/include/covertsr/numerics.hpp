#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace covertsr::numerics {

/// Modified Bessel function of the second kind, order 0.
/// Valid for x > 0; relative accuracy better than 1e-12 on [1e-6, 700].
double bessel_k0(double x);

/// Modified Bessel function of the second kind, order 1.
double bessel_k1(double x);

/// x * K1(x), stable for both very small and very large x.
double bessel_k1_scaled_by_x(double x);

/// Nodes of the Q-point Chebyshev rule, x_q = cos((2q-1)pi/(2Q)).
/// Used to approximate integrals of the form
///   int_{-1}^{1} g(x) dx ~ (pi/Q) * sum_q sqrt(1-x_q^2) g(x_q).
struct QuadratureRule {
  int order = 0;
  std::vector<double> nodes;  // strictly decreasing, all in (-1, 1)
};

QuadratureRule chebyshev_nodes(int order);

struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Adaptive integral of f over (a, b) via tanh-sinh level doubling.
/// Endpoints are never evaluated, so integrable divergence at either end
/// is handled. Throws IntegrationError if the level budget is exhausted
/// before |I_k - I_{k-1}| <= tol * max(1, |I_k|).
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol);

struct BracketError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Root of f on [lo, hi] with f(lo)*f(hi) < 0. Brent-style iteration;
/// returns x with |f(x)| <= tol (or the bisection limit of the bracket).
double find_root_bracketed(const std::function<double(double)>& f, double lo,
                           double hi, double tol);

/// Counter-seeded xoshiro256++ stream. Identical (seed, stream_id) pairs
/// reproduce identical draw sequences on every platform; distinct stream
/// ids give statistically independent streams.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform();
  /// Standard normal via Box-Muller (no libc distribution involved).
  double gaussian();
  /// CN(0,1): unit-variance circularly-symmetric complex Gaussian.
  std::complex<double> cgaussian();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::array<std::uint64_t, 4> state_{};
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace covertsr::numerics
