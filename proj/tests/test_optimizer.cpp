#include <doctest.h>

#include <cmath>
#include <vector>

#include "covertsr/optimizer.hpp"
#include "oracles.hpp"

using namespace covertsr;
using channel::MatrixXcd;
using channel::PhaseProfile;
using channel::SystemConfig;
using channel::VectorXcd;
using numerics::RngStream;

namespace {

SystemConfig close_range_config(int m) {
  SystemConfig cfg;
  cfg.irs_elements = m;
  cfg.pos_source = {0.0, 0.0};
  cfg.pos_backscatter = {2.0, 0.0};
  cfg.pos_irs = {2.0, 0.5};
  cfg.pos_receiver = {4.0, 0.0};
  cfg.pos_warden = {4.5, 0.0};
  return cfg;
}

// weak-power variant where the alpha bounds land well inside (0, 1]
SystemConfig covert_link_config(int m) {
  SystemConfig cfg = close_range_config(m);
  cfg.p_max_w = 1e-5;
  cfg.eps_c = 3.0;
  cfg.eps_sic = 1.0;
  return cfg;
}

// doubles L until the minorant holds on one fixed set of unit-modulus samples
double backtrack_until_minorant(optimizer::Surrogate& s, const MatrixXcd& g_sb,
                                const MatrixXcd& g_br, const VectorXcd& v0,
                                const std::vector<VectorXcd>& samples) {
  double lipschitz = s.lipschitz;
  for (int tries = 0; tries < 80; ++tries) {
    s = optimizer::build_surrogate(v0, g_sb, g_br, lipschitz);
    bool ok = true;
    for (const auto& v : samples) {
      const double gap = optimizer::gamma_obj(v, g_sb, g_br) - s.value(v);
      if (gap < -1e-9 * std::max(1.0, std::fabs(s.value(v)))) {
        ok = false;
        break;
      }
    }
    if (ok) return lipschitz;
    lipschitz *= 2.0;
  }
  return lipschitz;
}

}  // namespace

TEST_CASE("gamma objective basics") {
  // M = 1: phase invariance
  RngStream rng(51, 0);
  SystemConfig cfg1 = close_range_config(1);
  const auto ch1 = channel::sample_channels(cfg1, rng);
  const auto lifted1 = channel::build_lifted(ch1);
  VectorXcd v1(1);
  const double base = optimizer::gamma_obj(VectorXcd::Ones(1), lifted1.g_sb,
                                           lifted1.g_br);
  for (double th = 0.0; th < 6.2; th += 0.7) {
    v1[0] = std::complex<double>{std::cos(th), std::sin(th)};
    CHECK(optimizer::gamma_obj(v1, lifted1.g_sb, lifted1.g_br) ==
          doctest::Approx(base).epsilon(1e-12));
  }

  // M = 2 all-ones channels: 4 * 4
  channel::ChannelRealization ones;
  ones.g_s = ones.g_b = ones.g_r = ones.g_w = VectorXcd::Ones(2);
  ones.d_s = ones.d_b = ones.d_r = ones.d_w = 1.0;
  const auto lifted2 = channel::build_lifted(ones);
  CHECK(optimizer::gamma_obj(VectorXcd::Ones(2), lifted2.g_sb, lifted2.g_br) ==
        doctest::Approx(16.0).epsilon(1e-12));

  // raw-channel oracle at M = 6
  SystemConfig cfg6 = close_range_config(6);
  const auto ch6 = channel::sample_channels(cfg6, rng);
  const auto lifted6 = channel::build_lifted(ch6);
  for (int rep = 0; rep < 20; ++rep) {
    const auto phase = PhaseProfile::random(6, rng);
    const VectorXcd v = phase.unit_vector();
    const auto sb = channel::cascade_gain(ch6.g_s, ch6.g_b, phase, 1.0, 1.0);
    const auto br = channel::cascade_gain(ch6.g_b, ch6.g_r, phase, 1.0, 1.0);
    CHECK(optimizer::gamma_obj(v, lifted6.g_sb, lifted6.g_br) ==
          doctest::Approx(std::norm(sb) * std::norm(br)).epsilon(1e-10));
  }
}

TEST_CASE("surrogate touches, minorizes, and matches finite differences") {
  RngStream rng(52, 0);
  SystemConfig cfg = close_range_config(6);
  const auto ch = channel::sample_channels(cfg, rng);
  const auto lifted = channel::build_lifted(ch);
  const VectorXcd v0 = PhaseProfile::random(6, rng).unit_vector();

  auto s = optimizer::build_surrogate(v0, lifted.g_sb, lifted.g_br, 2.5e-3);
  const double g0 = optimizer::gamma_obj(v0, lifted.g_sb, lifted.g_br);

  // touching at the anchor
  CHECK(s.value(v0) == doctest::Approx(g0).epsilon(1e-9));
  // the as-printed trace form disagrees with the anchored expansion and was
  // rebuilt from it; the rebuilt form matches the expansion everywhere
  CHECK(s.max_discrepancy > 1e-6 * std::max(1.0, g0));
  for (int k = 0; k < 50; ++k) {
    const VectorXcd v = PhaseProfile::random(6, rng).unit_vector();
    CHECK(s.value(v) ==
          doctest::Approx(s.lemma_value(v, lifted.g_sb, lifted.g_br))
              .epsilon(1e-9));
  }

  // analytic gradient 2 W v0 against central differences of gamma along
  // random complex directions
  const VectorXcd grad = optimizer::gamma_gradient(v0, lifted.g_sb, lifted.g_br);
  CHECK((grad - 2.0 * s.w_mat * v0).norm() <= 1e-10 * grad.norm());
  const double h = 1e-6;
  for (int dir = 0; dir < 20; ++dir) {
    VectorXcd d(6);
    for (int i = 0; i < 6; ++i) d[i] = rng.cgaussian();
    d /= d.norm();
    const double fp =
        optimizer::gamma_obj(v0 + h * d, lifted.g_sb, lifted.g_br);
    const double fm =
        optimizer::gamma_obj(v0 - h * d, lifted.g_sb, lifted.g_br);
    const double fd = (fp - fm) / (2.0 * h);
    const double an = (grad.adjoint() * d)(0, 0).real();
    CHECK(fd == doctest::Approx(an).epsilon(1e-6));
  }

  // backtracked L restores the minorant on 1000 unit-modulus samples
  RngStream check(52, 99);
  std::vector<VectorXcd> samples;
  samples.reserve(1000);
  for (int k = 0; k < 1000; ++k) {
    samples.push_back(PhaseProfile::random(6, check).unit_vector());
  }
  const double lip =
      backtrack_until_minorant(s, lifted.g_sb, lifted.g_br, v0, samples);
  CHECK(lip >= 2.5e-3);
  CHECK(s.value(v0) == doctest::Approx(g0).epsilon(1e-9));
  int violations = 0;
  for (const auto& v : samples) {
    if (optimizer::gamma_obj(v, lifted.g_sb, lifted.g_br) <
        s.value(v) - 1e-9 * std::max(1.0, std::fabs(s.value(v)))) {
      ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("taylor upper bound of the sic root term") {
  const double s2 = 1.0, p = 0.1, gsic = 0.2;
  const double cap = s2 * (1.0 + gsic) / (4.0 * p);  // trace domain limit
  const double anchor = 0.4 * cap;
  auto chi = [&](double t) {
    return std::sqrt(s2 * s2 * (1.0 + gsic) - 4.0 * s2 * p * t);
  };
  CHECK(optimizer::taylor_chi_upper(anchor, anchor, p, s2, gsic) ==
        doctest::Approx(chi(anchor)).epsilon(1e-12));
  RngStream rng(53, 0);
  for (int k = 0; k < 200; ++k) {
    const double t = 0.98 * cap * rng.uniform();
    CHECK(optimizer::taylor_chi_upper(t, anchor, p, s2, gsic) >=
          chi(t) - 1e-12);
  }
  // decreasing in the trace value
  CHECK(optimizer::taylor_chi_upper(anchor + 0.1 * cap, anchor, p, s2, gsic) <
        optimizer::taylor_chi_upper(anchor, anchor, p, s2, gsic));
  CHECK_THROWS_AS(optimizer::taylor_chi_upper(anchor, 2.0 * cap, p, s2, gsic),
                  std::domain_error);
}

TEST_CASE("psr optimization improves on random phases") {
  SystemConfig cfg = covert_link_config(8);
  RngStream ch_rng(54, 0);
  const auto ch = channel::sample_channels(cfg, ch_rng);
  RngStream init(54, 1);
  const auto result = optimizer::optimize_psr(ch, cfg, init);

  REQUIRE(result.feasible);
  CHECK(result.converged);
  CHECK(result.iterations <= 50);
  CHECK(result.p == doctest::Approx(cfg.p_max_w));
  CHECK(result.alpha > 0.0);
  CHECK(result.alpha <= 1.0);
  CHECK(result.dep.xi > 0.0);
  CHECK(result.dep.xi <= 1.0 + 1e-9);
  CHECK(result.tau > cfg.noise_power_w);

  // trace is monotone nondecreasing in the true objective
  for (std::size_t i = 1; i < result.trace.size(); ++i) {
    CHECK(result.trace[i].true_objective >=
          result.trace[i - 1].true_objective * (1.0 - 1e-12));
  }

  // the exact constraints hold at the reported phase
  const auto gains = channel::cascade_gains(ch, result.phase, cfg.path_loss);
  CHECK(rates::rate_c_psr(result.p, result.alpha, gains, cfg.noise_power_w) ==
        doctest::Approx(cfg.eps_c).epsilon(1e-9));
  CHECK(rates::rate_s_psr(result.p, result.alpha, gains, cfg.noise_power_w) >=
        cfg.eps_sic - 1e-9);

  // beats the best of 100 random phase draws on the same channels
  RngStream base(54, 2);
  double best_gamma = 0.0;
  const auto lifted = channel::build_lifted(ch);
  for (int k = 0; k < 100; ++k) {
    const VectorXcd v = PhaseProfile::random(8, base).unit_vector();
    best_gamma =
        std::max(best_gamma, optimizer::gamma_obj(v, lifted.g_sb, lifted.g_br));
  }
  CHECK(result.gamma_final >= best_gamma);
}

TEST_CASE("csr optimization in the high regime") {
  SystemConfig cfg = covert_link_config(8);
  cfg.p_max_w = 3e-5;  // keeps the primary snr above the regime split
  cfg.symbol_ratio = 2;
  RngStream ch_rng(55, 0);
  const auto ch = channel::sample_channels(cfg, ch_rng);
  RngStream init(55, 1);
  const auto result = optimizer::optimize_csr(ch, cfg, init);

  REQUIRE(result.feasible);
  CHECK(result.iterations <= 50);
  CHECK(result.alpha > 0.0);
  CHECK(result.alpha <= 1.0);
  // alpha bound trace is monotone nonincreasing
  for (std::size_t i = 1; i < result.trace.size(); ++i) {
    if (result.trace[i].regime == result.trace[i - 1].regime) {
      CHECK(result.trace[i].true_objective <=
            result.trace[i - 1].true_objective * (1.0 + 1e-12));
    }
  }
  // the exact constraints hold at the reported (phase, alpha)
  const auto gains = channel::cascade_gains(ch, result.phase, cfg.path_loss);
  CHECK(rates::rate_c_csr(result.p, result.alpha, gains, cfg.noise_power_w,
                          cfg.symbol_ratio) >= cfg.eps_c - 1e-9);
  CHECK(rates::sic_check_csr(result.p, result.alpha, gains, cfg.noise_power_w,
                             cfg.eps_sic));

  // beats the best (smallest alpha bound) of 100 random draws
  RngStream base(55, 2);
  double best_alpha = 1e300;
  for (int k = 0; k < 100; ++k) {
    const auto phase = PhaseProfile::random(8, base);
    const auto g = channel::cascade_gains(ch, phase, cfg.path_loss);
    const auto regime = strategy::snr_regime(cfg.p_max_w, g.h_sr,
                                             cfg.noise_power_w, cfg.gamma_sic());
    const auto bound =
        strategy::alpha_lower_csr(cfg.p_max_w, g, cfg.noise_power_w,
                                  cfg.gamma_sic(), cfg.symbol_ratio, cfg.eps_c,
                                  regime);
    if (bound.feasible) best_alpha = std::min(best_alpha, bound.value);
  }
  CHECK(result.alpha <= best_alpha + 1e-15);
}

namespace {
// matched low-snr instance: power calibrated so the initial phase sits
// inside the low regime window while the interference-mode constraints stay
// feasible
struct MatchedInstance {
  SystemConfig cfg;
  channel::ChannelRealization ch;
};

MatchedInstance matched_low_snr(int m, std::uint64_t seed) {
  MatchedInstance mi;
  mi.cfg = close_range_config(m);
  mi.cfg.eps_sic = 0.2;
  mi.cfg.eps_c = 0.05;
  mi.cfg.symbol_ratio = 2;
  RngStream rng(seed, 77);
  mi.ch = channel::sample_channels(mi.cfg, rng);
  // calibrate the power against the phase the optimizer will draw first, so
  // the run starts inside the low-snr window yet above the interference-mode
  // feasibility floor
  RngStream init_copy(seed, 3);
  const auto v0 = PhaseProfile::random(m, init_copy);
  const auto gains = channel::cascade_gains(mi.ch, v0, mi.cfg.path_loss);
  // 0.165 sits above the interference-mode SIC floor (~0.154) and below the
  // value where the epigraph program starts chasing the regime boundary
  // (~0.176), so the run stays in the low regime
  mi.cfg.p_max_w = 0.165 * mi.cfg.noise_power_w / std::norm(gains.h_sr);
  return mi;
}
}  // namespace

TEST_CASE("csr optimization in the low regime and iteration comparison") {
  std::vector<double> csr_its, psr_its;
  int runs = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto mi = matched_low_snr(8, seed);
    RngStream init_csr(seed, 3);
    const auto csr = optimizer::optimize_csr(mi.ch, mi.cfg, init_csr);
    RngStream init_psr(seed, 3);
    const auto psr = optimizer::optimize_psr(mi.ch, mi.cfg, init_psr);
    if (!csr.feasible || !psr.feasible) continue;
    ++runs;
    csr_its.push_back(csr.iterations);
    psr_its.push_back(psr.iterations);
    // low-regime rows must appear in the csr trace
    bool saw_low = false;
    for (const auto& row : csr.trace) {
      if (row.regime == strategy::SnrRegime::low) saw_low = true;
    }
    CHECK(saw_low);
    // final alpha respects the exact checks
    const auto gains = channel::cascade_gains(mi.ch, csr.phase, mi.cfg.path_loss);
    CHECK(rates::rate_c_csr(csr.p, csr.alpha, gains, mi.cfg.noise_power_w,
                            mi.cfg.symbol_ratio) >= mi.cfg.eps_c - 1e-9);
    CHECK(rates::sic_check_csr(csr.p, csr.alpha, gains, mi.cfg.noise_power_w,
                               mi.cfg.eps_sic));
  }
  CHECK(runs >= 3);
  // the multipath mode is not systematically faster (median comparison; the
  // acceptance suite repeats this over a larger seed set)
  auto med = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v.size() % 2 ? v[v.size() / 2]
                        : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
  };
  CHECK(med(csr_its) >= med(psr_its));
}

TEST_CASE("single-element run converges immediately") {
  SystemConfig cfg = covert_link_config(1);
  RngStream ch_rng(56, 0);
  const auto ch = channel::sample_channels(cfg, ch_rng);
  RngStream init(56, 1);
  const auto result = optimizer::optimize_psr(ch, cfg, init);
  // gamma is phase-invariant at M = 1, so one accepted step suffices
  if (result.feasible) {
    CHECK(result.iterations <= 3);
    const auto lifted = channel::build_lifted(ch);
    CHECK(result.gamma_final ==
          doctest::Approx(optimizer::gamma_obj(VectorXcd::Ones(1), lifted.g_sb,
                                               lifted.g_br))
              .epsilon(1e-9));
  }
}
