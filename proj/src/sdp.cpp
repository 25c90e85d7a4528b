#include "covertsr/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <cstdio>
#include <cstdlib>

namespace covertsr::sdp {

void SdpProblem::add(const MatrixXcd& a, Relation rel, double bound,
                     const VectorXd& scalar_coeffs) {
  Constraint c;
  c.a = a;
  c.rel = rel;
  c.bound = bound;
  c.scalar_coeffs = scalar_coeffs;
  constraints.push_back(std::move(c));
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Variable over the product cone H^n_+ x R^k_+.
struct Block {
  MatrixXcd s;
  VectorXd d;

  static Block zero(int n, int k) {
    return {MatrixXcd::Zero(n, n), VectorXd::Zero(k)};
  }
  static Block identity(int n, int k, double scale_s, double scale_d) {
    return {scale_s * MatrixXcd::Identity(n, n),
            VectorXd::Constant(k, scale_d)};
  }
  void hermitize() { s = 0.5 * (s + s.adjoint()).eval(); }
};

double dot(const Block& a, const Block& b) {
  // both s-parts Hermitian, so the trace inner product is real
  const double sd = (a.s.array().conjugate() * b.s.array()).sum().real();
  return sd + a.d.dot(b.d);
}

double norm(const Block& a) { return std::sqrt(std::max(0.0, dot(a, a))); }

Block add_scaled(const Block& a, double w, const Block& b) {
  return {a.s + w * b.s, a.d + w * b.d};
}

// trace inner product of a Hermitian matrix with a general complex matrix
double re_tr(const MatrixXcd& herm, const MatrixXcd& general) {
  return (herm.transpose().array() * general.array()).sum().real();
}

// Standard-form data: min <C,X> s.t. <A_i,X> = b_i, X in the product cone.
struct Compiled {
  int n = 0;            // Hermitian dimension
  int k = 0;            // LP dimension (scalars + slacks)
  int m = 0;            // constraints
  Block c;
  std::vector<Block> a;
  VectorXd b;
  VectorXd row_scale;   // original row i was divided by row_scale[i]
  double obj_scale = 1; // original objective divided by obj_scale
  double obj_sign = 1;  // -1 when the public problem maximizes
};

Compiled compile(const SdpProblem& p) {
  if (p.n < 1) throw std::invalid_argument("sdp: n >= 1 required");
  Compiled cp;
  cp.n = p.n;
  const int n_ineq = static_cast<int>(std::count_if(
      p.constraints.begin(), p.constraints.end(),
      [](const Constraint& c) { return c.rel != Relation::eq; }));
  cp.k = p.num_scalars + n_ineq;
  cp.m = static_cast<int>(p.constraints.size()) + (p.unit_diagonal ? p.n : 0);

  cp.obj_sign = p.maximize ? -1.0 : 1.0;
  cp.c = Block::zero(cp.n, cp.k);
  if (p.c.size() > 0) {
    if (p.c.rows() != p.n || p.c.cols() != p.n) {
      throw std::invalid_argument("sdp: objective dimension mismatch");
    }
    cp.c.s = cp.obj_sign * 0.5 * (p.c + p.c.adjoint());
  }
  for (int t = 0; t < p.num_scalars && t < p.scalar_costs.size(); ++t) {
    cp.c.d[t] = cp.obj_sign * p.scalar_costs[t];
  }
  const double c_norm = norm(cp.c);
  cp.obj_scale = c_norm > 1e-30 ? c_norm : 1.0;
  cp.c.s *= 1.0 / cp.obj_scale;
  cp.c.d *= 1.0 / cp.obj_scale;

  cp.a.reserve(cp.m);
  cp.b.resize(cp.m);
  cp.row_scale.resize(cp.m);
  int slack = p.num_scalars;
  int row = 0;
  for (const auto& con : p.constraints) {
    Block a = Block::zero(cp.n, cp.k);
    if (con.a.size() > 0) {
      if (con.a.rows() != p.n || con.a.cols() != p.n) {
        throw std::invalid_argument("sdp: constraint dimension mismatch");
      }
      a.s = 0.5 * (con.a + con.a.adjoint());
    }
    for (int t = 0; t < con.scalar_coeffs.size() && t < p.num_scalars; ++t) {
      a.d[t] = con.scalar_coeffs[t];
    }
    if (con.rel == Relation::le) a.d[slack++] = 1.0;
    if (con.rel == Relation::ge) a.d[slack++] = -1.0;
    const double scale = std::max(norm(a), 1e-12);
    a.s *= 1.0 / scale;
    a.d *= 1.0 / scale;
    cp.a.push_back(std::move(a));
    cp.b[row] = con.bound / scale;
    cp.row_scale[row] = scale;
    ++row;
  }
  if (p.unit_diagonal) {
    for (int mdx = 0; mdx < p.n; ++mdx) {
      Block a = Block::zero(cp.n, cp.k);
      a.s(mdx, mdx) = 1.0;
      cp.a.push_back(std::move(a));
      cp.b[row] = 1.0;
      cp.row_scale[row] = 1.0;
      ++row;
    }
  }
  return cp;
}

struct Inverse {
  MatrixXcd s;
  VectorXd d;
};

bool invert(const Block& z, Inverse& out) {
  Eigen::LLT<MatrixXcd> llt(z.s);
  if (llt.info() != Eigen::Success) return false;
  out.s = llt.solve(MatrixXcd::Identity(z.s.rows(), z.s.cols()));
  out.s = 0.5 * (out.s + out.s.adjoint()).eval();
  out.d = z.d.cwiseInverse();
  return true;
}

// Largest step length t with X + t dX staying in the cone (0.98 backoff
// applied by the caller).
double max_step(const Block& x, const Block& dx) {
  double t = kInf;
  if (x.s.rows() > 0) {
    Eigen::LLT<MatrixXcd> llt(x.s);
    if (llt.info() != Eigen::Success) return 0.0;
    const MatrixXcd l = llt.matrixL();
    MatrixXcd w = l.triangularView<Eigen::Lower>().solve(dx.s);
    w = l.triangularView<Eigen::Lower>()
            .solve(w.adjoint().eval())
            .adjoint()
            .eval();
    w = 0.5 * (w + w.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(w, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    if (lmin < 0.0) t = std::min(t, -1.0 / lmin);
  }
  for (int i = 0; i < x.d.size(); ++i) {
    if (dx.d[i] < 0.0) t = std::min(t, -x.d[i] / dx.d[i]);
  }
  return t;
}

struct IpmState {
  Block x, z;
  VectorXd y;
};

// One Schur solve of the HKM system for given sigma*mu and corrector terms.
struct Direction {
  Block dx, dz;
  VectorXd dy;
};

class HkmSolver {
 public:
  HkmSolver(const Compiled& cp, double tol) : cp_(cp), tol_(tol) {}

  static void trace_break(const char* where) {
    if (std::getenv("COVERTSR_SDP_TRACE")) {
      std::fprintf(stderr, "sdp: break at %s\n", where);
    }
  }

  SdpStatus run(IpmState& st, int max_iter, int* iters_out, double* gap_out) {
    const int n_total = cp_.n + cp_.k;
    SdpStatus status = SdpStatus::max_iter;
    int it = 0;
    for (; it < max_iter; ++it) {
      Block rd = residual_dual(st);
      VectorXd rp = residual_primal(st);
      const double mu = dot(st.x, st.z) / n_total;
      const double pobj = dot(cp_.c, st.x);
      const double dobj = cp_.b.dot(st.y);
      const double rel_gap =
          std::fabs(pobj - dobj) / (1.0 + std::fabs(pobj) + std::fabs(dobj));
      const double pinf = rp.norm() / (1.0 + cp_.b.norm());
      const double dinf = norm(rd) / (1.0 + norm(cp_.c));
      if (rel_gap <= tol_ && pinf <= tol_ && dinf <= tol_) {
        status = SdpStatus::optimal;
        break;
      }
      if (primal_infeasibility_certificate(st)) {
        status = SdpStatus::infeasible;
        break;
      }

      Inverse zinv;
      if (!invert(st.z, zinv)) { trace_break("zinv"); break; }
      Eigen::PartialPivLU<Eigen::MatrixXd> schur_lu;
      if (!factor_schur(st, zinv, schur_lu)) { trace_break("schur"); break; }

      // predictor: sigma = 0, no corrector
      Direction aff;
      if (!solve_direction(st, zinv, schur_lu, rd, 0.0, nullptr, aff)) {
        trace_break("affine");
        break;
      }
      const double ap_aff = std::min(1.0, 0.98 * max_step(st.x, aff.dx));
      const double ad_aff = std::min(1.0, 0.98 * max_step(st.z, aff.dz));
      const double mu_aff = dot(add_scaled(st.x, ap_aff, aff.dx),
                                add_scaled(st.z, ad_aff, aff.dz)) /
                            n_total;
      double sigma = std::pow(std::max(0.0, mu_aff / mu), 3.0);
      sigma = std::min(1.0, std::max(sigma, 1e-8));

      Direction dir;
      if (!solve_direction(st, zinv, schur_lu, rd, sigma * mu, &aff, dir)) {
        trace_break("corrector");
        break;
      }
      double ap = std::min(1.0, 0.98 * max_step(st.x, dir.dx));
      double ad = std::min(1.0, 0.98 * max_step(st.z, dir.dz));
      if (!(ap > 0.0) || !(ad > 0.0)) { trace_break("steplen"); break; }

      st.x = add_scaled(st.x, ap, dir.dx);
      st.z = add_scaled(st.z, ad, dir.dz);
      st.y += ad * dir.dy;
      st.x.hermitize();
      st.z.hermitize();
      if (!std::isfinite(dot(st.x, st.z))) { trace_break("nan-update"); break; }

      if (ap < 1e-6 && ad < 1e-6) {
        ++stall_;
        if (stall_ >= 5) break;
      } else {
        stall_ = 0;
      }
    }
    if (iters_out) *iters_out = it;
    if (gap_out) *gap_out = dot(st.x, st.z);
    // classify an unfinished run that still carries a Farkas certificate
    if (status == SdpStatus::max_iter && primal_infeasibility_certificate(st)) {
      status = SdpStatus::infeasible;
    }
    return status;
  }

 private:
  VectorXd residual_primal(const IpmState& st) const {
    VectorXd rp(cp_.m);
    for (int i = 0; i < cp_.m; ++i) rp[i] = cp_.b[i] - dot(cp_.a[i], st.x);
    return rp;
  }

  Block residual_dual(const IpmState& st) const {
    Block rd = cp_.c;
    rd = add_scaled(rd, -1.0, st.z);
    for (int i = 0; i < cp_.m; ++i) rd = add_scaled(rd, -st.y[i], cp_.a[i]);
    return rd;
  }

  bool primal_infeasibility_certificate(const IpmState& st) const {
    // Farkas ray: y with sum_i y_i A_i + Z ~ 0, Z >= 0 and b.y > 0 rules out
    // any primal-feasible X; constraint rows are normalized so the relative
    // test below is scale-free
    const double by = cp_.b.dot(st.y);
    if (!(by > 1e-6 * (1.0 + cp_.b.norm()))) return false;
    Block ray = st.z;
    for (int i = 0; i < cp_.m; ++i) ray = add_scaled(ray, st.y[i], cp_.a[i]);
    return norm(ray) < 1e-4 * by;
  }

  bool factor_schur(const IpmState& st, const Inverse& zinv,
                    Eigen::PartialPivLU<Eigen::MatrixXd>& lu) {
    bj_.resize(cp_.m);
    Eigen::MatrixXd mm(cp_.m, cp_.m);
    for (int j = 0; j < cp_.m; ++j) {
      bj_[j] = st.x.s * cp_.a[j].s * zinv.s;
    }
    const VectorXd lp_weight = st.x.d.cwiseProduct(zinv.d);
    for (int i = 0; i < cp_.m; ++i) {
      for (int j = 0; j < cp_.m; ++j) {
        double v = re_tr(cp_.a[i].s, bj_[j]);
        v += cp_.a[i].d.cwiseProduct(cp_.a[j].d).dot(lp_weight);
        mm(i, j) = v;
      }
    }
    // HKM Schur complements are mildly nonsymmetric; symmetrizing keeps the
    // factorization stable without changing the converged solution
    mm = 0.5 * (mm + mm.transpose()).eval();
    mm.diagonal().array() += 1e-13 * (1.0 + mm.diagonal().cwiseAbs().maxCoeff());
    lu.compute(mm);
    return mm.allFinite();
  }

  bool solve_direction(const IpmState& st, const Inverse& zinv,
                       const Eigen::PartialPivLU<Eigen::MatrixXd>& lu,
                       const Block& rd, double sigma_mu, const Direction* aff,
                       Direction& out) {
    VectorXd rhs(cp_.m);
    // corrector term dXa dZa carried through Zinv
    MatrixXcd corr_s;
    VectorXd corr_d;
    if (aff) {
      corr_s = aff->dx.s * aff->dz.s;
      corr_d = aff->dx.d.cwiseProduct(aff->dz.d);
    }
    for (int i = 0; i < cp_.m; ++i) {
      double v = cp_.b[i];
      v += re_tr(cp_.a[i].s, st.x.s * rd.s * zinv.s);
      v += cp_.a[i].d.cwiseProduct(st.x.d).cwiseProduct(rd.d).dot(zinv.d);
      v -= sigma_mu * (re_tr(cp_.a[i].s, zinv.s) + cp_.a[i].d.dot(zinv.d));
      if (aff) {
        v += re_tr(cp_.a[i].s, corr_s * zinv.s);
        v += cp_.a[i].d.cwiseProduct(corr_d).dot(zinv.d);
      }
      rhs[i] = v;
    }
    out.dy = lu.solve(rhs);
    if (!out.dy.allFinite()) return false;

    out.dz = rd;
    for (int i = 0; i < cp_.m; ++i) {
      out.dz = add_scaled(out.dz, -out.dy[i], cp_.a[i]);
    }
    // dX = H(sigma mu Zinv - X - X dZ Zinv - dXa dZa Zinv)
    MatrixXcd dxs = sigma_mu * zinv.s - st.x.s - st.x.s * out.dz.s * zinv.s;
    VectorXd dxd = (VectorXd::Constant(cp_.k, sigma_mu) -
                    st.x.d.cwiseProduct(st.z.d) -
                    st.x.d.cwiseProduct(out.dz.d))
                       .cwiseProduct(zinv.d);
    // note the LP line folds X - x z / z into one expression
    if (aff) {
      dxs -= corr_s * zinv.s;
      dxd -= corr_d.cwiseProduct(zinv.d);
    }
    out.dx.s = 0.5 * (dxs + dxs.adjoint());
    out.dx.d = dxd;
    return out.dx.s.allFinite() && out.dx.d.allFinite();
  }

  const Compiled& cp_;
  double tol_;
  int stall_ = 0;
  std::vector<MatrixXcd> bj_;
};

double rank_ratio_of(const MatrixXcd& v) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(v, Eigen::EigenvaluesOnly);
  const double tr = std::max(v.trace().real(), 1e-300);
  return es.eigenvalues().maxCoeff() / tr;
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& problem, double tol) {
  const Compiled cp = compile(problem);

  IpmState st;
  double b_over_a = 1.0;
  for (int i = 0; i < cp.m; ++i) {
    b_over_a = std::max(b_over_a, std::fabs(cp.b[i]) / 2.0);
  }
  const double scale_p =
      std::max({10.0, std::sqrt(double(cp.n + cp.k)), double(cp.n) * b_over_a});
  const double scale_d =
      std::max({10.0, std::sqrt(double(cp.n + cp.k)), norm(cp.c)});
  st.x = Block::identity(cp.n, cp.k, scale_p, scale_p);
  st.z = Block::identity(cp.n, cp.k, scale_d, scale_d);
  st.y = VectorXd::Zero(cp.m);

  HkmSolver solver(cp, tol);
  SdpSolution sol;
  const SdpStatus status = solver.run(st, 100, &sol.iterations, &sol.gap);
  sol.status = status;
  sol.v = st.x.s;
  sol.scalars = st.x.d.head(problem.num_scalars);
  const double sense = problem.maximize ? -1.0 : 1.0;
  sol.objective = sense * dot(cp.c, st.x) * cp.obj_scale;
  sol.dual_objective = sense * cp.b.dot(st.y) * cp.obj_scale;
  sol.rank_ratio = rank_ratio_of(sol.v);
  return sol;
}

namespace {

// completion fallback: when the relaxation ladder stalls near rank one, the
// entrywise-projected principal eigenvector often is an exactly feasible
// rank-one point; adopt its lift when every constraint accepts it
bool try_rank_one_completion(const SdpProblem& problem, SdpSolution& sol,
                             double rel_tol) {
  if (problem.num_scalars > 0) return false;
  if (sol.rank_ratio < 0.9) return false;
  channel::PhaseProfile phase;
  try {
    phase = extract_phase(sol);
  } catch (const std::exception&) {
    return false;
  }
  const MatrixXcd lifted = channel::lift_phase_vector(phase.unit_vector());
  auto value_of = [&](const MatrixXcd& a) {
    return (a.transpose().cwiseProduct(lifted)).sum().real();
  };
  for (const auto& con : problem.constraints) {
    if (con.a.size() == 0) continue;
    const double lhs = value_of(con.a);
    const double slack = rel_tol * std::max(1.0, std::fabs(con.bound));
    if (con.rel == Relation::eq && std::fabs(lhs - con.bound) > slack) return false;
    if (con.rel == Relation::le && lhs > con.bound + slack) return false;
    if (con.rel == Relation::ge && lhs < con.bound - slack) return false;
  }
  double objective = 0.0;
  if (problem.c.size() > 0) objective = value_of(problem.c);
  sol.v = lifted;
  sol.objective = objective;
  sol.rank_ratio = 1.0;
  sol.status = SdpStatus::optimal;
  return true;
}

}  // namespace

SdpSolution srocr(const SdpProblem& problem, const SrocrSchedule& schedule,
                  double tol) {
  SdpSolution sol = solve_sdp(problem, tol);
  if (sol.status != SdpStatus::optimal) return sol;

  double delta = 0.0;
  double step = schedule.step0;
  auto augmented = [&](const VectorXcd& u, double d) {
    SdpProblem aug = problem;
    MatrixXcd a = u * u.adjoint();
    a -= d * MatrixXcd::Identity(problem.n, problem.n);
    aug.add(a, Relation::ge, 0.0);
    return aug;
  };
  auto principal = [&](const MatrixXcd& v) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(v);
    return VectorXcd(es.eigenvectors().col(problem.n - 1));
  };

  for (int outer = 0; outer < schedule.max_outer; ++outer) {
    if (sol.rank_ratio >= schedule.target_ratio) {
      if (delta < 1.0) {
        // try to certify the fully tightened program once
        SdpSolution final_try =
            solve_sdp(augmented(principal(sol.v), 1.0), tol);
        if (final_try.status == SdpStatus::optimal &&
            final_try.rank_ratio >= schedule.target_ratio) {
          sol = final_try;
          delta = 1.0;
        }
      }
      sol.final_delta = delta;
      sol.status = SdpStatus::optimal;
      return sol;
    }
    const double delta_try = std::min(1.0, delta + step);
    SdpSolution next = solve_sdp(augmented(principal(sol.v), delta_try), tol);
    if (next.status == SdpStatus::optimal) {
      delta = delta_try;
      sol = next;
      sol.final_delta = delta;
    } else {
      step *= 0.5;
      if (step < schedule.min_step) {
        if (try_rank_one_completion(problem, sol, 1e-6)) {
          sol.final_delta = 1.0;
          return sol;
        }
        sol.status = SdpStatus::relaxation_failure;
        sol.final_delta = delta;
        return sol;
      }
    }
  }
  if (sol.rank_ratio >= schedule.target_ratio) {
    sol.status = SdpStatus::optimal;
  } else if (try_rank_one_completion(problem, sol, 1e-6)) {
    sol.final_delta = 1.0;
  } else {
    sol.status = SdpStatus::relaxation_failure;
  }
  return sol;
}

channel::PhaseProfile extract_phase(const SdpSolution& solution) {
  const int n = static_cast<int>(solution.v.rows());
  const int m = n - 1;
  if (m < 1) throw std::invalid_argument("extract_phase: need n >= 2");
  if (solution.rank_ratio < 0.9) {
    throw std::runtime_error("extract_phase: solution is not near rank one");
  }
  if (m == 1) return channel::PhaseProfile::zeros(1);  // single-element convention

  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(solution.v);
  const auto& evals = es.eigenvalues();
  const double top = evals(n - 1);
  if (n >= 2 && top - evals(n - 2) <= 1e-10 * std::max(1.0, top)) {
    throw std::runtime_error("extract_phase: degenerate principal eigenvalue");
  }
  VectorXcd w = es.eigenvectors().col(n - 1);
  const std::complex<double> last = w[m];
  if (std::abs(last) > 1e-14 * w.norm()) {
    w *= std::conj(last) / std::abs(last);
  }
  VectorXcd v(m);
  for (int i = 0; i < m; ++i) {
    const double mod = std::abs(w[i]);
    v[i] = mod > 1e-14 * w.norm() ? w[i] / mod : std::complex<double>{1.0, 0.0};
  }
  return channel::PhaseProfile::from_unit_vector(v);
}

void dump_problem(const SdpProblem& problem, std::ostream& os) {
  const auto put_matrix = [&os](const MatrixXcd& a) {
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      for (Eigen::Index c = 0; c < a.cols(); ++c) {
        if (c) os << ' ';
        os << a(r, c).real() << (a(r, c).imag() >= 0 ? "+" : "")
           << a(r, c).imag() << 'j';
      }
      os << '\n';
    }
  };
  os << "sdp n " << problem.n << " scalars " << problem.num_scalars << " sense "
     << (problem.maximize ? "max" : "min") << " unit_diagonal "
     << (problem.unit_diagonal ? 1 : 0) << '\n';
  os << "objective\n";
  if (problem.c.size() > 0) {
    put_matrix(problem.c);
  } else {
    put_matrix(MatrixXcd::Zero(problem.n, problem.n));
  }
  int idx = 0;
  for (const auto& con : problem.constraints) {
    const char* rel = con.rel == Relation::le   ? "<="
                      : con.rel == Relation::eq ? "=="
                                                : ">=";
    os << "constraint " << idx++ << ' ' << rel << ' ' << con.bound << '\n';
    put_matrix(con.a);
    if (con.scalar_coeffs.size() > 0) {
      os << "scalar_coeffs";
      for (Eigen::Index t = 0; t < con.scalar_coeffs.size(); ++t) {
        os << ' ' << con.scalar_coeffs[t];
      }
      os << '\n';
    }
  }
}

}  // namespace covertsr::sdp
