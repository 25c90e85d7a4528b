#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "covertsr/channel.hpp"

namespace covertsr::sdp {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

enum class Relation { le, eq, ge };

/// Linear constraint Tr(a V) + scalar_coeffs . s  (rel)  bound, with `a`
/// Hermitian and `s` the problem's nonnegative scalar variables.
struct Constraint {
  MatrixXcd a;
  Relation rel = Relation::eq;
  double bound = 0.0;
  VectorXd scalar_coeffs;  // empty means all-zero
};

/// Small dense PSD program over a Hermitian matrix variable V (dimension n)
/// and optionally a few auxiliary nonnegative scalars:
///   max/min  Tr(c V) + scalar_costs . s
///   s.t.     constraints, V >= 0, s >= 0,
///            V_(m,m) = 1 for all m when unit_diagonal is set.
struct SdpProblem {
  int n = 0;
  MatrixXcd c;
  bool maximize = true;
  bool unit_diagonal = true;
  std::vector<Constraint> constraints;
  int num_scalars = 0;
  VectorXd scalar_costs;  // empty means all-zero

  void add(const MatrixXcd& a, Relation rel, double bound,
           const VectorXd& scalar_coeffs = VectorXd());
};

enum class SdpStatus { optimal, infeasible, max_iter, relaxation_failure };

struct SdpSolution {
  MatrixXcd v;
  VectorXd scalars;
  double objective = 0.0;       // in the problem's own sense
  double dual_objective = 0.0;  // dual bound (max sense: objective <= dual)
  SdpStatus status = SdpStatus::max_iter;
  double rank_ratio = 0.0;      // lambda_max(V) / Tr(V)
  double gap = 0.0;             // final complementarity
  int iterations = 0;
  double final_delta = 0.0;     // rank-relaxation parameter (srocr only)
};

/// Primal-dual interior-point solve (Mehrotra predictor-corrector with the
/// HKM direction over the Hermitian cone plus a nonnegative block for slacks
/// and scalars). Intended for n up to ~128.
SdpSolution solve_sdp(const SdpProblem& problem, double tol = 1e-8);

struct SrocrSchedule {
  double step0 = 0.1;
  double min_step = 1e-5;  // small enough for the step halving to bridge the
                           // last gap to the rank-ratio target
  double target_ratio = 0.999;
  int max_outer = 200;
};

/// Sequential rank-one constraint relaxation: repeatedly re-solves the
/// program augmented with u^H V u >= delta Tr(V), u the principal
/// eigenvector of the previous solution, delta stepping from 0 toward 1
/// (step halved when the augmented program stops being solvable).
SdpSolution srocr(const SdpProblem& problem, const SrocrSchedule& schedule,
                  double tol = 1e-8);

/// Principal eigenvector of V, first M entries rotated by the conjugate
/// phase of the last entry and projected entrywise to unit modulus.
/// Requires rank_ratio >= 0.9; throws when the top eigenvalue is degenerate.
channel::PhaseProfile extract_phase(const SdpSolution& solution);

/// Plain-text dump of (C, A_i, b_i) for cross-checking against an external
/// solver; format documented in the README.
void dump_problem(const SdpProblem& problem, std::ostream& os);

}  // namespace covertsr::sdp
