#pragma once

// l_q minimization, 0 < q <= 1:
//   equality constrained   min ||y||_q  s.t.  A y = z
//   noise constrained      min ||y||_q  s.t.  ||A y - z||_2 <= eps
// by iteratively reweighted least squares (a local method), plus an
// exhaustive support-enumeration oracle for small instances.

#include "lqcert/core.hpp"

#include <cstdint>
#include <vector>

namespace lqcert::solver {

struct SolverOptions {
  double q = 1.0;
  std::size_t max_iterations = 200;
  double epsilon_floor = 1e-10;
  double convergence_tol = 1e-9;
  std::size_t restarts = 5;
  std::uint64_t seed = 0;
  /// Sparsity level K in the smoothing rule eps <- min(eps, r_{K+1}(x)/n);
  /// 0 means m/2.
  std::size_t sparsity = 0;
  /// Record the smoothed surrogate sum (x_i^2 + eps^2)^{q/2} per iteration.
  bool record_history = false;
};

struct RecoveryOutcome {
  SignalVector x_hat;
  double objective = 0.0;  ///< sum_i |x_hat_i|^q
  double feasibility_residual = 0.0;  ///< ||A x_hat - z||_2
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> surrogate_history;  ///< best restart, when recorded
};

/// Absolute feasibility tolerance used for A y = z: 1e-8 * max(1, ||z||_2).
double equality_tolerance(const SignalVector& z);

/// Throws std::domain_error for bad options or shapes and lqcert::Infeasible
/// when z is not in range(A) within equality_tolerance(z).
RecoveryOutcome irls_equality(const DenseMatrix& a, const SignalVector& z, const SolverOptions& opts);

/// Noise-constrained problem via penalized reweighting, with the penalty
/// bisected so the residual lands in [0.99 eps, eps]. eps = 0 delegates to
/// irls_equality. Throws lqcert::Infeasible when eps is below the smallest
/// attainable residual.
RecoveryOutcome irls_noisy(const DenseMatrix& a, const SignalVector& y, double epsilon, const SolverOptions& opts);

struct BruteForceResult {
  RecoveryOutcome outcome;
  bool feasible = false;
  /// Another candidate with a different x reaches the same objective within
  /// 1e-9; the decoder is set-valued on this instance.
  bool tie = false;
  std::size_t tied_candidates = 1;
  /// s_max >= rank(A): some global minimizer has support <= rank(A), so the
  /// result is the global minimum. Otherwise it is a restricted oracle.
  bool global = false;
  std::uint64_t supports_examined = 0;
};

/// Minimum of sum |y_i|^q over feasible y supported on at most s_max indices.
/// Throws lqcert::BudgetExceeded when sum_{k <= s_max} C(n, k) > budget.
BruteForceResult brute_force_lq_min(const DenseMatrix& a, const SignalVector& z, double q, std::size_t s_max,
                                    std::uint64_t budget = 100'000);

}  // namespace lqcert::solver
