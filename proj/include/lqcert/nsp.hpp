#pragma once

// Null space analysis: kernel basis, the l_q null space constant
//   gamma = sup { ||h_S||_q / ||h_{S^c}||_q : Ah = 0, h != 0, #S <= s },
// its upper bound a(q, delta_1)/delta_1 from the RIP constant, and the
// exact-recovery exponent estimate q_s(A).
//
// Kernel dimension 1 is solved exactly. For dimension >= 2 the supremum is
// nonconvex and only a lower bound from multi-start local search is
// reported (certified = false).

#include "lqcert/core.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace lqcert::nsp {

/// Orthonormal basis of null(A), one column per basis vector; rank decided
/// at 1e-10 relative to the largest singular value. Each column's
/// largest-magnitude entry is made positive.
Eigen::MatrixXd kernel_basis(const DenseMatrix& a, double rank_tol = 1e-10);

/// ||h_S||_q / ||h_{S^c}||_q with S the top-s magnitudes of h (the worst
/// support for this h). Returns +inf when h is s-sparse and nonzero.
double top_s_ratio(const SignalVector& h, std::size_t s, double q);

struct NspOptions {
  std::size_t starts = 64;
  std::uint64_t seed = 0;
  /// Kernel directions with d-1 vanishing entries are used as extra starts
  /// while C(n, d-1) stays under this cap.
  std::uint64_t vertex_budget = 20'000;
  /// When set and in (0, 1), rip_bound = a(q, delta_1)/delta_1.
  std::optional<double> delta2s;
};

struct NspReport {
  std::size_t s = 1;
  double q = 1.0;
  double gamma_lower = 0.0;
  double gamma_estimate = 0.0;
  bool certified = false;
  std::optional<double> rip_bound;
  std::size_t kernel_dimension = 0;
  SignalVector witness;  ///< kernel vector attaining gamma_estimate
};

NspReport nsp_gamma(const DenseMatrix& a, std::size_t s, double q, const NspOptions& opts = {});

struct QsEstimate {
  double value = 0.0;
  bool certified = false;  ///< every gamma evaluation was exact
  std::string diagnostic;
};

struct QsOptions {
  std::size_t grid_points = 256;  ///< q_k = k / grid_points
  double tol = 1e-6;
  double margin = 1e-9;  ///< success means gamma < 1 - margin
  NspOptions nsp;
};

/// Largest q with gamma(A, s, q) < 1 (strict NSP as the computable proxy for
/// uniform exact l_q recovery), by grid scan and bisection.
QsEstimate q_s_estimate(const DenseMatrix& a, std::size_t s, const QsOptions& opts = {});

}  // namespace lqcert::nsp
