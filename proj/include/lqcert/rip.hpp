#pragma once

// Restricted isometry analysis of small matrices by enumerating column
// subsets: frame bounds on Sigma_s, the RIP constant delta_s, the rescaling
// that turns frame bounds into a RIP constant, and unique determination.
//
// When C(n, s) exceeds the budget the enumeration falls back to uniformly
// sampled subsets. Sampled results are NOT certificates: alpha is then an
// upper bound, beta and delta lower bounds of the true values, and
// `certified` is false.

#include "lqcert/core.hpp"

#include <cstdint>
#include <string>

namespace lqcert::rip {

struct RipOptions {
  std::uint64_t budget = 1'000'000;  ///< max subsets for exhaustive mode
  std::size_t sample_count = 20'000;  ///< subsets drawn in sampled mode
  std::uint64_t seed = 0;
  double rank_tol = 1e-10;  ///< relative to the largest singular value
};

struct FrameBounds {
  double alpha = 0.0;
  double beta = 0.0;
  bool certified = false;
  std::uint64_t subsets_examined = 0;
};

struct RipReport {
  std::size_t order = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  bool certified = false;
  std::uint64_t subsets_examined = 0;
};

/// alpha^2 = min over |S| = s of lambda_min(A_S^T A_S), beta^2 = max of
/// lambda_max.
FrameBounds frame_bounds(const DenseMatrix& a, std::size_t s, const RipOptions& opts = {});

/// delta_s = max over |S| = s of max |lambda(A_S^T A_S) - 1|.
RipReport rip_constant(const DenseMatrix& a, std::size_t s, const RipOptions& opts = {});

struct Rescaled {
  DenseMatrix matrix;
  double delta = 0.0;  ///< (beta^2 - alpha^2) / (alpha^2 + beta^2)
  double scale = 1.0;  ///< sqrt(2 / (alpha^2 + beta^2))
  FrameBounds bounds;
};

/// B = sqrt(2/(alpha^2 + beta^2)) A with frame bounds at order s. Throws
/// std::domain_error when alpha = 0 (some s-sparse vector lies in the kernel).
Rescaled rescale_to_rip(const DenseMatrix& a, std::size_t s, const RipOptions& opts = {});

struct UniqueDetermination {
  bool determined = false;
  bool rank_path = false;   ///< every 2s-column submatrix has full column rank
  bool alpha_path = false;  ///< frame_bounds(A, 2s).alpha > rank_tol * beta
  bool paths_agree = false;
  bool certified = false;
  std::string explanation;
};

/// Whether A x determines every s-sparse x, checked two independent ways.
UniqueDetermination unique_determination(const DenseMatrix& a, std::size_t s, const RipOptions& opts = {});

struct CorrelationCheck {
  double max_ratio = 0.0;
  double delta2s = 0.0;
  std::size_t trials = 0;
  std::size_t violations = 0;  ///< trials with ratio > delta2s + 1e-10
  bool holds() const { return violations == 0; }
};

/// Samples disjointly supported s-sparse pairs (u, v) and records
/// |<Au, Av>| / (||u||_2 ||v||_2), which never exceeds delta_2s.
CorrelationCheck disjoint_correlation_check(const DenseMatrix& a, std::size_t s, double delta2s,
                                            std::size_t trials, std::uint64_t seed);

}  // namespace lqcert::rip
