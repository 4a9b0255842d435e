#pragma once

// Numerical checks of the three inequalities behind the bound function
// a(q, delta):
//   * the closed-form supremum F_{q,a,b,c}(m, n) of
//       (n + a + sum t_k) / (n + b + sum t_k^q)^{1/q}
//     over t in [0,1]^m with sum t_k >= c, against grid search;
//   * the two-variable extension with x in [c1, 1], y in [0, c2] and
//     0 <= t_k <= y;
//   * the block-tail inequality
//       sum_{k>=1} ||a_{block k}||_2 <= a(q, delta) s^{1/2-1/q} ||a||_q
//     for nonincreasing sequences satisfying the tail hypothesis.

#include "lqcert/core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lqcert::lemmas {

struct Lemma21Instance {
  double q = 1.0;
  double a = 1.0;
  double b = 1.0;
  double c = 0.0;
  std::size_t m = 1;
  std::size_t n = 0;
};

/// Throws std::domain_error unless 0 < q <= 1, a, b > 0, 0 <= c <= 1, m >= 1.
void validate(const Lemma21Instance& inst);

/// max{ max_{1<=k<=m} (n+k+a)/(n+k+b)^{1/q}, (n+a+c)/(n+b+c^q)^{1/q} }.
double f_closed(const Lemma21Instance& inst);

struct BruteResult {
  double value = 0.0;
  /// m times the largest change of the objective along one grid step on one
  /// axis; sup - value is expected to stay below it.
  double padding = 0.0;
  std::uint64_t evaluations = 0;
};

/// Grid search over t_k in {0, 1/grid, ..., 1} with sum t_k >= c. The
/// objective is symmetric, so only sorted tuples are visited. Requires
/// m <= 5 and grid >= 32; throws lqcert::BudgetExceeded when the number of
/// sorted tuples exceeds `budget`.
BruteResult f_brute(const Lemma21Instance& inst, std::size_t grid, std::uint64_t budget = 5'000'000);

struct Lemma22Params {
  double q = 1.0;
  double a1 = 1.0, a2 = 1.0, a3 = 1.0;
  double b1 = 1.0, b2 = 1.0, b3 = 1.0;
  double c1 = 0.0, c2 = 1.0;
  std::size_t m = 0;
};

void validate(const Lemma22Params& p);

/// Closed-form coefficient on the right-hand side (four-way maximum with the
/// suprema over l = 0..m).
double lemma22_coefficient(const Lemma22Params& p);

struct Lemma22Result {
  bool passed = false;
  /// max over grid points of LHS / (coefficient * RHS^{1/q}); <= 1 to pass.
  double worst_ratio = 0.0;
  std::uint64_t points = 0;
};

/// Grid over x in [c1, 1], y in [0, c2] (grid + 1 points each) and sorted
/// tuples t_k = y * j_k / grid.
Lemma22Result lemma22_check(const Lemma22Params& p, std::size_t grid, std::uint64_t budget = 5'000'000);

struct Lemma23Instance {
  double q = 1.0;
  std::size_t s = 1;
  double delta = 0.5;
  std::vector<double> sequence;  ///< nonincreasing, nonnegative
};

enum class Lemma23Status { Passed, Failed, Rejected };

std::string to_string(Lemma23Status status);

struct Lemma23Result {
  Lemma23Status status = Lemma23Status::Rejected;
  double lhs = 0.0;  ///< block tail sum
  double rhs = 0.0;  ///< a(q, delta) s^{1/2-1/q} ||a||_q
  double slack = 0.0;  ///< 1 - lhs / rhs
  double r0 = 0.0;  ///< minimizing r0 of a(q, delta)
  /// Case II at r0: sum_{k>=2} a_{ks+1} < r0 delta a_{s+1}.
  bool case_two = false;
  std::size_t s0 = 0;  ///< split index, Case II only
  /// a_{s+s0}/a_{s+1} >= ((s0-1)/s)^{1/2} and s0 >= (1-r0)^2 delta^2 s / 2.
  bool split_consistent = true;
};

/// Rejects (status Rejected) instances violating the tail hypothesis
///   block_l2_tail(a, s) >= delta * ||(a_1..a_s)||_2.
/// Throws std::domain_error for malformed inputs.
Lemma23Result lemma23_check(const Lemma23Instance& inst);

enum class SequenceShape { Geometric, Flat, SingleStep, PowerLaw };

std::string to_string(SequenceShape shape);

struct SuiteOptions {
  std::uint64_t seed = 0;
  std::size_t instances = 0;  ///< 0 selects the suite default
  std::size_t grid = 0;  ///< 0 selects the suite default
  std::uint64_t budget = 5'000'000;
};

struct SuiteFailure {
  std::size_t index = 0;
  std::string instance;  ///< JSON text of the failing instance
  double measure = 0.0;
};

struct SuiteReport {
  std::string name;
  std::size_t instances = 0;  ///< accepted and checked
  std::size_t rejected = 0;
  std::size_t failures = 0;
  /// lemma21: max (f_closed - f_brute) / padding; lemma22: worst ratio;
  /// lemma23: minimum slack.
  double worst = 0.0;
  std::vector<SuiteFailure> failing;
  /// lemma21: count of instances with f_brute > f_closed (closed form not an
  /// upper bound) and with the gap above padding, reported separately.
  std::size_t upper_violations = 0;
  std::size_t gap_violations = 0;
  /// lemma23: Case II instances and split-index inconsistencies.
  std::size_t case_two = 0;
  std::size_t split_inconsistent = 0;
  std::vector<double> slacks;  ///< lemma23 per-instance slack, in order
  bool passed() const { return failures == 0 && instances > 0; }
};

/// 100 random instances, m <= 4, n <= 3, grid 64.
SuiteReport run_lemma21_suite(const SuiteOptions& opts = {});
/// 100 random parameter draws, m <= 3, grid 16.
SuiteReport run_lemma22_suite(const SuiteOptions& opts = {});
/// 1000 accepted random sequences cycling through the four shapes.
SuiteReport run_lemma23_suite(const SuiteOptions& opts = {});

/// Nonincreasing test sequence of length `blocks * s` for the given shape.
std::vector<double> make_sequence(SequenceShape shape, std::size_t s, std::size_t blocks, std::uint64_t seed);

}  // namespace lqcert::lemmas
