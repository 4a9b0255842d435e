#pragma once

// Shared numeric primitives: vectors, quasinorms, supports, block tail sums
// and least squares restricted to a column subset.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lqcert {

/// Real n-vector (signal x, kernel element h, recovery x*).
using SignalVector = Eigen::VectorXd;

/// m x n measurement matrix, row-major dense storage.
using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// An enumeration or sampling budget was exceeded.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A constraint set is empty (e.g. z outside range(A), or epsilon below the
/// smallest attainable residual).
class Infeasible : public std::runtime_error {
 public:
  Infeasible(const std::string& what, double attainable)
      : std::runtime_error(what), attainable_(attainable) {}
  /// Smallest constraint violation that can be reached.
  double attainable() const noexcept { return attainable_; }

 private:
  double attainable_;
};

/// Strictly increasing set of column indices (0-based).
class SupportSet {
 public:
  SupportSet() = default;
  /// Throws std::invalid_argument unless `indices` is strictly increasing and
  /// every index is < n.
  SupportSet(std::vector<std::size_t> indices, std::size_t n);

  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  bool contains(std::size_t i) const;
  std::span<const std::size_t> indices() const noexcept { return indices_; }
  auto begin() const noexcept { return indices_.begin(); }
  auto end() const noexcept { return indices_.end(); }
  std::size_t operator[](std::size_t k) const { return indices_[k]; }

  /// Support of the `s` largest-magnitude entries of x, ties to lowest index.
  static SupportSet top_magnitudes(const SignalVector& x, std::size_t s);

 private:
  std::vector<std::size_t> indices_;
};

/// Zero test for q = 0: |x_i| counts as nonzero when it exceeds
/// `relative_zero_tol * ||x||_inf`.
struct QuasiNormOptions {
  double relative_zero_tol = 1e-12;
};

bool all_finite(const SignalVector& x);
bool all_finite(const DenseMatrix& a);

/// ||x||_q for q in {0} U (0, inf) U {inf}: nonzero count, power-sum root, or
/// max magnitude. Throws std::domain_error for negative/NaN q or non-finite x.
double quasi_norm(const SignalVector& x, double q, const QuasiNormOptions& opts = {});

/// sum_i |x_i|^q for 0 < q < inf (the q-th power of the quasinorm).
double quasi_norm_pow(const SignalVector& x, double q);

/// Best s-term approximation: keeps the s largest-magnitude entries.
///
/// Picking the top magnitudes is optimal for every q > 0: the error
/// ||x - x_s||_q^q is the sum of |x_i|^q over the discarded indices, and t^q
/// is increasing, so discarding the n - s smallest magnitudes minimizes it.
/// Any tie-break gives the same error; ties go to the lowest index.
SignalVector best_s_term(const SignalVector& x, std::size_t s, double q);

/// Sum over blocks k >= 1 of the l2 norm of (a_{ks+1}, ..., a_{ks+s}); the
/// first block is excluded and the sequence is zero-padded. Throws
/// std::domain_error unless `a` is nonincreasing and nonnegative.
double block_l2_tail(std::span<const double> a, std::size_t s);

struct SupportLeastSquares {
  SignalVector u;  ///< coefficients on the support, size #S
  double residual = 0.0;  ///< ||A_S u - z||_2
};

/// Minimum-norm least squares on the columns S of A (rank decisions at
/// 1e-12 relative to the largest pivot).
SupportLeastSquares least_squares_on_support(const DenseMatrix& a, const SignalVector& z,
                                             const SupportSet& support);

/// Columns S of A.
DenseMatrix columns(const DenseMatrix& a, const SupportSet& support);

/// Embed coefficients u (size #S) into an n-vector supported on S.
SignalVector embed(const SignalVector& u, const SupportSet& support, std::size_t n);

/// C(n, k) saturating at UINT64_MAX.
std::uint64_t binomial(std::size_t n, std::size_t k);

/// Calls `visit` with each k-subset of {0..n-1} in lexicographic order; stops
/// early when `visit` returns false.
void for_each_combination(std::size_t n, std::size_t k,
                          const std::function<bool(std::span<const std::size_t>)>& visit);

/// SplitMix64 step, used to derive independent per-index seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace lqcert
