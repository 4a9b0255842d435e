#include "lqcert/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lqcert {

SupportSet::SupportSet(std::vector<std::size_t> indices, std::size_t n) : indices_(std::move(indices)) {
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (indices_[k] >= n) throw std::invalid_argument("support index out of range");
    if (k > 0 && indices_[k] <= indices_[k - 1])
      throw std::invalid_argument("support indices must be strictly increasing");
  }
}

bool SupportSet::contains(std::size_t i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

SupportSet SupportSet::top_magnitudes(const SignalVector& x, std::size_t s) {
  const auto n = static_cast<std::size_t>(x.size());
  if (s > n) throw std::domain_error("s exceeds vector length");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return std::abs(x[static_cast<Eigen::Index>(i)]) > std::abs(x[static_cast<Eigen::Index>(j)]);
  });
  order.resize(s);
  std::sort(order.begin(), order.end());
  return SupportSet(std::move(order), n);
}

bool all_finite(const SignalVector& x) { return x.allFinite(); }
bool all_finite(const DenseMatrix& a) { return a.allFinite(); }

double quasi_norm(const SignalVector& x, double q, const QuasiNormOptions& opts) {
  if (!(q >= 0.0)) throw std::domain_error("quasi_norm: q must be nonnegative");
  if (!all_finite(x)) throw std::domain_error("quasi_norm: non-finite entries");
  const double inf_norm = x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
  if (q == 0.0) {
    const double threshold = opts.relative_zero_tol * inf_norm;
    return static_cast<double>((x.array().abs() > threshold).count());
  }
  if (std::isinf(q)) return inf_norm;
  if (inf_norm == 0.0) return 0.0;
  // Factor out ||x||_inf so the power sum stays in range for small q.
  double sum = 0.0;
  for (double v : x) sum += std::pow(std::abs(v) / inf_norm, q);
  return inf_norm * std::pow(sum, 1.0 / q);
}

double quasi_norm_pow(const SignalVector& x, double q) {
  if (!(q > 0.0) || std::isinf(q)) throw std::domain_error("quasi_norm_pow: q must be in (0, inf)");
  double sum = 0.0;
  for (double v : x) {
    if (v != 0.0) sum += std::pow(std::abs(v), q);
  }
  return sum;
}

SignalVector best_s_term(const SignalVector& x, std::size_t s, double q) {
  if (!(q > 0.0 && q <= 1.0)) throw std::domain_error("best_s_term: q must be in (0, 1]");
  if (s < 1 || s > static_cast<std::size_t>(x.size())) throw std::domain_error("best_s_term: need 1 <= s <= n");
  const SupportSet keep = SupportSet::top_magnitudes(x, s);
  SignalVector out = SignalVector::Zero(x.size());
  for (std::size_t i : keep) out[static_cast<Eigen::Index>(i)] = x[static_cast<Eigen::Index>(i)];
  return out;
}

double block_l2_tail(std::span<const double> a, std::size_t s) {
  if (s == 0) throw std::domain_error("block_l2_tail: s must be positive");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] >= 0.0) || !std::isfinite(a[i])) throw std::domain_error("block_l2_tail: entries must be finite and nonnegative");
    if (i > 0 && a[i] > a[i - 1]) throw std::domain_error("block_l2_tail: sequence must be nonincreasing");
  }
  double total = 0.0;
  for (std::size_t start = s; start < a.size(); start += s) {
    double sq = 0.0;
    for (std::size_t i = start; i < std::min(a.size(), start + s); ++i) sq += a[i] * a[i];
    total += std::sqrt(sq);
  }
  return total;
}

DenseMatrix columns(const DenseMatrix& a, const SupportSet& support) {
  DenseMatrix out(a.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t k = 0; k < support.size(); ++k)
    out.col(static_cast<Eigen::Index>(k)) = a.col(static_cast<Eigen::Index>(support[k]));
  return out;
}

SignalVector embed(const SignalVector& u, const SupportSet& support, std::size_t n) {
  if (static_cast<std::size_t>(u.size()) != support.size()) throw std::invalid_argument("embed: size mismatch");
  SignalVector x = SignalVector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < support.size(); ++k)
    x[static_cast<Eigen::Index>(support[k])] = u[static_cast<Eigen::Index>(k)];
  return x;
}

SupportLeastSquares least_squares_on_support(const DenseMatrix& a, const SignalVector& z,
                                             const SupportSet& support) {
  if (z.size() != a.rows()) throw std::invalid_argument("least_squares_on_support: z has wrong length");
  if (!support.empty() && support.indices().back() >= static_cast<std::size_t>(a.cols()))
    throw std::invalid_argument("least_squares_on_support: support out of range");
  SupportLeastSquares out;
  if (support.empty()) {
    out.u = SignalVector::Zero(0);
    out.residual = z.norm();
    return out;
  }
  const Eigen::MatrixXd sub = columns(a, support);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(1e-12);
  cod.compute(sub);
  out.u = cod.solve(z);
  out.residual = (sub * out.u - z).norm();
  return out;
}

std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 acc = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(acc);
}

void for_each_combination(std::size_t n, std::size_t k,
                          const std::function<bool(std::span<const std::size_t>)>& visit) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    if (!visit(idx)) return;
    // advance to the next combination in lexicographic order
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace lqcert
