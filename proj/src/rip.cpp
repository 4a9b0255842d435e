#include "lqcert/rip.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace lqcert::rip {
namespace {

struct Extremes {
  double min_eig = kInfinity;
  double max_eig = 0.0;
};

void update(Extremes& acc, const DenseMatrix& a, std::span<const std::size_t> subset) {
  Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(subset.size()));
  for (std::size_t k = 0; k < subset.size(); ++k)
    sub.col(static_cast<Eigen::Index>(k)) = a.col(static_cast<Eigen::Index>(subset[k]));
  const Eigen::MatrixXd gram = sub.transpose() * sub;
  if (gram.rows() == 1) {
    acc.min_eig = std::min(acc.min_eig, gram(0, 0));
    acc.max_eig = std::max(acc.max_eig, gram(0, 0));
    return;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  acc.min_eig = std::min(acc.min_eig, eig.eigenvalues().minCoeff());
  acc.max_eig = std::max(acc.max_eig, eig.eigenvalues().maxCoeff());
}

std::vector<std::size_t> random_subset(std::size_t n, std::size_t s, std::mt19937_64& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = 0; i < s; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(perm[i], perm[pick(rng)]);
  }
  perm.resize(s);
  std::sort(perm.begin(), perm.end());
  return perm;
}

void check_order(const DenseMatrix& a, std::size_t s) {
  if (s < 1 || s > static_cast<std::size_t>(a.cols())) throw std::domain_error("RIP order must satisfy 1 <= s <= n");
  if (!all_finite(a)) throw std::domain_error("matrix has non-finite entries");
}

}  // namespace

FrameBounds frame_bounds(const DenseMatrix& a, std::size_t s, const RipOptions& opts) {
  check_order(a, s);
  const auto n = static_cast<std::size_t>(a.cols());
  Extremes acc;
  FrameBounds out;
  if (binomial(n, s) <= opts.budget) {
    for_each_combination(n, s, [&](std::span<const std::size_t> subset) {
      update(acc, a, subset);
      ++out.subsets_examined;
      return true;
    });
    out.certified = true;
  } else {
    std::mt19937_64 rng(opts.seed);
    for (std::size_t t = 0; t < opts.sample_count; ++t) {
      update(acc, a, random_subset(n, s, rng));
      ++out.subsets_examined;
    }
  }
  out.alpha = std::sqrt(std::max(acc.min_eig, 0.0));
  out.beta = std::sqrt(std::max(acc.max_eig, 0.0));
  return out;
}

RipReport rip_constant(const DenseMatrix& a, std::size_t s, const RipOptions& opts) {
  const FrameBounds fb = frame_bounds(a, s, opts);
  RipReport out;
  out.order = s;
  out.alpha = fb.alpha;
  out.beta = fb.beta;
  out.delta = std::max(1.0 - fb.alpha * fb.alpha, fb.beta * fb.beta - 1.0);
  out.certified = fb.certified;
  out.subsets_examined = fb.subsets_examined;
  return out;
}

Rescaled rescale_to_rip(const DenseMatrix& a, std::size_t s, const RipOptions& opts) {
  Rescaled out;
  out.bounds = frame_bounds(a, s, opts);
  const double a2 = out.bounds.alpha * out.bounds.alpha;
  const double b2 = out.bounds.beta * out.bounds.beta;
  if (!(out.bounds.alpha > opts.rank_tol * out.bounds.beta))
    throw std::domain_error("rescale_to_rip: alpha = 0, some sparse vector lies in the kernel");
  out.scale = std::sqrt(2.0 / (a2 + b2));
  out.matrix = out.scale * a;
  out.delta = (b2 - a2) / (a2 + b2);
  return out;
}

UniqueDetermination unique_determination(const DenseMatrix& a, std::size_t s, const RipOptions& opts) {
  const auto m = static_cast<std::size_t>(a.rows());
  const auto n = static_cast<std::size_t>(a.cols());
  if (s < 1 || 2 * s > n) throw std::domain_error("unique_determination: need 1 <= 2s <= n");
  UniqueDetermination out;
  if (2 * s > m) {
    out.certified = true;
    out.paths_agree = true;
    out.explanation = "2s > m: every 2s-column submatrix is rank deficient";
    return out;
  }
  if (binomial(n, 2 * s) > opts.budget) throw BudgetExceeded("unique_determination: C(n, 2s) exceeds budget");

  bool all_full_rank = true;
  for_each_combination(n, 2 * s, [&](std::span<const std::size_t> subset) {
    Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(subset.size()));
    for (std::size_t k = 0; k < subset.size(); ++k)
      sub.col(static_cast<Eigen::Index>(k)) = a.col(static_cast<Eigen::Index>(subset[k]));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub);
    const auto& sv = svd.singularValues();
    const double largest = sv.size() > 0 ? sv(0) : 0.0;
    const Eigen::Index rank = (sv.array() > opts.rank_tol * largest).count();
    if (largest == 0.0 || rank < static_cast<Eigen::Index>(subset.size())) {
      all_full_rank = false;
      return false;
    }
    return true;
  });
  out.rank_path = all_full_rank;
  const FrameBounds fb = frame_bounds(a, 2 * s, opts);
  out.alpha_path = fb.alpha > opts.rank_tol * fb.beta;
  out.paths_agree = out.rank_path == out.alpha_path;
  out.determined = out.rank_path && out.alpha_path;
  out.certified = fb.certified;
  out.explanation = out.determined ? "every 2s-column submatrix has full column rank"
                                   : "some 2s-sparse nonzero vector lies in the kernel";
  if (!out.paths_agree) out.explanation += " (rank and frame-bound paths disagree near tolerance)";
  return out;
}

CorrelationCheck disjoint_correlation_check(const DenseMatrix& a, std::size_t s, double delta2s,
                                            std::size_t trials, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(a.cols());
  if (s < 1 || 2 * s > n) throw std::domain_error("disjoint_correlation_check: need 1 <= 2s <= n");
  CorrelationCheck out;
  out.delta2s = delta2s;
  out.trials = trials;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<std::size_t> perm(n);
  for (std::size_t t = 0; t < trials; ++t) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    SignalVector u = SignalVector::Zero(static_cast<Eigen::Index>(n));
    SignalVector v = SignalVector::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < s; ++k) {
      u[static_cast<Eigen::Index>(perm[k])] = normal(rng);
      v[static_cast<Eigen::Index>(perm[s + k])] = normal(rng);
    }
    const double denom = u.norm() * v.norm();
    if (denom == 0.0) continue;
    const double ratio = std::abs((a * u).dot(a * v)) / denom;
    out.max_ratio = std::max(out.max_ratio, ratio);
    if (ratio > delta2s + 1e-10) ++out.violations;
  }
  return out;
}

}  // namespace lqcert::rip
