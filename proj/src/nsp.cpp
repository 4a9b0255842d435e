#include "lqcert/nsp.hpp"

#include "lqcert/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace lqcert::nsp {
namespace {

constexpr double kZeroTol = 1e-12;  // relative to ||h||_inf, as in quasi_norm

// Candidate kernel directions (coefficient vectors c, h = N c) that do not
// depend on q: directions where d-1 entries of h vanish, then random starts.
std::vector<Eigen::VectorXd> candidate_directions(const Eigen::MatrixXd& basis, const NspOptions& opts) {
  const auto n = static_cast<std::size_t>(basis.rows());
  const auto d = static_cast<std::size_t>(basis.cols());
  std::vector<Eigen::VectorXd> out;
  if (binomial(n, d - 1) <= opts.vertex_budget) {
    for_each_combination(n, d - 1, [&](std::span<const std::size_t> rows) {
      Eigen::MatrixXd sub(static_cast<Eigen::Index>(rows.size()), basis.cols());
      for (std::size_t k = 0; k < rows.size(); ++k) sub.row(static_cast<Eigen::Index>(k)) = basis.row(static_cast<Eigen::Index>(rows[k]));
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub, Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      const double largest = sv.size() > 0 ? sv(0) : 0.0;
      // a unique direction needs the d-1 rows to be independent
      if (largest > 0.0 && sv(sv.size() - 1) > 1e-10 * largest)
        out.push_back(svd.matrixV().col(basis.cols() - 1));
      return true;
    });
  }
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  for (std::size_t k = 0; k < opts.starts; ++k) {
    Eigen::VectorXd c(basis.cols());
    for (auto& v : c) v = normal(rng);
    out.push_back(c.normalized());
  }
  return out;
}

struct LocalMax {
  double value = 0.0;
  Eigen::VectorXd direction;
};

// Compass search on the coefficient sphere; the ratio is scale invariant.
LocalMax compass_search(const Eigen::MatrixXd& basis, Eigen::VectorXd c, std::size_t s, double q) {
  auto f = [&](const Eigen::VectorXd& v) { return top_s_ratio(basis * v, s, q); };
  c.normalize();
  double best = f(c);
  double step = 0.5;
  std::size_t evaluations = 0;
  while (step > 1e-9 && evaluations < 20'000 && std::isfinite(best)) {
    bool improved = false;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      for (double sign : {1.0, -1.0}) {
        Eigen::VectorXd trial = c;
        trial[i] += sign * step;
        const double norm = trial.norm();
        if (norm == 0.0) continue;
        trial /= norm;
        const double v = f(trial);
        ++evaluations;
        if (v > best * (1.0 + 1e-15)) {
          best = v;
          c = trial;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return {best, c};
}

NspReport gamma_from_basis(const Eigen::MatrixXd& basis, const std::vector<Eigen::VectorXd>& starts,
                           std::size_t s, double q, const NspOptions& opts) {
  NspReport out;
  out.s = s;
  out.q = q;
  out.kernel_dimension = static_cast<std::size_t>(basis.cols());
  if (opts.delta2s && *opts.delta2s > 0.0 && *opts.delta2s < 1.0) out.rip_bound = bounds::nsp_constant_bound(q, *opts.delta2s);

  if (basis.cols() == 0) {
    out.certified = true;
    out.witness = SignalVector::Zero(basis.rows());
    return out;
  }
  if (basis.cols() == 1) {
    out.witness = basis.col(0);
    out.gamma_lower = out.gamma_estimate = top_s_ratio(out.witness, s, q);
    out.certified = true;
    return out;
  }
  double best = -1.0;
  Eigen::VectorXd best_dir;
  for (const auto& c : starts) {
    const LocalMax local = compass_search(basis, c, s, q);
    if (local.value > best) {
      best = local.value;
      best_dir = local.direction;
    }
  }
  out.gamma_lower = out.gamma_estimate = best;
  out.witness = basis * best_dir;
  return out;
}

void check_inputs(const DenseMatrix& a, std::size_t s, double q) {
  if (!(q > 0.0 && q <= 1.0)) throw std::domain_error("nsp: q must lie in (0, 1]");
  if (s < 1 || s >= static_cast<std::size_t>(a.cols())) throw std::domain_error("nsp: need 1 <= s < n");
  if (!all_finite(a)) throw std::domain_error("nsp: matrix has non-finite entries");
}

}  // namespace

Eigen::MatrixXd kernel_basis(const DenseMatrix& a, double rank_tol) {
  const Eigen::MatrixXd dense = a;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double largest = sv.size() > 0 ? sv(0) : 0.0;
  const Eigen::Index rank = largest == 0.0 ? 0 : (sv.array() > rank_tol * largest).count();
  Eigen::MatrixXd basis = svd.matrixV().rightCols(a.cols() - rank);
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    Eigen::Index where = 0;
    basis.col(j).cwiseAbs().maxCoeff(&where);
    if (basis(where, j) < 0.0) basis.col(j) *= -1.0;
  }
  return basis;
}

double top_s_ratio(const SignalVector& h, std::size_t s, double q) {
  const double scale = h.size() == 0 ? 0.0 : h.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  std::vector<double> mags(static_cast<std::size_t>(h.size()));
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    const double v = std::abs(h[i]) / scale;
    mags[static_cast<std::size_t>(i)] = v <= kZeroTol ? 0.0 : v;
  }
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double top = 0.0, rest = 0.0;
  for (std::size_t i = 0; i < mags.size(); ++i) {
    if (mags[i] == 0.0) break;
    (i < s ? top : rest) += std::pow(mags[i], q);
  }
  if (rest == 0.0) return kInfinity;
  return std::exp(std::log(top / rest) / q);
}

NspReport nsp_gamma(const DenseMatrix& a, std::size_t s, double q, const NspOptions& opts) {
  check_inputs(a, s, q);
  const Eigen::MatrixXd basis = kernel_basis(a);
  std::vector<Eigen::VectorXd> starts;
  if (basis.cols() >= 2) starts = candidate_directions(basis, opts);
  return gamma_from_basis(basis, starts, s, q, opts);
}

QsEstimate q_s_estimate(const DenseMatrix& a, std::size_t s, const QsOptions& opts) {
  check_inputs(a, s, 1.0);
  const Eigen::MatrixXd basis = kernel_basis(a);
  std::vector<Eigen::VectorXd> starts;
  if (basis.cols() >= 2) starts = candidate_directions(basis, opts.nsp);

  QsEstimate out;
  out.certified = basis.cols() <= 1;
  auto succeeds = [&](double q) {
    return gamma_from_basis(basis, starts, s, q, opts.nsp).gamma_estimate < 1.0 - opts.margin;
  };
  const std::size_t n = std::max<std::size_t>(opts.grid_points, 1);
  std::size_t top = 0;
  for (std::size_t k = n; k >= 1; --k) {
    if (succeeds(static_cast<double>(k) / static_cast<double>(n))) {
      top = k;
      break;
    }
  }
  if (top == 0) {
    out.diagnostic = "gamma >= 1 down to the grid floor q = 1/" + std::to_string(n);
    return out;
  }
  if (top == n) {
    out.value = 1.0;
    return out;
  }
  double lo = static_cast<double>(top) / static_cast<double>(n);
  double hi = static_cast<double>(top + 1) / static_cast<double>(n);
  while (hi - lo > opts.tol) {
    const double mid = 0.5 * (lo + hi);
    (succeeds(mid) ? lo : hi) = mid;
  }
  out.value = lo;
  if (!out.certified) out.diagnostic = "kernel dimension >= 2: gamma values are local-search lower bounds";
  return out;
}

}  // namespace lqcert::nsp
