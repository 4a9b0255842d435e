#include "lqcert/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace lqcert::solver {
namespace {

void check_options(const DenseMatrix& a, const SignalVector& z, const SolverOptions& opts) {
  if (!(opts.q > 0.0 && opts.q <= 1.0)) throw std::domain_error("solver: q must lie in (0, 1]");
  if (opts.max_iterations == 0 || !(opts.epsilon_floor > 0.0) || !(opts.convergence_tol > 0.0) || opts.restarts == 0)
    throw std::domain_error("solver: options must be positive");
  if (z.size() != a.rows()) throw std::domain_error("solver: measurement length does not match A");
  if (!all_finite(a) || !all_finite(z)) throw std::domain_error("solver: non-finite input");
}

// (k+1)-th largest magnitude (k is 0-based count of entries above it)
double magnitude_rank(const SignalVector& x, std::size_t k) {
  std::vector<double> mags(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(x[i]);
  if (k >= mags.size()) return 0.0;
  std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(k), mags.end(), std::greater<>());
  return mags[k];
}

double surrogate(const SignalVector& x, double eps, double q) {
  double sum = 0.0;
  for (double v : x) sum += std::exp(0.5 * q * std::log(v * v + eps * eps));
  return sum;
}

// (x_i^2 + eps^2)^{(1 - q/2)/2}: square root of the inverse IRLS weight
SignalVector weight_roots(const SignalVector& x, double eps, double q) {
  SignalVector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = std::exp(0.5 * (1.0 - 0.5 * q) * std::log(x[i] * x[i] + eps * eps));
  return out;
}

struct RunResult {
  SignalVector x;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> history;
};

// Shared reweighting loop. `step(roots)` returns the next iterate given the
// square roots of the inverse weights. A cold start smooths at ||x||_inf; a
// warm start begins at the schedule value r_{K+1}(x)/n so the first step
// does not wash out the starting point.
template <class Step>
RunResult reweight(const SignalVector& start, std::size_t sparsity, const SolverOptions& opts, bool warm,
                   Step&& step) {
  const auto n = static_cast<std::size_t>(start.size());
  RunResult run;
  run.x = start;
  const double initial = warm ? magnitude_rank(start, sparsity) / static_cast<double>(n)
                              : (start.size() ? start.cwiseAbs().maxCoeff() : 0.0);
  double eps = std::max(initial, opts.epsilon_floor);
  if (opts.record_history) run.history.push_back(surrogate(run.x, eps, opts.q));
  for (run.iterations = 1; run.iterations <= opts.max_iterations; ++run.iterations) {
    const SignalVector next = step(weight_roots(run.x, eps, opts.q));
    eps = std::max(std::min(eps, magnitude_rank(next, sparsity) / static_cast<double>(n)), opts.epsilon_floor);
    const double change = (next - run.x).norm();
    run.x = next;
    if (opts.record_history) run.history.push_back(surrogate(run.x, eps, opts.q));
    if (change <= opts.convergence_tol * std::max(run.x.norm(), 1e-300)) {
      run.converged = true;
      break;
    }
  }
  run.iterations = std::min(run.iterations, opts.max_iterations);
  return run;
}

std::size_t schedule_sparsity(const DenseMatrix& a, const SolverOptions& opts) {
  const auto n = static_cast<std::size_t>(a.cols());
  const std::size_t k = opts.sparsity > 0 ? opts.sparsity : static_cast<std::size_t>(a.rows()) / 2;
  return std::min(k, n - 1);
}

RecoveryOutcome finish(const DenseMatrix& a, const SignalVector& z, const SignalVector& x, double q) {
  RecoveryOutcome out;
  out.x_hat = x;
  out.objective = quasi_norm_pow(x, q);
  out.feasibility_residual = (a * x - z).norm();
  return out;
}

// Least squares on the top-k magnitudes of x, k = 1..min(m, n), keeping any
// feasible candidate that lowers sum |x_i|^q.
RecoveryOutcome refine_support(const DenseMatrix& a, const SignalVector& z, RecoveryOutcome best, double q,
                               double tol) {
  const auto n = static_cast<std::size_t>(a.cols());
  const std::size_t kmax = std::min<std::size_t>(static_cast<std::size_t>(a.rows()), n);
  for (std::size_t k = 1; k <= kmax; ++k) {
    const SupportSet support = SupportSet::top_magnitudes(best.x_hat, k);
    const SupportLeastSquares ls = least_squares_on_support(a, z, support);
    if (ls.residual > tol) continue;
    RecoveryOutcome cand = finish(a, z, embed(ls.u, support, n), q);
    if (cand.objective < best.objective) {
      cand.iterations = best.iterations;
      cand.converged = best.converged;
      cand.surrogate_history = std::move(best.surrogate_history);
      best = std::move(cand);
    }
  }
  return best;
}

// Zero entries smallest-first while the residual stays within tol.
SignalVector prune_within(const DenseMatrix& a, const SignalVector& z, SignalVector x, double tol) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(x.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return std::abs(x[i]) < std::abs(x[j]); });
  for (Eigen::Index i : order) {
    if (x[i] == 0.0) continue;
    const double saved = x[i];
    x[i] = 0.0;
    if ((a * x - z).norm() > tol) x[i] = saved;
  }
  return x;
}

}  // namespace

double equality_tolerance(const SignalVector& z) { return 1e-8 * std::max(1.0, z.norm()); }

RecoveryOutcome irls_equality(const DenseMatrix& a, const SignalVector& z, const SolverOptions& opts) {
  check_options(a, z, opts);
  const auto n = static_cast<std::size_t>(a.cols());
  const double tol = equality_tolerance(z);
  const Eigen::MatrixXd dense = a;
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> full(dense);
  const SignalVector x_min_norm = full.solve(z);
  const double attainable = (dense * x_min_norm - z).norm();
  if (attainable > tol) throw Infeasible("irls_equality: z is not in range(A)", attainable);
  if (z.norm() == 0.0) {
    RecoveryOutcome zero = finish(a, z, SignalVector::Zero(static_cast<Eigen::Index>(n)), opts.q);
    zero.converged = true;
    return zero;
  }

  const std::size_t sparsity = schedule_sparsity(a, opts);
  auto step = [&](const SignalVector& roots) -> SignalVector {
    const Eigen::MatrixXd scaled = dense * roots.asDiagonal();
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(scaled);
    return roots.cwiseProduct(cod.solve(z));
  };

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  RecoveryOutcome best;
  bool have_best = false;
  // start 0: continuation from the q = 1 solution; start 1: the minimum-norm
  // point; later starts: minimum-norm point plus a random kernel direction
  for (std::size_t r = 0; r < opts.restarts; ++r) {
    SignalVector start = x_min_norm;
    bool warm = false;
    if (r == 0 && opts.q < 1.0) {
      SolverOptions convex = opts;
      convex.q = 1.0;
      convex.record_history = false;
      start = reweight(x_min_norm, sparsity, convex, false, step).x;
      warm = true;
    } else if (r > 1 || (r == 1 && opts.q == 1.0)) {
      SignalVector g(static_cast<Eigen::Index>(n));
      for (auto& v : g) v = normal(rng);
      const SignalVector kernel_part = g - full.solve(dense * g);
      const double kn = kernel_part.norm();
      if (kn <= 1e-12 * g.norm()) continue;  // trivial kernel: restarts coincide
      start += (std::max(x_min_norm.norm(), 1e-300) / kn) * kernel_part;
    }
    RunResult run = reweight(start, sparsity, opts, warm, step);
    RecoveryOutcome cand = finish(a, z, run.x, opts.q);
    cand.iterations = run.iterations;
    cand.converged = run.converged;
    cand.surrogate_history = std::move(run.history);
    if (cand.feasibility_residual > tol) {
      // recover feasibility from the same support ordering
      cand.objective = kInfinity;
    }
    cand = refine_support(a, z, std::move(cand), opts.q, tol);
    if (cand.feasibility_residual > tol) continue;
    if (!have_best || cand.objective < best.objective) {
      best = std::move(cand);
      have_best = true;
    }
  }
  if (!have_best) {
    best = finish(a, z, x_min_norm, opts.q);
    best.converged = false;
  }
  return best;
}

RecoveryOutcome irls_noisy(const DenseMatrix& a, const SignalVector& y, double epsilon, const SolverOptions& opts) {
  check_options(a, y, opts);
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw std::domain_error("irls_noisy: epsilon must be finite and >= 0");
  if (epsilon == 0.0) return irls_equality(a, y, opts);
  const auto n = static_cast<std::size_t>(a.cols());
  if (y.norm() <= epsilon) {
    RecoveryOutcome zero = finish(a, y, SignalVector::Zero(static_cast<Eigen::Index>(n)), opts.q);
    zero.converged = true;
    return zero;
  }
  const Eigen::MatrixXd dense = a;
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> full(dense);
  const SignalVector x_ls = full.solve(y);
  const double attainable = (dense * x_ls - y).norm();
  if (attainable > epsilon) throw Infeasible("irls_noisy: epsilon is below the smallest attainable residual", attainable);

  const double limit = epsilon * (1.0 + 1e-6);

  RecoveryOutcome best = finish(a, y, prune_within(a, y, x_ls, epsilon), opts.q);
  auto consider = [&](const SignalVector& x, std::size_t iterations, bool converged) {
    if ((dense * x - y).norm() > limit) return;
    RecoveryOutcome polished = finish(a, y, prune_within(a, y, x, epsilon), opts.q);
    polished.iterations = iterations;
    polished.converged = converged;
    if (polished.objective < best.objective) best = std::move(polished);
  };

  // the noiseless solution is feasible too
  const RecoveryOutcome noiseless = irls_equality(a, y, opts);
  consider(noiseless.x_hat, noiseless.iterations, noiseless.converged);

  // Penalty search on the columns `sub` of A: minimize
  // lambda * sum w_i u_i^2 + ||sub u - y||^2 by reweighting, with lambda
  // expanded then bisected until the residual lands in [0.99 eps, eps].
  // `emit` receives each iterate in sub coordinates.
  auto search = [&](const Eigen::MatrixXd& sub, auto&& emit) {
    const auto m = sub.rows();
    const auto k = sub.cols();
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sub);
    const SignalVector start = cod.solve(y);
    SolverOptions local = opts;
    local.sparsity = std::min<std::size_t>(schedule_sparsity(a, opts), static_cast<std::size_t>(k) - 1);
    const std::size_t sparsity = local.sparsity;
    auto solve_penalized = [&](double lambda) {
      auto step = [&](const SignalVector& roots) -> SignalVector {
        Eigen::MatrixXd stacked(m + k, k);
        stacked.topRows(m) = sub * roots.asDiagonal();
        stacked.bottomRows(k) = std::sqrt(lambda) * Eigen::MatrixXd::Identity(k, k);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + k);
        rhs.head(m) = y;
        return roots.cwiseProduct(stacked.colPivHouseholderQr().solve(rhs));
      };
      RunResult run = reweight(start, sparsity, local, false, step);
      if (opts.q < 1.0) {
        // continuation: the q = 1 path avoids the dense local minimizers
        SolverOptions convex = local;
        convex.q = 1.0;
        const RunResult first = reweight(start, sparsity, convex, false, step);
        RunResult warm = reweight(first.x, sparsity, local, true, step);
        const auto penalized = [&](const SignalVector& u) {
          return quasi_norm_pow(u, opts.q) + (sub * u - y).squaredNorm() / lambda;
        };
        if (penalized(warm.x) < penalized(run.x)) run = std::move(warm);
      }
      const double residual = (sub * run.x - y).norm();
      emit(run.x, run.iterations, run.converged);
      return residual;
    };

    const double scale = sub.squaredNorm() / static_cast<double>(k);
    double lo = 1e-12 * scale;
    double hi = scale;
    std::size_t steps = 2;
    solve_penalized(lo);
    double res_hi = solve_penalized(hi);
    while (res_hi < 0.99 * epsilon && steps < 60) {
      lo = hi;
      hi *= 100.0;
      res_hi = solve_penalized(hi);
      ++steps;
    }
    if (res_hi >= 0.99 * epsilon && res_hi <= epsilon) return true;
    while (steps < 60) {
      const double mid = std::sqrt(lo * hi);
      const double res = solve_penalized(mid);
      ++steps;
      if (res >= 0.99 * epsilon && res <= epsilon) return true;
      (res > epsilon ? hi : lo) = mid;
    }
    return false;
  };

  const bool in_band = search(dense, consider);

  // the same search restricted to the top-k supports of the incumbent and to
  // the nested supports picked by orthogonal matching pursuit
  const std::size_t kmax = std::min<std::size_t>(static_cast<std::size_t>(dense.rows()), n);
  std::vector<SupportSet> supports;
  for (std::size_t k = 1; k <= kmax; ++k) supports.push_back(SupportSet::top_magnitudes(best.x_hat, k));
  std::vector<std::size_t> greedy;
  SignalVector residual = y;
  for (std::size_t k = 1; k <= kmax; ++k) {
    std::size_t pick = n;
    double score = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::find(greedy.begin(), greedy.end(), j) != greedy.end()) continue;
      const auto col = dense.col(static_cast<Eigen::Index>(j));
      const double c = std::abs(col.dot(residual)) / std::max(col.norm(), 1e-300);
      if (c > score) {
        score = c;
        pick = j;
      }
    }
    greedy.push_back(pick);
    std::vector<std::size_t> sorted = greedy;
    std::sort(sorted.begin(), sorted.end());
    const SupportSet support(sorted, n);
    const SupportLeastSquares ls = least_squares_on_support(a, y, support);
    residual = y - columns(a, support) * ls.u;
    supports.push_back(support);
  }
  for (const SupportSet& support : supports) {
    if (least_squares_on_support(a, y, support).residual > epsilon) continue;
    search(columns(a, support), [&](const SignalVector& u, std::size_t iterations, bool converged) {
      consider(embed(u, support, n), iterations, converged);
    });
  }
  best.converged = best.converged && in_band;
  return best;
}

BruteForceResult brute_force_lq_min(const DenseMatrix& a, const SignalVector& z, double q, std::size_t s_max,
                                    std::uint64_t budget) {
  if (!(q > 0.0 && q <= 1.0)) throw std::domain_error("brute_force_lq_min: q must lie in (0, 1]");
  if (z.size() != a.rows()) throw std::domain_error("brute_force_lq_min: measurement length does not match A");
  const auto n = static_cast<std::size_t>(a.cols());
  s_max = std::min(s_max, n);
  std::uint64_t total = 0;
  for (std::size_t k = 0; k <= s_max; ++k) {
    const std::uint64_t c = binomial(n, k);
    total = c > budget ? budget + 1 : total + c;
    if (total > budget) throw BudgetExceeded("brute_force_lq_min: support enumeration exceeds budget");
  }

  const double tol = equality_tolerance(z);
  BruteForceResult out;
  const Eigen::MatrixXd dense = a;
  out.global = s_max >= static_cast<std::size_t>(Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(dense).rank());
  std::vector<SignalVector> tied;
  double best = kInfinity;
  for (std::size_t k = 0; k <= s_max; ++k) {
    for_each_combination(n, k, [&](std::span<const std::size_t> idx) {
      ++out.supports_examined;
      const SupportSet support(std::vector<std::size_t>(idx.begin(), idx.end()), n);
      const SupportLeastSquares ls = least_squares_on_support(a, z, support);
      if (ls.residual > tol) return true;
      const SignalVector x = embed(ls.u, support, n);
      const double obj = quasi_norm_pow(x, q);
      const double tie_tol = 1e-9 * std::max(1.0, std::isfinite(best) ? best : 1.0);
      if (tied.empty() || obj < best - tie_tol) {
        best = obj;
        tied.assign(1, x);
        out.outcome = finish(a, z, x, q);
      } else if (obj <= best + tie_tol) {
        const bool distinct = std::all_of(tied.begin(), tied.end(), [&](const SignalVector& t) {
          return (t - x).norm() > 1e-9 * std::max(1.0, x.norm());
        });
        if (distinct) tied.push_back(x);
      }
      return true;
    });
  }
  out.feasible = !tied.empty();
  if (!out.feasible) {
    out.outcome = finish(a, z, SignalVector::Zero(static_cast<Eigen::Index>(n)), q);
    out.outcome.objective = kInfinity;
    return out;
  }
  out.outcome.converged = true;
  out.tied_candidates = tied.size();
  out.tie = tied.size() > 1;
  return out;
}

}  // namespace lqcert::solver
