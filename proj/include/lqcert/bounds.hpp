#pragma once

// The recovery bound function a(q, delta) and the scalar quantities built on
// it: delta_1, the threshold curves q_succ / q_fail, the constants eta_q and
// x_0, the null space constant bound, and the stable-recovery constants.
//
//   a(q, d) = inf_{0<r0<1} max{ T1, T2, T3, T4 }
//   T1 = (1 + r0 d) / (1 + r0^q d^q)^{1/q}
//   T2 = sup_{L <= y <= 1} 2y / (1 + 2^{-q/2} y^{2+q})^{1/q}
//   T3 = sup_{L <= y <= 1} 3y / (1 + y)^{1/q}
//   T4 = sup_{y >= 1}      2y / (1 + y)^{1/q}
//   with L = sqrt(2) (1 - r0) d / 2.
//
// All power expressions are evaluated in log space so q down to 1e-8 stays
// finite.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace lqcert::bounds {

struct BoundsQuery {
  double q = 1.0;      ///< (0, 1]
  double delta = 0.5;  ///< (0, 1)
};

/// Throws std::domain_error unless 0 < q <= 1 and 0 < delta < 1.
void validate(const BoundsQuery& query);

enum class ActiveTerm { T1, T2, T3, T4 };
std::string to_string(ActiveTerm term);

struct TermValues {
  double t1 = 0, t2 = 0, t3 = 0, t4 = 0;
  double max() const;
  ActiveTerm argmax() const;
};

/// The four terms at a fixed r0 in [0, 1], inner suprema in closed form.
TermValues terms_at(const BoundsQuery& query, double r0);

/// Individual integrands (used by the grid oracle and tests).
double t1_value(double q, double delta, double r0);
double t2_integrand(double q, double y);
double t3_integrand(double q, double y);
double t4_integrand(double q, double y);
/// Closed-form suprema of the inner problems.
double t2_sup(double q, double lower);
double t3_sup(double q, double lower);
double t4_sup(double q);

struct AValueResult {
  double value = 0.0;  ///< max of the four terms at r0_star
  double r0_star = 0.5;
  ActiveTerm active_term = ActiveTerm::T1;
  TermValues terms;
};

struct AValueOptions {
  std::size_t scan_points = 256;
  std::size_t golden_iterations = 200;
};

/// a(q, delta): 256-point scan over r0 followed by golden-section refinement
/// on the bracketing cell. The returned value is the objective evaluated at
/// r0_star, so it is always an attained upper bound of the infimum.
AValueResult a_value(const BoundsQuery& query, const AValueOptions& opts = {});

struct GridResult {
  double value = 0.0;
  /// Lipschitz-style discretization bound: the largest change of the
  /// objective between adjacent grid points on either axis.
  double padding = 0.0;
};

/// Brute-force a(q, delta): r0 on a uniform interior grid, y on a uniform grid
/// of [0, 1] (plus the interval endpoint L), and y >= 1 through y = 1/u with u
/// on a uniform grid of (0, 1]. No calculus is used.
GridResult a_value_grid(const BoundsQuery& query, std::size_t grid_size);

/// delta_1 = sqrt((1 - delta2s) / (1 + delta2s)).
double delta1(double delta2s);

struct RootResult {
  double value = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
};

/// Plain bisection on [lo, hi] for a sign change of f. Throws
/// std::runtime_error when f(lo), f(hi) have the same sign.
template <class F>
RootResult bisect(F&& f, double lo, double hi, double tol = 1e-12, std::size_t max_iterations = 200);

struct QTildeOptions {
  std::size_t grid_points = 512;  ///< log-spaced on [q_floor, 1]
  double q_floor = 1e-8;
  double absolute_tol = 1e-6;
  double relative_tol = 1e-9;  ///< bisection stops at the tighter of the two
  AValueOptions a_options;
};

struct QTildeResult {
  double value = 0.0;
  bool found = false;
  /// Some grid point below `value` fails a(q, d1) < d1, i.e. the satisfying
  /// set is not an interval anchored at 0 on the sampled grid.
  bool non_monotone = false;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  std::string diagnostic;
};

/// sup{ q in (0, 1] : a(q, delta1) < delta1 }.
QTildeResult q_tilde_max(double delta1_value, const QTildeOptions& opts = {});

/// q_succ(delta) = q_tilde_max(delta1(delta)).
QTildeResult q_succ(double delta, const QTildeOptions& opts = {});

struct QFailOptions {
  std::size_t scan_points = 1024;
  double tol = 1e-8;
};

struct QFailResult {
  double value = 1.0;
  bool has_root = false;
  bool ambiguous = false;  ///< more than one sign change in (0, 1]
  double residual = 0.0;
  std::size_t sign_changes = 0;
};

/// Left minus right side of ((2-q)d/(1+d))^{2/q} + 1 = (2 - 2d + 2qd)/(q + qd).
double q_fail_equation(double q, double delta);

/// Root of the failure-threshold equation in (0, 1], or 1 when none exists.
QFailResult q_fail(double delta, const QFailOptions& opts = {});

/// eta^{2/q} + 1 - 2(1 - eta)/q.
double eta_equation(double q, double eta);
/// Unique root of eta_equation in (0, 1).
RootResult eta_q(double q);

/// Positive root of e^{-2x} = 2x - 1 on (0.5, 1.5).
RootResult x0_const();
/// 1 / (2 x0 - 1).
double x0_companion();

/// a(q, delta1) / delta1 with delta1 from delta2s.
double nsp_constant_bound(double q, double delta2s, const AValueOptions& opts = {});

enum class C0Power { Squared, FirstPower };

struct RecoveryConstantsOptions {
  std::size_t r_grid = 241;  ///< log-spaced on (r_min, r_max)
  double r_min = 1e-3;
  double r_max = 1e3;
  C0Power c0_power = C0Power::Squared;
  AValueOptions a_options;
};

struct RecoveryConstants {
  double r = 0.0;
  double C0 = 0.0, C1 = 0.0, C2 = 0.0, C3 = 0.0;
  double q = 1.0;
  double delta2s = 0.0;
  std::size_t s = 1;
  bool feasible = false;
  double delta1 = 0.0;
  double a_at_r = 0.0;  ///< a(q, delta1/(1+r))
  std::size_t feasible_r_count = 0;
  bool r_at_grid_boundary = false;
};

/// Error-bound constants of the stable recovery estimates
///   ||x* - x||_2 <= C0 s^{1/2-1/q} ||x - x_s||_q + C1 eps
///   ||x* - x||_q <= C2 ||x - x_s||_q + C3 s^{1/q-1/2} eps.
/// Scans r over the log grid, keeps r with a(q, d1/(1+r)) < d1/(1+r), and
/// returns the r minimizing C0 + C2.
RecoveryConstants recovery_constants(double q, double delta2s, std::size_t s,
                                     const RecoveryConstantsOptions& opts = {});

/// Constants for a fixed r (feasible=false when the r condition fails).
RecoveryConstants recovery_constants_at(double q, double delta2s, std::size_t s, double r,
                                        const RecoveryConstantsOptions& opts = {});

struct ThresholdCurvePoint {
  double delta = 0.0;
  double q_succ = 0.0;
  double q_fail = 1.0;
  bool q_succ_non_monotone = false;
  bool q_fail_ambiguous = false;
};

/// delta_i = i / (points + 1), i = 1..points (default 0.01, ..., 0.99).
std::vector<double> default_delta_grid(std::size_t points = 99);

std::vector<ThresholdCurvePoint> threshold_curve(const std::vector<double>& deltas,
                                                 const QTildeOptions& opts = {});

// ---------------------------------------------------------------------------

template <class F>
RootResult bisect(F&& f, double lo, double hi, double tol, std::size_t max_iterations) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return {lo, 0.0, 0};
  if (fhi == 0.0) return {hi, 0.0, 0};
  if ((flo < 0) == (fhi < 0)) throw std::runtime_error("bisect: no sign change on bracket");
  RootResult out;
  for (out.iterations = 0; out.iterations < max_iterations && hi - lo > tol; ++out.iterations) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  out.value = 0.5 * (lo + hi);
  out.residual = std::abs(f(out.value));
  return out;
}

}  // namespace lqcert::bounds
