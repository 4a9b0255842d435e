#include "lqcert/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace lqcert::bounds {
namespace {

// (1 + v)^{-1/q} as exp(-log1p(v)/q); underflows cleanly to 0 for tiny q.
double inv_root(double v, double q) { return std::exp(-std::log1p(v) / q); }

double clamp_interval(double y, double lo, double hi) { return std::min(std::max(y, lo), hi); }

double lower_endpoint(double delta, double r0) { return std::numbers::sqrt2 * (1.0 - r0) * delta / 2.0; }

}  // namespace

void validate(const BoundsQuery& query) {
  if (!(query.q > 0.0 && query.q <= 1.0)) throw std::domain_error("q must lie in (0, 1]");
  if (!(query.delta > 0.0 && query.delta < 1.0)) throw std::domain_error("delta must lie in (0, 1)");
}

std::string to_string(ActiveTerm term) {
  switch (term) {
    case ActiveTerm::T1: return "T1";
    case ActiveTerm::T2: return "T2";
    case ActiveTerm::T3: return "T3";
    case ActiveTerm::T4: return "T4";
  }
  return "?";
}

double TermValues::max() const { return std::max({t1, t2, t3, t4}); }

ActiveTerm TermValues::argmax() const {
  const double m = max();
  if (t1 == m) return ActiveTerm::T1;
  if (t2 == m) return ActiveTerm::T2;
  if (t3 == m) return ActiveTerm::T3;
  return ActiveTerm::T4;
}

double t1_value(double q, double delta, double r0) {
  const double t = r0 * delta;
  if (t <= 0.0) return 1.0;
  return std::exp(std::log1p(t) - std::log1p(std::exp(q * std::log(t))) / q);
}

double t2_integrand(double q, double y) {
  if (y <= 0.0) return 0.0;
  const double v = std::exp(-0.5 * q * std::numbers::ln2 + (2.0 + q) * std::log(y));
  return 2.0 * y * inv_root(v, q);
}

double t3_integrand(double q, double y) { return y <= 0.0 ? 0.0 : 3.0 * y * inv_root(y, q); }

double t4_integrand(double q, double y) { return y <= 0.0 ? 0.0 : 2.0 * y * inv_root(y, q); }

double t2_sup(double q, double lower) {
  // stationary point of 2y (1 + 2^{-q/2} y^{2+q})^{-1/q}: y^{2+q} = q 2^{q/2-1}
  const double y_star = std::exp((std::log(q) + (0.5 * q - 1.0) * std::numbers::ln2) / (2.0 + q));
  return t2_integrand(q, clamp_interval(y_star, lower, 1.0));
}

double t3_sup(double q, double lower) {
  // 3y (1+y)^{-1/q} increases up to y = q/(1-q), then decreases
  const double y_star = q < 1.0 ? q / (1.0 - q) : 1.0;
  return t3_integrand(q, clamp_interval(y_star, lower, 1.0));
}

double t4_sup(double q) {
  // q = 1: 2y/(1+y) -> 2 as y -> inf, not attained
  if (q >= 1.0) return 2.0;
  const double y_star = std::max(1.0, q / (1.0 - q));
  return t4_integrand(q, y_star);
}

TermValues terms_at(const BoundsQuery& query, double r0) {
  const double lower = lower_endpoint(query.delta, r0);
  TermValues t;
  t.t1 = t1_value(query.q, query.delta, r0);
  t.t2 = t2_sup(query.q, lower);
  t.t3 = t3_sup(query.q, lower);
  t.t4 = t4_sup(query.q);
  return t;
}

AValueResult a_value(const BoundsQuery& query, const AValueOptions& opts) {
  validate(query);
  const std::size_t n = std::max<std::size_t>(opts.scan_points, 2);
  auto objective = [&](double r0) { return terms_at(query, r0).max(); };

  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= n; ++i) {
    const double v = objective(static_cast<double>(i) / static_cast<double>(n));
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  double best_r0 = static_cast<double>(best) / static_cast<double>(n);

  // Golden-section search on the cell around the scan minimum. T1 decreases
  // and T2..T4 do not decrease in r0, so the objective is unimodal there.
  double lo = static_cast<double>(best == 0 ? 0 : best - 1) / static_cast<double>(n);
  double hi = static_cast<double>(std::min(best + 1, n)) / static_cast<double>(n);
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  for (std::size_t it = 0; it < opts.golden_iterations && hi - lo > 1e-15; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = objective(x2);
    }
  }
  if (f1 < best_value) {
    best_value = f1;
    best_r0 = x1;
  }
  if (f2 < best_value) {
    best_value = f2;
    best_r0 = x2;
  }

  AValueResult out;
  out.r0_star = clamp_interval(best_r0, 1e-12, 1.0 - 1e-12);
  out.terms = terms_at(query, out.r0_star);
  out.value = out.terms.max();
  out.active_term = out.terms.argmax();
  return out;
}

GridResult a_value_grid(const BoundsQuery& query, std::size_t grid_size) {
  validate(query);
  if (grid_size < 100) throw std::domain_error("a_value_grid: grid_size must be >= 100");
  const double q = query.q;
  const std::size_t n = grid_size;
  const double h = 1.0 / static_cast<double>(n);

  // y_j = j/n on [0, 1]; suffix maxima give sup over {y_j >= L}
  std::vector<double> g2(n + 1), g3(n + 1), s2(n + 2, 0.0), s3(n + 2, 0.0);
  double padding = 0.0;
  for (std::size_t j = 0; j <= n; ++j) {
    const double y = static_cast<double>(j) * h;
    g2[j] = t2_integrand(q, y);
    g3[j] = t3_integrand(q, y);
    if (j > 0) padding = std::max({padding, std::abs(g2[j] - g2[j - 1]), std::abs(g3[j] - g3[j - 1])});
  }
  for (std::size_t j = n + 1; j-- > 0;) {
    s2[j] = std::max(g2[j], s2[j + 1]);
    s3[j] = std::max(g3[j], s3[j + 1]);
  }

  // y >= 1 through y = 1/u, u_j = j/n; u -> 0 is the y -> inf limit
  double t4 = q >= 1.0 ? 2.0 : 0.0;
  double prev = t4;
  for (std::size_t j = n; j >= 1; --j) {
    const double v = t4_integrand(q, static_cast<double>(n) / static_cast<double>(j));
    t4 = std::max(t4, v);
    if (j < n) padding = std::max(padding, std::abs(v - prev));
    prev = v;
  }

  double best = std::numeric_limits<double>::infinity();
  double prev_obj = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 1; i <= n; ++i) {
    const double r0 = static_cast<double>(i) / static_cast<double>(n + 1);
    const double lower = lower_endpoint(query.delta, r0);
    const auto first = std::min<std::size_t>(n + 1, static_cast<std::size_t>(std::ceil(lower * static_cast<double>(n))));
    const double t2 = std::max(t2_integrand(q, lower), s2[first]);
    const double t3 = std::max(t3_integrand(q, lower), s3[first]);
    const double obj = std::max({t1_value(q, query.delta, r0), t2, t3, t4});
    best = std::min(best, obj);
    if (i > 1) padding = std::max(padding, std::abs(obj - prev_obj));
    prev_obj = obj;
  }
  return {best, padding};
}

double delta1(double delta2s) {
  if (!(delta2s > 0.0 && delta2s < 1.0)) throw std::domain_error("delta1: delta2s must lie in (0, 1)");
  return std::sqrt((1.0 - delta2s) / (1.0 + delta2s));
}

QTildeResult q_tilde_max(double d1, const QTildeOptions& opts) {
  if (!(d1 > 0.0 && d1 < 1.0)) throw std::domain_error("q_tilde_max: delta1 must lie in (0, 1)");
  if (opts.grid_points < 2 || !(opts.q_floor > 0.0 && opts.q_floor < 1.0))
    throw std::domain_error("q_tilde_max: invalid grid");
  auto satisfied = [&](double q) { return a_value({q, d1}, opts.a_options).value < d1; };

  const std::size_t n = opts.grid_points;
  const double log_floor = std::log(opts.q_floor);
  std::vector<double> grid(n);
  for (std::size_t k = 0; k < n; ++k)
    grid[k] = k + 1 == n ? 1.0 : std::exp(log_floor * (1.0 - static_cast<double>(k) / static_cast<double>(n - 1)));

  std::vector<char> sat(n);
  for (std::size_t k = 0; k < n; ++k) sat[k] = satisfied(grid[k]) ? 1 : 0;

  QTildeResult out;
  std::size_t top = n;
  for (std::size_t k = n; k-- > 0;) {
    if (sat[k]) {
      top = k;
      break;
    }
  }
  if (top == n) {
    out.diagnostic = "no q on the grid satisfies a(q, delta1) < delta1 (grid floor reached)";
    return out;
  }
  out.found = true;
  out.non_monotone = std::any_of(sat.begin(), sat.begin() + static_cast<std::ptrdiff_t>(top), [](char c) { return !c; });
  if (out.non_monotone) out.diagnostic = "satisfying set is not an interval on the sampled grid";
  if (top + 1 == n) {
    out.value = out.bracket_lo = out.bracket_hi = 1.0;
    return out;
  }
  double lo = grid[top];
  double hi = grid[top + 1];
  while (hi - lo > std::min(opts.absolute_tol, opts.relative_tol * lo)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (satisfied(mid) ? lo : hi) = mid;
  }
  out.value = lo;
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  return out;
}

QTildeResult q_succ(double delta, const QTildeOptions& opts) { return q_tilde_max(delta1(delta), opts); }

double q_fail_equation(double q, double delta) {
  const double base = (2.0 - q) * delta / (1.0 + delta);
  const double power = std::exp((2.0 / q) * std::log(base));
  return power + 1.0 - (2.0 - 2.0 * delta + 2.0 * q * delta) / (q + q * delta);
}

QFailResult q_fail(double delta, const QFailOptions& opts) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("q_fail: delta must lie in (0, 1)");
  const std::size_t n = std::max<std::size_t>(opts.scan_points, 2);
  auto f = [&](double q) { return q_fail_equation(q, delta); };

  QFailResult out;
  double first_lo = 0.0, first_hi = 0.0;
  double prev_q = 1.0 / static_cast<double>(n);
  double prev_f = f(prev_q);
  bool found_first = false;
  if (prev_f == 0.0) {
    found_first = true;
    first_lo = first_hi = prev_q;
    ++out.sign_changes;
  }
  for (std::size_t i = 2; i <= n; ++i) {
    const double qi = static_cast<double>(i) / static_cast<double>(n);
    const double fi = f(qi);
    const bool change = (fi == 0.0) || (prev_f != 0.0 && (fi < 0.0) != (prev_f < 0.0));
    if (change) {
      ++out.sign_changes;
      if (!found_first) {
        found_first = true;
        first_lo = fi == 0.0 ? qi : prev_q;
        first_hi = qi;
      }
    }
    prev_q = qi;
    prev_f = fi;
  }
  out.ambiguous = out.sign_changes > 1;
  if (!found_first) {
    out.value = 1.0;
    out.residual = std::abs(f(1.0));
    return out;
  }
  out.has_root = true;
  if (first_lo == first_hi) {
    out.value = first_lo;
    out.residual = std::abs(f(first_lo));
    return out;
  }
  const RootResult root = bisect(f, first_lo, first_hi, opts.tol);
  out.value = root.value;
  out.residual = root.residual;
  return out;
}

double eta_equation(double q, double eta) {
  const double power = eta <= 0.0 ? 0.0 : std::exp((2.0 / q) * std::log(eta));
  return power + 1.0 - 2.0 * (1.0 - eta) / q;
}

RootResult eta_q(double q) {
  if (!(q > 0.0 && q <= 1.0)) throw std::domain_error("eta_q: q must lie in (0, 1]");
  return bisect([q](double eta) { return eta_equation(q, eta); }, 0.0, 1.0, 1e-12);
}

RootResult x0_const() {
  return bisect([](double x) { return std::exp(-2.0 * x) - (2.0 * x - 1.0); }, 0.5, 1.5, 1e-12);
}

double x0_companion() { return 1.0 / (2.0 * x0_const().value - 1.0); }

double nsp_constant_bound(double q, double delta2s, const AValueOptions& opts) {
  const double d1 = delta1(delta2s);
  return a_value({q, d1}, opts).value / d1;
}

RecoveryConstants recovery_constants_at(double q, double delta2s, std::size_t s, double r,
                                        const RecoveryConstantsOptions& opts) {
  if (s < 1) throw std::domain_error("recovery_constants: s must be positive");
  if (!(r > 0.0)) throw std::domain_error("recovery_constants: r must be positive");
  RecoveryConstants out;
  out.q = q;
  out.delta2s = delta2s;
  out.s = s;
  out.r = r;
  out.delta1 = delta1(delta2s);
  const double d = out.delta1 / (1.0 + r);
  out.a_at_r = a_value({q, d}, opts.a_options).value;
  if (!(out.a_at_r < d)) return out;
  out.feasible = true;

  const double inv_q = 1.0 / q;
  const double a = out.a_at_r;
  // d^q - a^q = d^q (1 - rho), rho = (a/d)^q
  const double rho = std::exp(q * std::log(a / d));
  const double log_gap = q * std::log(d) + std::log1p(-rho);
  const double a_power = opts.c0_power == C0Power::Squared ? 2.0 : 1.0;

  // bound branch: tail sum >= 2 eps / (r sqrt(1 + delta2s))
  out.C0 = std::exp(inv_q * std::numbers::ln2 + std::log(1.0 + r + out.delta1) + a_power * std::log(a) -
                    std::log(out.delta1) - inv_q * log_gap);
  const double c2_bound = std::exp(inv_q * std::log(2.0 * (1.0 + rho) / (1.0 - rho)));

  // eps branch: ||h||_2 <= C1 eps and ||h||_q^q <= K s^{1-q/2} eps^q + 2 sigma^q.
  // (u + v)^{1/q} <= 2^{1/q-1} (u^{1/q} + v^{1/q}) turns the latter into
  // C2, C3 form.
  out.C1 = 2.0 * ((1.0 + r) / (r * std::sqrt(1.0 - delta2s)) + 1.0 / (r * std::sqrt(1.0 + delta2s)));
  const double k_root = std::exp((1.0 + q) * inv_q * std::numbers::ln2) * (1.0 + r) / (r * std::sqrt(1.0 - delta2s));
  const double quasi = std::exp((inv_q - 1.0) * std::numbers::ln2);
  const double c2_eps = quasi * std::exp(inv_q * std::numbers::ln2);
  out.C2 = std::max(c2_bound, c2_eps);
  out.C3 = quasi * k_root;
  return out;
}

RecoveryConstants recovery_constants(double q, double delta2s, std::size_t s, const RecoveryConstantsOptions& opts) {
  validate({q, 0.5});
  const double d1 = delta1(delta2s);
  RecoveryConstants best;
  best.q = q;
  best.delta2s = delta2s;
  best.s = s;
  best.delta1 = d1;
  if (!(a_value({q, d1}, opts.a_options).value < d1)) return best;
  if (opts.r_grid < 1 || !(opts.r_min > 0.0 && opts.r_max > opts.r_min)) throw std::domain_error("recovery_constants: bad r grid");

  const double log_lo = std::log(opts.r_min);
  const double log_hi = std::log(opts.r_max);
  const std::size_t n = opts.r_grid;
  std::size_t count = 0;
  std::size_t best_index = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const double r = std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(k + 1) / static_cast<double>(n + 1));
    RecoveryConstants c = recovery_constants_at(q, delta2s, s, r, opts);
    if (!c.feasible) continue;
    ++count;
    const double score = c.C0 + c.C2;
    if (score < best_score) {
      best_score = score;
      best = c;
      best_index = k;
    }
  }
  best.feasible_r_count = count;
  best.r_at_grid_boundary = best.feasible && (best_index == 0 || best_index + 1 == n);
  return best;
}

std::vector<double> default_delta_grid(std::size_t points) {
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i) out[i] = static_cast<double>(i + 1) / static_cast<double>(points + 1);
  return out;
}

std::vector<ThresholdCurvePoint> threshold_curve(const std::vector<double>& deltas, const QTildeOptions& opts) {
  std::vector<ThresholdCurvePoint> out;
  out.reserve(deltas.size());
  for (double d : deltas) {
    const QTildeResult succ = q_succ(d, opts);
    const QFailResult fail = q_fail(d);
    out.push_back({d, succ.value, fail.value, succ.non_monotone, fail.ambiguous});
  }
  return out;
}

}  // namespace lqcert::bounds
