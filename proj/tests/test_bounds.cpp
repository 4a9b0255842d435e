#include "lqcert/bounds.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace lqcert::bounds;

TEST_SUITE("bounds") {

TEST_CASE("query validation") {
  CHECK_THROWS_AS(a_value({0.0, 0.5}), std::domain_error);
  CHECK_THROWS_AS(a_value({1.1, 0.5}), std::domain_error);
  CHECK_THROWS_AS(a_value({0.5, 0.0}), std::domain_error);
  CHECK_THROWS_AS(a_value({0.5, 1.0}), std::domain_error);
  CHECK_THROWS_AS(delta1(1.0), std::domain_error);
}

TEST_CASE("T4 closed form branches") {
  CHECK(t4_sup(1.0) == doctest::Approx(2.0));
  CHECK(t4_sup(0.25) == doctest::Approx(std::pow(2.0, 1.0 - 4.0)));
  CHECK(t4_sup(0.75) == doctest::Approx(2.0 * 0.75 * std::pow(0.25, 1.0 / 0.75 - 1.0)));
  // direct scan of y >= 1
  for (double q : {0.3, 0.5, 0.6, 0.9}) {
    double best = 0.0;
    for (int k = 0; k <= 200000; ++k) best = std::max(best, t4_integrand(q, 1.0 + k * 1e-3));
    CHECK(best <= t4_sup(q) * (1 + 1e-12));
    CHECK(best >= t4_sup(q) * (1 - 1e-6));
  }
}

TEST_CASE("T2 and T3 suprema dominate a dense scan") {
  for (double q : {0.05, 0.3, 0.5, 0.8, 1.0}) {
    for (double lower : {0.0, 0.1, 0.5, 0.9}) {
      double s2 = 0.0, s3 = 0.0;
      for (int k = 0; k <= 20000; ++k) {
        const double y = lower + (1.0 - lower) * k / 20000.0;
        s2 = std::max(s2, t2_integrand(q, y));
        s3 = std::max(s3, t3_integrand(q, y));
      }
      CHECK(s2 <= t2_sup(q, lower) * (1 + 1e-12));
      CHECK(s2 >= t2_sup(q, lower) * (1 - 1e-6));
      CHECK(s3 <= t3_sup(q, lower) * (1 + 1e-12));
      CHECK(s3 >= t3_sup(q, lower) * (1 - 1e-6));
    }
  }
}

TEST_CASE("a_value agrees with the grid oracle within padding") {
  for (double q : {0.05, 0.2, 0.5, 0.8, 1.0}) {
    for (double d : {0.1, 0.5, 0.9}) {
      const AValueResult a = a_value({q, d});
      const GridResult g = a_value_grid({q, d}, 400);
      CHECK(std::abs(a.value - g.value) <= g.padding + 1e-12);
      CHECK(a.value == doctest::Approx(a.terms.max()));
      CHECK(a.r0_star > 0.0);
      CHECK(a.r0_star < 1.0);
    }
  }
}

TEST_CASE("a_value agrees with a fine grid on random queries") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> uq(0.02, 1.0), ud(0.02, 0.98);
  for (int i = 0; i < 100; ++i) {
    const BoundsQuery query{uq(rng), ud(rng)};
    CHECK(std::abs(a_value(query).value - a_value_grid(query, 6400).value) <= 1e-4);
  }
}

TEST_CASE("a_value is continuous in delta") {
  for (double q : {0.05, 0.3, 0.7, 1.0})
    for (int k = 1; k < 99; ++k) {
      const double d = k / 100.0;
      CHECK(std::abs(a_value({q, d}).value - a_value({q, d + 1e-4}).value) <= 1e-2);
    }
}

TEST_CASE("a_value reference points") {
  CHECK(a_value({0.5, 0.5}).value == doctest::Approx(0.78793).epsilon(1e-4));
  CHECK(a_value({0.3, 0.5}).value == doctest::Approx(0.57559).epsilon(1e-4));
  // at q = 1 the T4 term is 2, so the recovery condition never holds
  CHECK(a_value({1.0, 0.3}).value >= 2.0 - 1e-12);
}

TEST_CASE("a_value is nonincreasing as q decreases on the default q grid") {
  // the log-spaced grid of q_tilde_max
  const QTildeOptions grid;
  for (int i = 1; i <= 9; ++i) {
    const double d = i / 10.0;
    double prev = 0.0;
    for (std::size_t k = 0; k < grid.grid_points; ++k) {
      const double q = std::exp(std::log(grid.q_floor) * (1.0 - static_cast<double>(k) / (grid.grid_points - 1)));
      const double v = a_value({q, d}).value;
      CHECK(v >= prev * (1 - 1e-9));
      prev = v;
    }
  }
}

TEST_CASE("small-q bounds at r0 = 1 - sqrt(2)/4") {
  // d1 = 0.05, eps = 0.1, q = (e/2 - eps) d1^2
  const double d1 = 0.05, eps = 0.1;
  const double q = (std::exp(1.0) / 2 - eps) * d1 * d1;
  const double r0 = 1 - std::sqrt(2.0) / 4;
  const double target = std::sqrt(1 - eps / std::exp(1.0)) * d1;
  const double log_mid = std::log(2.0) - std::log(1.5) / q;
  CHECK(std::log(t1_value(q, d1, r0)) <= log_mid);
  CHECK(log_mid <= std::log(target));
  CHECK(t4_sup(q) / 2 <= std::pow(2.0, 1 - 1 / q) * (1 + 1e-12));
  CHECK(std::pow(2.0, 1 - 1 / q) <= target / 2);
  const double lower = std::sqrt(2.0) * (1 - r0) * d1 / 2;
  CHECK(t3_sup(q, lower) / 3 == doctest::Approx(lower / std::pow(1 + lower, 1 / q)));
  CHECK(t3_sup(q, lower) / 3 <= target / 3);
  CHECK(t2_sup(q, lower) <= target);
  // hence a(q, d1) < d1 and q lies below q_tilde_max(d1)
  CHECK(q <= q_tilde_max(d1).value);
}

TEST_CASE("delta1 and the null space bound") {
  CHECK(delta1(0.6) == doctest::Approx(0.5));
  const double d1 = delta1(0.6);
  CHECK(nsp_constant_bound(0.2, 0.6) == doctest::Approx(a_value({0.2, d1}).value / d1));
}

TEST_CASE("eta and x0 roots") {
  CHECK(eta_q(1.0).value == doctest::Approx(oracles::eta_at_q1()).epsilon(1e-10));
  for (double q : {0.1, 0.5, 0.9}) CHECK(std::abs(eta_equation(q, eta_q(q).value)) < 1e-9);
  const double x0 = x0_const().value;
  CHECK(std::exp(-2 * x0) == doctest::Approx(2 * x0 - 1).epsilon(1e-12));
  CHECK(std::abs(x0_companion() - 3.5911) <= 2e-3);
}

TEST_CASE("q_fail") {
  // at delta = 2^{-1/2} the equation has the root q = 1
  CHECK(std::abs(q_fail_equation(1.0, 1.0 / std::sqrt(2.0))) < 1e-12);
  CHECK(q_fail(1.0 / std::sqrt(2.0)).value == doctest::Approx(1.0).epsilon(1e-6));
  const QFailResult near_one = q_fail(0.999);
  CHECK(near_one.has_root);
  CHECK(std::abs(q_fail_equation(near_one.value, 0.999)) < 1e-6);
  CHECK(near_one.value / 0.001 == doctest::Approx(3.5911).epsilon(0.01));
  CHECK(q_fail(0.2).value == 1.0);
}

TEST_CASE("q_succ and q_tilde_max") {
  const QTildeResult r = q_tilde_max(0.3);
  REQUIRE(r.found);
  CHECK(a_value({r.bracket_lo, 0.3}).value < 0.3);
  CHECK(a_value({r.bracket_hi, 0.3}).value >= 0.3);
  const QTildeResult qs = q_succ(0.5);
  REQUIRE(qs.found);
  CHECK(qs.value == doctest::Approx(q_tilde_max(delta1(0.5)).value));
  CHECK(a_value({qs.bracket_lo, delta1(0.5)}).value < delta1(0.5));
  CHECK(q_succ(0.999).value / 0.001 == doctest::Approx(std::exp(1.0) / 4).epsilon(0.1));
  const double ratio = q_tilde_max(0.01).value / 1e-4;
  CHECK(ratio == doctest::Approx(std::exp(1.0) / 2).epsilon(0.1));
}

TEST_CASE("threshold curve ordering") {
  const auto pts = threshold_curve({0.05, 0.3, 0.6, 0.9, 0.99});
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(pts[i].q_succ <= pts[i].q_fail);
    if (i > 0) CHECK(pts[i].q_succ <= pts[i - 1].q_succ);
  }
  const auto grid = default_delta_grid();
  CHECK(grid.size() == 99);
  CHECK(grid.front() == doctest::Approx(0.01));
  CHECK(grid.back() == doctest::Approx(0.99));
}

TEST_CASE("recovery constants") {
  const RecoveryConstants rc = recovery_constants(0.1, 0.5, 2);
  REQUIRE(rc.feasible);
  CHECK(rc.a_at_r < rc.delta1 / (1 + rc.r));
  CHECK(rc.C0 > 0);
  CHECK(rc.C2 >= std::pow(2.0, 2.0 / 0.1 - 1.0) * (1 - 1e-12));
  CHECK(rc.feasible_r_count > 0);
  // at q = 1 a(1, d) >= 2 > d for every d, so nothing is feasible
  CHECK_FALSE(recovery_constants(1.0, 0.1, 2).feasible);
  // fixed-r constants reproduce the selected point
  const RecoveryConstants at = recovery_constants_at(0.1, 0.5, 2, rc.r);
  CHECK(at.C0 == doctest::Approx(rc.C0));
  CHECK(at.C1 == doctest::Approx(2 * ((1 + rc.r) / (rc.r * std::sqrt(0.5)) + 1 / (rc.r * std::sqrt(1.5)))));
  RecoveryConstantsOptions first;
  first.c0_power = C0Power::FirstPower;
  const RecoveryConstants lin = recovery_constants_at(0.1, 0.5, 2, rc.r, first);
  CHECK(lin.C0 == doctest::Approx(rc.C0 / rc.a_at_r));
}

TEST_CASE("bisect") {
  const RootResult r = bisect([](double x) { return x * x - 2; }, 0.0, 2.0);
  CHECK(r.value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-11));
  CHECK_THROWS(bisect([](double x) { return x * x + 1; }, 0.0, 1.0));
}

}  // TEST_SUITE
