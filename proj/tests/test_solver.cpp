#include "lqcert/solver.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace lqcert;

TEST_SUITE("solver") {

TEST_CASE("sparse signals are recovered exactly") {
  std::size_t ok = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DenseMatrix a = oracles::gaussian(8, 12, seed) / std::sqrt(8.0);
    const SignalVector x = oracles::sparse_vector(12, 2, seed + 500);
    solver::SolverOptions o;
    o.q = 0.5;
    o.seed = seed;
    const solver::RecoveryOutcome r = solver::irls_equality(a, a * x, o);
    CHECK(r.feasibility_residual <= solver::equality_tolerance(a * x));
    CHECK(r.objective == doctest::Approx(quasi_norm_pow(r.x_hat, 0.5)).epsilon(1e-9));
    if ((r.x_hat - x).norm() <= 1e-6 * x.norm()) {
      ++ok;
      CHECK(r.objective <= quasi_norm_pow(x, 0.5) * (1 + 1e-6));
    }
  }
  CHECK(ok >= 19);
}

TEST_CASE("identity returns the measurement") {
  const SignalVector z = oracles::gaussian_vector(5, 3);
  solver::SolverOptions o;
  o.q = 0.4;
  CHECK((solver::irls_equality(DenseMatrix::Identity(5, 5), z, o).x_hat - z).norm() <= 1e-14 * z.norm());
}

TEST_CASE("scaling A and z together leaves the solution unchanged") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DenseMatrix a = oracles::gaussian(6, 10, seed + 200);
    const SignalVector x = oracles::sparse_vector(10, 2, seed + 201);
    solver::SolverOptions o;
    o.q = 0.6;
    const solver::RecoveryOutcome base = solver::irls_equality(a, a * x, o);
    const solver::RecoveryOutcome scaled = solver::irls_equality(3.0 * a, 3.0 * (a * x), o);
    CHECK((base.x_hat - scaled.x_hat).norm() <= 1e-9 * std::max(1.0, base.x_hat.norm()));
  }
}

TEST_CASE("success at q carries over to q/2 on the default fixture") {
  // orthonormal rows, 8 x 12, exhaustively certified at order 4
  const DenseMatrix a = [] {
    const DenseMatrix g = oracles::gaussian(12, 8, 0);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    return DenseMatrix(qr.householderQ() * Eigen::MatrixXd::Identity(12, 8)).transpose().eval();
  }();
  std::size_t checked = 0;
  for (std::uint64_t t = 0; t < 30; ++t) {
    const SignalVector x = oracles::sparse_vector(12, 2, t + 900);
    for (double q : {1.0, 0.5, 0.25}) {
      solver::SolverOptions o;
      o.q = q;
      const auto ok = [&](double qq) {
        o.q = qq;
        return (solver::irls_equality(a, a * x, o).x_hat - x).norm() <= 1e-6 * x.norm();
      };
      if (ok(q)) {
        ++checked;
        CHECK(ok(q / 2));
      }
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("zero measurement gives the zero signal") {
  const DenseMatrix a = oracles::gaussian(4, 6, 1);
  solver::SolverOptions o;
  o.q = 0.7;
  const solver::RecoveryOutcome r = solver::irls_equality(a, SignalVector::Zero(4), o);
  CHECK(r.x_hat.isZero());
  CHECK(r.objective == 0.0);
}

TEST_CASE("measurement outside the range is infeasible") {
  DenseMatrix a = DenseMatrix::Zero(3, 4);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  SignalVector z(3);
  z << 1.0, 1.0, 1.0;
  solver::SolverOptions o;
  CHECK_THROWS_AS(solver::irls_equality(a, z, o), Infeasible);
  CHECK_THROWS_AS(solver::irls_noisy(a, z, 0.5, o), Infeasible);
}

TEST_CASE("option and shape validation") {
  const DenseMatrix a = oracles::gaussian(3, 5, 2);
  solver::SolverOptions o;
  o.q = 0.0;
  CHECK_THROWS_AS(solver::irls_equality(a, SignalVector::Ones(3), o), std::domain_error);
  o.q = 1.5;
  CHECK_THROWS_AS(solver::irls_equality(a, SignalVector::Ones(3), o), std::domain_error);
  o.q = 0.5;
  CHECK_THROWS_AS(solver::irls_equality(a, SignalVector::Ones(4), o), std::domain_error);
  CHECK_THROWS_AS(solver::irls_noisy(a, SignalVector::Ones(3), -1.0, o), std::domain_error);
}

TEST_CASE("smoothed surrogate is nonincreasing along the iterations") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DenseMatrix a = oracles::gaussian(6, 10, seed + 40);
    const SignalVector z = oracles::gaussian_vector(6, seed + 80);
    solver::SolverOptions o;
    o.q = 1.0;
    o.restarts = 1;
    o.record_history = true;
    const solver::RecoveryOutcome r = solver::irls_equality(a, z, o);
    REQUIRE(r.surrogate_history.size() >= 2);
    for (std::size_t i = 1; i < r.surrogate_history.size(); ++i)
      CHECK(r.surrogate_history[i] <= r.surrogate_history[i - 1] * (1 + 1e-9));
  }
}

TEST_CASE("noisy solver respects the residual bound") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DenseMatrix a = oracles::gaussian(8, 12, seed) / std::sqrt(8.0);
    const SignalVector x = oracles::sparse_vector(12, 2, seed + 7);
    const SignalVector noise = oracles::gaussian_vector(8, seed + 9).normalized() * 0.05;
    const SignalVector y = a * x + noise;
    solver::SolverOptions o;
    o.q = 0.5;
    const solver::RecoveryOutcome r = solver::irls_noisy(a, y, 0.05, o);
    CHECK(r.feasibility_residual <= 0.05 * (1 + 1e-9));
    // the truth is feasible, so the returned point should not be worse
    CHECK(r.objective <= quasi_norm_pow(x, 0.5) * (1 + 1e-6));
  }
}

TEST_CASE("noiseless sparse signal gives zero error") {
  const DenseMatrix a = oracles::gaussian(8, 12, 77) / std::sqrt(8.0);
  const SignalVector x = oracles::sparse_vector(12, 2, 78);
  solver::SolverOptions o;
  o.q = 0.3;
  CHECK((solver::irls_noisy(a, a * x, 0.0, o).x_hat - x).norm() <= 1e-6 * x.norm());
}

TEST_CASE("noisy solver edge cases") {
  const DenseMatrix a = oracles::gaussian(4, 6, 3);
  const SignalVector x = oracles::sparse_vector(6, 1, 4);
  solver::SolverOptions o;
  o.q = 0.5;
  const solver::RecoveryOutcome exact = solver::irls_noisy(a, a * x, 0.0, o);
  const solver::RecoveryOutcome direct = solver::irls_equality(a, a * x, o);
  CHECK(exact.x_hat == direct.x_hat);
  const SignalVector small = SignalVector::Constant(4, 0.01);
  const solver::RecoveryOutcome zero = solver::irls_noisy(a, small, 1.0, o);
  CHECK(zero.x_hat.isZero());
}

TEST_CASE("brute force finds the sparsest representation") {
  const DenseMatrix a = oracles::gaussian(5, 8, 12);
  const SignalVector x = oracles::sparse_vector(8, 2, 13);
  const solver::BruteForceResult b = solver::brute_force_lq_min(a, a * x, 0.5, 5);
  CHECK(b.feasible);
  CHECK(b.global);
  CHECK((b.outcome.x_hat - x).norm() <= 1e-8 * x.norm());
  const solver::BruteForceResult restricted = solver::brute_force_lq_min(a, a * x, 0.5, 2);
  CHECK_FALSE(restricted.global);
  CHECK(restricted.outcome.objective == doctest::Approx(b.outcome.objective));
}

TEST_CASE("brute force flags ties") {
  // columns e1 and e1 again: z = e1 has two distinct 1-sparse minimizers
  DenseMatrix a = DenseMatrix::Zero(2, 3);
  a(0, 0) = 1.0;
  a(0, 1) = 1.0;
  a(1, 2) = 1.0;
  SignalVector z(2);
  z << 1.0, 0.0;
  const solver::BruteForceResult b = solver::brute_force_lq_min(a, z, 0.5, 2);
  CHECK(b.tie);
  CHECK(b.tied_candidates >= 2);
  CHECK(b.outcome.objective == doctest::Approx(1.0));
}

TEST_CASE("brute force budget") {
  const DenseMatrix a = oracles::gaussian(6, 20, 1);
  CHECK_THROWS_AS(solver::brute_force_lq_min(a, oracles::gaussian_vector(6, 2), 0.5, 6, 1000), BudgetExceeded);
}

}  // TEST_SUITE
