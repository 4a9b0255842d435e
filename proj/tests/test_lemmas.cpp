#include "lqcert/lemmas.hpp"

#include "lqcert/bounds.hpp"

#include <doctest.h>

#include <cmath>

using namespace lqcert;
using namespace lqcert::lemmas;

TEST_SUITE("lemmas") {

TEST_CASE("instance validation") {
  CHECK_THROWS_AS(validate(Lemma21Instance{0.0, 1, 1, 0, 1, 0}), std::domain_error);
  CHECK_THROWS_AS(validate(Lemma21Instance{0.5, 0, 1, 0, 1, 0}), std::domain_error);
  CHECK_THROWS_AS(validate(Lemma21Instance{0.5, 1, 1, 1.5, 1, 0}), std::domain_error);
  CHECK_THROWS_AS(validate(Lemma21Instance{0.5, 1, 1, 0.5, 0, 0}), std::domain_error);
  CHECK_THROWS_AS(f_brute(Lemma21Instance{0.5, 1, 1, 0, 6, 0}, 64), std::domain_error);
}

TEST_CASE("one variable: the supremum sits at an endpoint") {
  // m = 1: the objective (n + a + t) / (n + b + t^q)^{1/q} on [c, 1]
  for (double q : {0.2, 0.5, 1.0}) {
    for (double c : {0.0, 0.3}) {
      const Lemma21Instance inst{q, 0.7, 1.3, c, 1, 2};
      const auto g = [&](double t) { return (2 + 0.7 + t) / std::pow(2 + 1.3 + std::pow(t, q), 1 / q); };
      CHECK(f_closed(inst) == doctest::Approx(std::max(g(c), g(1.0))).epsilon(1e-12));
      double scan = 0.0;
      for (int k = 0; k <= 100000; ++k) scan = std::max(scan, g(c + (1 - c) * k / 100000.0));
      CHECK(scan <= f_closed(inst) * (1 + 1e-12));
    }
  }
}

TEST_CASE("closed form bounds the grid search from above within padding") {
  for (std::size_t m = 1; m <= 3; ++m) {
    for (double q : {0.25, 0.6, 1.0}) {
      for (double c : {0.0, 0.5, 1.0}) {
        const Lemma21Instance inst{q, 0.4, 0.9, c, m, 1};
        const BruteResult b = f_brute(inst, 48);
        const double closed = f_closed(inst);
        CHECK(b.value <= closed * (1 + 1e-12));
        CHECK(closed - b.value <= b.padding + 1e-12);
      }
    }
  }
}

TEST_CASE("symmetric a = b reduces to the q = 1 ratio") {
  const Lemma21Instance inst{1.0, 0.5, 0.5, 0.0, 2, 1};
  CHECK(f_closed(inst) == doctest::Approx(1.0));
}

TEST_CASE("lemma22 coefficient and grid check") {
  Lemma22Params p;
  p.q = 0.5;
  p.a1 = 1.0; p.a2 = 0.5; p.a3 = 0.2;
  p.b1 = 1.0; p.b2 = 0.8; p.b3 = 0.3;
  p.c1 = 0.2; p.c2 = 0.9;
  for (std::size_t m : {0u, 1u, 2u}) {
    p.m = m;
    CHECK(lemma22_coefficient(p) > 0.0);
    const Lemma22Result r = lemma22_check(p, 12);
    CHECK(r.passed);
    CHECK(r.worst_ratio <= 1.0 + 1e-12);
    CHECK(r.points > 0);
  }
  p.c1 = 1.0;
  p.m = 1;
  CHECK(lemma22_check(p, 12).passed);
  p.c1 = 1.5;
  CHECK_THROWS_AS(validate(p), std::domain_error);
}

TEST_CASE("lemma23 on a geometric sequence") {
  Lemma23Instance inst;
  inst.q = 0.5;
  inst.s = 3;
  inst.delta = 0.5;
  inst.sequence = {1.0, 1.0, 1.0, 0.9, 0.9, 0.9};  // K = 2 blocks
  const Lemma23Result r = lemma23_check(inst);
  REQUIRE(r.status != Lemma23Status::Rejected);
  CHECK(r.status == Lemma23Status::Passed);
  // independent evaluation of both sides
  const double lhs = std::sqrt(3 * 0.81);
  double sum_q = 0.0;
  for (double v : inst.sequence) sum_q += std::pow(v, 0.5);
  const double rhs = bounds::a_value({0.5, 0.5}).value * std::pow(3.0, 0.5 - 2.0) * sum_q * sum_q;
  CHECK(r.lhs == doctest::Approx(lhs).epsilon(1e-12));
  CHECK(r.rhs == doctest::Approx(rhs).epsilon(1e-9));
  CHECK(r.slack == doctest::Approx(1 - lhs / rhs).epsilon(1e-9));
}

TEST_CASE("lemma23 rejects sequences outside the hypothesis") {
  Lemma23Instance inst;
  inst.q = 0.5;
  inst.s = 2;
  inst.delta = 0.9;
  inst.sequence = {1.0, 1.0, 0.01, 0.0};
  CHECK(lemma23_check(inst).status == Lemma23Status::Rejected);
  inst.sequence = {1.0, 2.0};
  CHECK_THROWS_AS(lemma23_check(inst), std::domain_error);
  inst.sequence = {1.0, 1.0, 1.0, -1.0};
  CHECK_THROWS_AS(lemma23_check(inst), std::domain_error);
}

TEST_CASE("generated sequences are nonincreasing and nonnegative") {
  for (auto shape : {SequenceShape::Geometric, SequenceShape::Flat, SequenceShape::SingleStep, SequenceShape::PowerLaw}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto v = make_sequence(shape, 3, 4, seed);
      CHECK(v.size() == 12);
      for (std::size_t i = 0; i < v.size(); ++i) {
        CHECK(v[i] >= 0.0);
        if (i > 0) CHECK(v[i] <= v[i - 1]);
      }
    }
  }
}

TEST_CASE("small suites pass") {
  SuiteOptions o;
  o.instances = 10;
  CHECK(run_lemma21_suite(o).passed());
  CHECK(run_lemma22_suite(o).passed());
  o.instances = 100;
  const SuiteReport r = run_lemma23_suite(o);
  CHECK(r.passed());
  CHECK(r.instances == 100);
  CHECK(r.slacks.size() == 100);
  CHECK(r.split_inconsistent == 0);
}

}  // TEST_SUITE
