#include "lqcert/lemmas.hpp"

#include "lqcert/bounds.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace lqcert::lemmas {
namespace {

constexpr double kRelTol = 1e-12;

// (num) / (den)^{1/q} through logs; den > 0.
double ratio_pow(double num, double den, double q) { return num * std::exp(-std::log(den) / q); }

// Visits every nondecreasing tuple 0 <= j_1 <= ... <= j_m <= top.
template <class Visit>
void for_each_sorted_tuple(std::size_t m, std::size_t top, Visit&& visit) {
  std::vector<std::size_t> j(m, 0);
  if (m == 0) {
    visit(j);
    return;
  }
  while (true) {
    visit(j);
    std::size_t k = m;
    while (k > 0 && j[k - 1] == top) --k;
    if (k == 0) return;
    const std::size_t v = j[k - 1] + 1;
    for (std::size_t i = k - 1; i < m; ++i) j[i] = v;
  }
}

std::vector<double> power_table(std::size_t grid, double q, double scale = 1.0) {
  std::vector<double> out(grid + 1);
  for (std::size_t j = 0; j <= grid; ++j) out[j] = std::pow(scale * static_cast<double>(j) / static_cast<double>(grid), q);
  return out;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

nlohmann::json instance_json(const Lemma21Instance& i) {
  return {{"q", i.q}, {"a", i.a}, {"b", i.b}, {"c", i.c}, {"m", i.m}, {"n", i.n}};
}

nlohmann::json instance_json(const Lemma22Params& p) {
  return {{"q", p.q}, {"a1", p.a1}, {"a2", p.a2}, {"a3", p.a3}, {"b1", p.b1}, {"b2", p.b2},
          {"b3", p.b3}, {"c1", p.c1}, {"c2", p.c2}, {"m", p.m}};
}

nlohmann::json instance_json(const Lemma23Instance& i) {
  return {{"q", i.q}, {"s", i.s}, {"delta", i.delta}, {"sequence", i.sequence}};
}

}  // namespace

void validate(const Lemma21Instance& inst) {
  if (!(inst.q > 0.0 && inst.q <= 1.0)) throw std::domain_error("lemma21: q must lie in (0, 1]");
  if (!(inst.a > 0.0) || !(inst.b > 0.0) || !std::isfinite(inst.a) || !std::isfinite(inst.b))
    throw std::domain_error("lemma21: a and b must be positive");
  if (!(inst.c >= 0.0 && inst.c <= 1.0)) throw std::domain_error("lemma21: c must lie in [0, 1]");
  if (inst.m < 1) throw std::domain_error("lemma21: m must be positive");
}

double f_closed(const Lemma21Instance& inst) {
  validate(inst);
  const double n = static_cast<double>(inst.n);
  double best = ratio_pow(n + inst.a + inst.c, n + inst.b + std::pow(inst.c, inst.q), inst.q);
  for (std::size_t k = 1; k <= inst.m; ++k) {
    const double kk = static_cast<double>(k);
    best = std::max(best, ratio_pow(n + kk + inst.a, n + kk + inst.b, inst.q));
  }
  return best;
}

BruteResult f_brute(const Lemma21Instance& inst, std::size_t grid, std::uint64_t budget) {
  validate(inst);
  if (inst.m > 5) throw std::domain_error("f_brute: m must be <= 5");
  if (grid < 32) throw std::domain_error("f_brute: grid must be >= 32");
  if (binomial(grid + inst.m, inst.m) > budget) throw BudgetExceeded("f_brute: grid enumeration exceeds budget");

  const std::vector<double> tq = power_table(grid, inst.q);
  const double h = 1.0 / static_cast<double>(grid);
  const double base_num = static_cast<double>(inst.n) + inst.a;
  const double base_den = static_cast<double>(inst.n) + inst.b;
  auto g = [&](double sum_t, double sum_tq) { return ratio_pow(base_num + sum_t, base_den + sum_tq, inst.q); };

  BruteResult out;
  double max_step = 0.0;
  for_each_sorted_tuple(inst.m, grid, [&](const std::vector<std::size_t>& j) {
    double sum_t = 0.0, sum_tq = 0.0;
    for (std::size_t v : j) {
      sum_t += static_cast<double>(v) * h;
      sum_tq += tq[v];
    }
    const double here = g(sum_t, sum_tq);
    ++out.evaluations;
    if (sum_t >= inst.c - kRelTol) out.value = std::max(out.value, here);
    for (std::size_t v : j) {
      if (v == grid) continue;
      const double next = g(sum_t + h, sum_tq - tq[v] + tq[v + 1]);
      max_step = std::max(max_step, std::abs(next - here));
    }
  });
  out.padding = static_cast<double>(inst.m) * max_step;
  return out;
}

void validate(const Lemma22Params& p) {
  if (!(p.q > 0.0 && p.q <= 1.0)) throw std::domain_error("lemma22: q must lie in (0, 1]");
  for (double v : {p.a1, p.a2, p.a3, p.b1, p.b2, p.b3})
    if (!(v > 0.0) || !std::isfinite(v)) throw std::domain_error("lemma22: a_i and b_i must be positive");
  if (!(p.c1 >= 0.0 && p.c1 <= 1.0 && p.c2 >= 0.0 && p.c2 <= 1.0))
    throw std::domain_error("lemma22: c1 and c2 must lie in [0, 1]");
}

double lemma22_coefficient(const Lemma22Params& p) {
  validate(p);
  const double q = p.q;
  const double c1q = std::pow(p.c1, q);
  const double c2q = std::pow(p.c2, q);
  double best = std::max(ratio_pow(p.a1 + p.a2, p.b1 + p.b2, q), ratio_pow(p.a1 + p.a2 * p.c1, p.b1 + p.b2 * c1q, q));
  for (std::size_t l = 0; l <= p.m; ++l) {
    const double ll = static_cast<double>(l);
    best = std::max(best, ratio_pow(p.a1 + p.a2 + (p.a3 + ll) * p.c2, p.b1 + p.b2 + (p.b3 + ll) * c2q, q));
    best = std::max(best, ratio_pow(p.a1 + p.a2 * p.c1 + (p.a3 + ll) * p.c2,
                                    p.b1 + p.b2 * c1q + (p.b3 + ll) * c2q, q));
  }
  return best;
}

Lemma22Result lemma22_check(const Lemma22Params& p, std::size_t grid, std::uint64_t budget) {
  const double coeff = lemma22_coefficient(p);
  if (grid < 1) throw std::domain_error("lemma22_check: grid must be positive");
  const std::uint64_t tuples = binomial(grid + p.m, p.m);
  const std::uint64_t plane = static_cast<std::uint64_t>(grid + 1) * (grid + 1);
  if (tuples > budget / plane) throw BudgetExceeded("lemma22_check: grid enumeration exceeds budget");

  const double g = static_cast<double>(grid);
  const std::vector<double> frac_q = power_table(grid, p.q);
  Lemma22Result out;
  for (std::size_t ix = 0; ix <= grid; ++ix) {
    const double x = p.c1 + (1.0 - p.c1) * static_cast<double>(ix) / g;
    const double xq = std::pow(x, p.q);
    for (std::size_t iy = 0; iy <= grid; ++iy) {
      const double y = p.c2 * static_cast<double>(iy) / g;
      const double yq = std::pow(y, p.q);
      for_each_sorted_tuple(p.m, grid, [&](const std::vector<std::size_t>& j) {
        double lhs = p.a1 + p.a2 * x + p.a3 * y;
        double rhs = p.b1 + p.b2 * xq + p.b3 * yq;
        for (std::size_t v : j) {
          lhs += y * static_cast<double>(v) / g;
          rhs += yq * frac_q[v];
        }
        out.worst_ratio = std::max(out.worst_ratio, ratio_pow(lhs, rhs, p.q) / coeff);
        ++out.points;
      });
    }
  }
  out.passed = out.worst_ratio <= 1.0 + kRelTol;
  return out;
}

std::string to_string(Lemma23Status status) {
  switch (status) {
    case Lemma23Status::Passed: return "passed";
    case Lemma23Status::Failed: return "failed";
    case Lemma23Status::Rejected: return "rejected";
  }
  return "unknown";
}

Lemma23Result lemma23_check(const Lemma23Instance& inst) {
  bounds::validate({inst.q, inst.delta});
  if (inst.s < 1) throw std::domain_error("lemma23: s must be positive");
  if (inst.sequence.empty()) throw std::domain_error("lemma23: sequence must be nonempty");
  const auto& a = inst.sequence;
  const std::size_t s = inst.s;
  auto at = [&](std::size_t i) { return i < a.size() ? a[i] : 0.0; };  // 0-based, zero padded

  Lemma23Result out;
  out.lhs = block_l2_tail(a, s);  // validates monotonicity and sign
  double head = 0.0;
  for (std::size_t i = 0; i < s; ++i) head += at(i) * at(i);
  head = std::sqrt(head);
  if (out.lhs < inst.delta * head) return out;  // Rejected

  const bounds::AValueResult av = bounds::a_value({inst.q, inst.delta});
  out.r0 = av.r0_star;
  const Eigen::Map<const SignalVector> view(a.data(), static_cast<Eigen::Index>(a.size()));
  const double top = view.maxCoeff();
  if (out.lhs == 0.0 || top == 0.0) {
    out.status = Lemma23Status::Passed;
    out.slack = 1.0;
    return out;
  }
  // log of a(q, delta) s^{1/2-1/q} ||a||_q with ||a||_q = top (sum (a_j/top)^q)^{1/q}
  double power_sum = 0.0;
  for (double v : a) power_sum += std::pow(v / top, inst.q);
  const double log_rhs = std::log(av.value) + (0.5 - 1.0 / inst.q) * std::log(static_cast<double>(s)) +
                         std::log(top) + std::log(power_sum) / inst.q;
  out.rhs = std::exp(log_rhs);
  const double ratio = std::exp(std::log(out.lhs) - log_rhs);
  out.slack = 1.0 - ratio;
  out.status = ratio <= 1.0 + kRelTol ? Lemma23Status::Passed : Lemma23Status::Failed;

  const double lead = at(s);  // a_{s+1}
  if (lead > 0.0) {
    double later = 0.0;
    for (std::size_t k = 2; k * s < a.size(); ++k) later += at(k * s);
    out.case_two = later < out.r0 * inst.delta * lead;
  }
  if (out.case_two) {
    const double sd = static_cast<double>(s);
    for (std::size_t s0 = 1; s0 <= s; ++s0) {
      if (at(s + s0) / lead <= std::sqrt(static_cast<double>(s0) / sd)) {
        out.s0 = s0;
        break;
      }
    }
    const double s0d = static_cast<double>(out.s0);
    const bool lower_ratio = at(s + out.s0 - 1) / lead >= std::sqrt((s0d - 1.0) / sd) - kRelTol;
    const double one_minus = 1.0 - out.r0;
    const bool size_bound = s0d >= one_minus * one_minus * inst.delta * inst.delta * sd / 2.0 - kRelTol;
    out.split_consistent = out.s0 >= 1 && lower_ratio && size_bound;
  }
  return out;
}

std::string to_string(SequenceShape shape) {
  switch (shape) {
    case SequenceShape::Geometric: return "geometric";
    case SequenceShape::Flat: return "flat";
    case SequenceShape::SingleStep: return "single_step";
    case SequenceShape::PowerLaw: return "power_law";
  }
  return "unknown";
}

std::vector<double> make_sequence(SequenceShape shape, std::size_t s, std::size_t blocks, std::uint64_t seed) {
  if (s < 1 || blocks < 1) throw std::domain_error("make_sequence: s and blocks must be positive");
  std::mt19937_64 rng(seed);
  const std::size_t len = s * blocks;
  const double scale = uniform(rng, 0.1, 10.0);
  std::vector<double> out(len);
  switch (shape) {
    case SequenceShape::Geometric: {
      const double rho = uniform(rng, 0.3, 0.999);
      for (std::size_t j = 0; j < len; ++j) out[j] = scale * std::pow(rho, static_cast<double>(j));
      break;
    }
    case SequenceShape::Flat:
      std::fill(out.begin(), out.end(), scale);
      break;
    case SequenceShape::SingleStep: {
      // drops inside the second block are the adversarial placements
      const std::size_t step = len > 1 ? pick(rng, 1, len - 1) : 1;
      const double low = pick(rng, 0, 3) == 0 ? 0.0 : uniform(rng, 0.0, 0.5);
      for (std::size_t j = 0; j < len; ++j) out[j] = j < step ? scale : scale * low;
      break;
    }
    case SequenceShape::PowerLaw: {
      const double p = uniform(rng, 0.1, 3.0);
      for (std::size_t j = 0; j < len; ++j) out[j] = scale * std::pow(static_cast<double>(j + 1), -p);
      break;
    }
  }
  return out;
}

SuiteReport run_lemma21_suite(const SuiteOptions& opts) {
  SuiteReport out;
  out.name = "lemma21";
  const std::size_t count = opts.instances ? opts.instances : 100;
  const std::size_t grid = opts.grid ? opts.grid : 64;
  for (std::size_t i = 0; i < count; ++i) {
    std::mt19937_64 rng(mix_seed(opts.seed, i));
    Lemma21Instance inst;
    inst.q = uniform(rng, 0.1, 1.0);
    inst.a = uniform(rng, 0.1, 3.0);
    inst.b = uniform(rng, 0.1, 3.0);
    inst.c = uniform(rng, 0.0, 1.0);
    inst.m = pick(rng, 1, 4);
    inst.n = pick(rng, 0, 3);
    const double closed = f_closed(inst);
    const BruteResult brute = f_brute(inst, grid, opts.budget);
    ++out.instances;
    const double gap = closed - brute.value;
    const bool upper_ok = brute.value <= closed * (1.0 + kRelTol);
    const bool gap_ok = gap <= brute.padding + kRelTol * closed;
    if (!upper_ok) ++out.upper_violations;
    if (!gap_ok) ++out.gap_violations;
    if (brute.padding > 0.0) out.worst = std::max(out.worst, gap / brute.padding);
    if (!upper_ok || !gap_ok) {
      ++out.failures;
      out.failing.push_back({i, instance_json(inst).dump(), gap});
    }
  }
  return out;
}

SuiteReport run_lemma22_suite(const SuiteOptions& opts) {
  SuiteReport out;
  out.name = "lemma22";
  const std::size_t count = opts.instances ? opts.instances : 100;
  const std::size_t grid = opts.grid ? opts.grid : 16;
  for (std::size_t i = 0; i < count; ++i) {
    std::mt19937_64 rng(mix_seed(opts.seed, i));
    Lemma22Params p;
    p.q = uniform(rng, 0.1, 1.0);
    p.a1 = uniform(rng, 0.1, 3.0);
    p.a2 = uniform(rng, 0.1, 3.0);
    p.a3 = uniform(rng, 0.1, 3.0);
    p.b1 = uniform(rng, 0.1, 3.0);
    p.b2 = uniform(rng, 0.1, 3.0);
    p.b3 = uniform(rng, 0.1, 3.0);
    p.c1 = uniform(rng, 0.0, 1.0);
    p.c2 = uniform(rng, 0.0, 1.0);
    p.m = pick(rng, 0, 3);
    const Lemma22Result r = lemma22_check(p, grid, opts.budget);
    ++out.instances;
    out.worst = std::max(out.worst, r.worst_ratio);
    if (!r.passed) {
      ++out.failures;
      out.failing.push_back({i, instance_json(p).dump(), r.worst_ratio});
    }
  }
  return out;
}

SuiteReport run_lemma23_suite(const SuiteOptions& opts) {
  SuiteReport out;
  out.name = "lemma23";
  out.worst = 1.0;
  const std::size_t count = opts.instances ? opts.instances : 1000;
  const std::size_t max_attempts = 50 * count;
  for (std::size_t attempt = 0; attempt < max_attempts && out.instances < count; ++attempt) {
    const std::uint64_t seed = mix_seed(opts.seed, attempt);
    std::mt19937_64 rng(seed);
    Lemma23Instance inst;
    inst.q = uniform(rng, 0.1, 1.0);
    inst.delta = uniform(rng, 0.05, 0.95);
    inst.s = pick(rng, 1, 6);
    const std::size_t blocks = pick(rng, 2, 6);
    const auto shape = static_cast<SequenceShape>(attempt % 4);
    inst.sequence = make_sequence(shape, inst.s, blocks, mix_seed(seed, 1));
    const Lemma23Result r = lemma23_check(inst);
    if (r.status == Lemma23Status::Rejected) {
      ++out.rejected;
      continue;
    }
    ++out.instances;
    out.slacks.push_back(r.slack);
    out.worst = std::min(out.worst, r.slack);
    if (r.case_two) ++out.case_two;
    if (!r.split_consistent) ++out.split_inconsistent;
    if (r.status == Lemma23Status::Failed || !r.split_consistent) {
      ++out.failures;
      out.failing.push_back({attempt, instance_json(inst).dump(), r.slack});
    }
  }
  return out;
}

}  // namespace lqcert::lemmas
