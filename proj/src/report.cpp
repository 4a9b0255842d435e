#include "lqcert/report.hpp"

#include "lqcert/io.hpp"

#include <algorithm>
#include <cmath>

namespace lqcert::report {

using nlohmann::json;

json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return io::round12(v);
}

json to_json(const rip::RipReport& r) {
  return {{"order", r.order},       {"alpha", number(r.alpha)},   {"beta", number(r.beta)},
          {"delta", number(r.delta)}, {"certified", r.certified}, {"subsets_examined", r.subsets_examined}};
}

json to_json(const rip::Rescaled& r) {
  return {{"delta", number(r.delta)},
          {"scale", number(r.scale)},
          {"alpha", number(r.bounds.alpha)},
          {"beta", number(r.bounds.beta)},
          {"certified", r.bounds.certified}};
}

json to_json(const rip::UniqueDetermination& u) {
  return {{"determined", u.determined}, {"rank_path", u.rank_path},   {"alpha_path", u.alpha_path},
          {"paths_agree", u.paths_agree}, {"certified", u.certified}, {"explanation", u.explanation}};
}

json to_json(const nsp::NspReport& r) {
  json out = {{"s", r.s},
              {"q", number(r.q)},
              {"gamma_lower", number(r.gamma_lower)},
              {"gamma_estimate", number(r.gamma_estimate)},
              {"certified", r.certified},
              {"kernel_dimension", r.kernel_dimension}};
  out["rip_bound"] = r.rip_bound ? number(*r.rip_bound) : json(nullptr);
  return out;
}

json to_json(const nsp::QsEstimate& e) {
  return {{"value", number(e.value)}, {"certified", e.certified}, {"diagnostic", e.diagnostic}};
}

json to_json(const bounds::AValueResult& a) {
  return {{"value", number(a.value)},
          {"r0_star", number(a.r0_star)},
          {"active_term", bounds::to_string(a.active_term)},
          {"terms", {number(a.terms.t1), number(a.terms.t2), number(a.terms.t3), number(a.terms.t4)}}};
}

json to_json(const bounds::RecoveryConstants& c) {
  return {{"feasible", c.feasible},
          {"q", number(c.q)},
          {"delta2s", number(c.delta2s)},
          {"delta1", number(c.delta1)},
          {"s", c.s},
          {"r", number(c.r)},
          {"a_at_r", number(c.a_at_r)},
          {"C0", number(c.C0)},
          {"C1", number(c.C1)},
          {"C2", number(c.C2)},
          {"C3", number(c.C3)},
          {"feasible_r_count", c.feasible_r_count},
          {"r_at_grid_boundary", c.r_at_grid_boundary}};
}

json to_json(const bounds::QTildeResult& r) {
  return {{"value", number(r.value)},
          {"found", r.found},
          {"non_monotone", r.non_monotone},
          {"bracket", {number(r.bracket_lo), number(r.bracket_hi)}},
          {"diagnostic", r.diagnostic}};
}

json to_json(const bounds::QFailResult& r) {
  return {{"value", number(r.value)},
          {"has_root", r.has_root},
          {"ambiguous", r.ambiguous},
          {"residual", number(r.residual)},
          {"sign_changes", r.sign_changes}};
}

json to_json(const lemmas::SuiteReport& r) {
  json failing = json::array();
  for (const auto& f : r.failing)
    failing.push_back({{"index", f.index}, {"instance", json::parse(f.instance)}, {"measure", number(f.measure)}});
  json out = {{"suite", r.name},
              {"passed", r.passed()},
              {"instances", r.instances},
              {"rejected", r.rejected},
              {"failures", r.failures},
              {"worst", number(r.worst)},
              {"failing", failing}};
  if (r.name == "lemma21") {
    out["upper_violations"] = r.upper_violations;
    out["gap_violations"] = r.gap_violations;
  }
  if (r.name == "lemma23") {
    out["case_two"] = r.case_two;
    out["split_inconsistent"] = r.split_inconsistent;
    if (!r.slacks.empty()) {
      std::vector<double> sorted = r.slacks;
      std::sort(sorted.begin(), sorted.end());
      auto quantile = [&](double p) { return sorted[static_cast<std::size_t>(p * static_cast<double>(sorted.size() - 1))]; };
      out["slack_quantiles"] = {{"min", number(sorted.front())},
                                {"p10", number(quantile(0.1))},
                                {"median", number(quantile(0.5))},
                                {"max", number(sorted.back())}};
    }
  }
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace lqcert::report
