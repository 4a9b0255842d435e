#include "lqcert/experiments.hpp"

#include "lqcert/bounds.hpp"
#include "lqcert/io.hpp"
#include "lqcert/lemmas.hpp"
#include "lqcert/nsp.hpp"
#include "lqcert/report.hpp"
#include "lqcert/rip.hpp"
#include "lqcert/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace lqcert::cli {
namespace {

using nlohmann::json;
using report::number;

const std::vector<double> kDefaultQList = {0.25, 0.5, 0.75, 1.0};

std::string fmt(double v) { return io::format_number(v); }

void write_artifact(CommandResult& result, const std::filesystem::path& path, const std::string& contents) {
  io::write_file(path, contents);
  result.written.push_back(path);
}

std::vector<std::size_t> random_support(std::size_t n, std::size_t s, std::mt19937_64& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  perm.resize(s);
  std::sort(perm.begin(), perm.end());
  return perm;
}

void check_q_list(const std::vector<double>& qs) {
  for (double q : qs)
    if (!(q > 0.0 && q <= 1.0)) throw ConfigError("q_list entries must lie in (0, 1], got " + fmt(q));
}

rip::RipOptions rip_options(const CommonOptions& common) {
  rip::RipOptions o;
  o.budget = common.budget;
  o.seed = common.seed;
  return o;
}

// ---------------------------------------------------------------- curves --

std::string curves_svg(const std::vector<bounds::ThresholdCurvePoint>& pts) {
  constexpr double w = 640, h = 400, pad = 50;
  auto px = [&](double d) { return pad + d * (w - 2 * pad); };
  auto py = [&](double q) { return h - pad - q * (h - 2 * pad); };
  auto path = [&](bool succ) {
    std::string d;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      d += (i == 0 ? "M" : " L") + fmt(io::round12(px(pts[i].delta))) + " " +
           fmt(io::round12(py(succ ? pts[i].q_succ : pts[i].q_fail)));
    }
    return d;
  };
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<line x1=\"" << pad << "\" y1=\"" << h - pad << "\" x2=\"" << w - pad << "\" y2=\"" << h - pad
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << h - pad
      << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << w / 2 << "\" y=\"" << h - 15 << "\" text-anchor=\"middle\">delta</text>\n"
      << "<text x=\"15\" y=\"" << h / 2 << "\" text-anchor=\"middle\">q</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = k / 4.0;
    out << "<text x=\"" << px(v) << "\" y=\"" << h - pad + 18 << "\" text-anchor=\"middle\" font-size=\"11\">" << v
        << "</text>\n"
        << "<text x=\"" << pad - 8 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\" font-size=\"11\">" << v
        << "</text>\n";
  }
  out << "<path d=\"" << path(true) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n"
      << "<path d=\"" << path(false) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" "
      << "stroke-dasharray=\"6 4\"/>\n"
      << "</svg>\n";
  return out.str();
}

// --------------------------------------------------------------- certify --

std::string verdict_for(bool rip_certified, std::optional<double> bound, const nsp::NspReport& gamma) {
  if (rip_certified && bound && *bound < 1.0) return "certified-recoverable";
  if (gamma.certified && gamma.gamma_estimate < 1.0) return "nsp-recoverable";
  return "uncertified";
}

// ---------------------------------------------------------------- stable --

struct StableTrial {
  double ratio_l2 = 0.0;
  double ratio_lq = 0.0;
  bool objective_not_above = true;
  json dump;
};

double bound_ratio(double lhs, double rhs, double scale) {
  if (rhs > 0.0) return lhs / rhs;
  return lhs <= 1e-6 * std::max(1.0, scale) ? 0.0 : kInfinity;
}

// -------------------------------------------------------------- verify --

json check_entry(const std::string& name, double value, double target, double tol, bool passed) {
  return {{"check", name}, {"value", number(value)}, {"target", number(target)}, {"tolerance", number(tol)},
          {"passed", passed}};
}

json bounds_asymptotics(bool& passed) {
  json checks = json::array();
  const double x0c = bounds::x0_companion();
  const bool x0_ok = std::abs(x0c - 3.5911) <= 2e-3;
  checks.push_back(check_entry("x0_companion", x0c, 3.5911, 2e-3, x0_ok));

  const double half_e = std::exp(1.0) / 2.0;
  std::vector<double> ratios;
  for (double d1 : {0.05, 0.02, 0.01}) {
    const bounds::QTildeResult r = bounds::q_tilde_max(d1);
    ratios.push_back(r.value / (d1 * d1));
  }
  const bool ratio_ok = std::abs(ratios.back() - half_e) <= 0.1 * half_e;
  const bool approach_ok = std::abs(ratios[1] - half_e) <= std::abs(ratios[0] - half_e) &&
                           std::abs(ratios[2] - half_e) <= std::abs(ratios[1] - half_e);
  checks.push_back(check_entry("q_tilde_over_delta1_sq_at_0.05", ratios[0], half_e, 0.1 * half_e, true));
  checks.push_back(check_entry("q_tilde_over_delta1_sq_at_0.02", ratios[1], half_e, 0.1 * half_e, true));
  checks.push_back(check_entry("q_tilde_over_delta1_sq_at_0.01", ratios[2], half_e, 0.1 * half_e, ratio_ok));
  checks.push_back({{"check", "q_tilde_ratio_approaches_monotonically"}, {"passed", approach_ok}});

  const double quarter_e = std::exp(1.0) / 4.0;
  const double succ = bounds::q_succ(0.999).value / 0.001;
  const bool succ_ok = std::abs(succ - quarter_e) <= 0.1 * quarter_e;
  checks.push_back(check_entry("q_succ_over_one_minus_delta_at_0.999", succ, quarter_e, 0.1 * quarter_e, succ_ok));

  const double fail = bounds::q_fail(1.0 / std::sqrt(2.0)).value;
  const bool fail_ok = std::abs(fail - 1.0) <= 1e-6;
  checks.push_back(check_entry("q_fail_at_inverse_sqrt2", fail, 1.0, 1e-6, fail_ok));

  passed = x0_ok && ratio_ok && approach_ok && succ_ok && fail_ok;
  return {{"suite", "bounds_asymptotics"}, {"passed", passed}, {"checks", checks}};
}

}  // namespace

std::string to_string(Ensemble e) {
  switch (e) {
    case Ensemble::Gaussian: return "gaussian";
    case Ensemble::OrthonormalRows: return "orthonormal_rows";
    case Ensemble::UserCsv: return "user_csv";
  }
  return "unknown";
}

Ensemble parse_ensemble(const std::string& name) {
  if (name == "gaussian") return Ensemble::Gaussian;
  if (name == "orthonormal_rows") return Ensemble::OrthonormalRows;
  if (name == "user_csv") return Ensemble::UserCsv;
  throw ConfigError("unknown ensemble '" + name + "'");
}

ExperimentConfig config_from_json(const json& j) {
  static const std::set<std::string> known = {"m",    "n",    "s",          "q_list", "ensemble",          "trials",
                                              "noise_epsilon", "seed", "output_dir", "matrix", "power_law_exponent"};
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ConfigError("unknown config field '" + key + "'");
  ExperimentConfig c;
  try {
    if (j.contains("m")) c.m = j.at("m").get<std::size_t>();
    if (j.contains("n")) c.n = j.at("n").get<std::size_t>();
    if (j.contains("s")) c.s = j.at("s").get<std::size_t>();
    if (j.contains("q_list")) c.q_list = j.at("q_list").get<std::vector<double>>();
    if (j.contains("ensemble")) c.ensemble = parse_ensemble(j.at("ensemble").get<std::string>());
    if (j.contains("trials")) c.trials = j.at("trials").get<std::size_t>();
    if (j.contains("noise_epsilon")) c.noise_epsilon = j.at("noise_epsilon").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("matrix")) c.matrix = j.at("matrix").get<std::string>();
    if (j.contains("power_law_exponent")) c.power_law_exponent = j.at("power_law_exponent").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field has the wrong type: ") + e.what());
  }
  return c;
}

json to_json(const ExperimentConfig& c) {
  json qs = json::array();
  for (double q : c.q_list) qs.push_back(number(q));
  return {{"m", c.m},
          {"n", c.n},
          {"s", c.s},
          {"q_list", qs},
          {"ensemble", to_string(c.ensemble)},
          {"trials", c.trials},
          {"noise_epsilon", number(c.noise_epsilon)},
          {"seed", c.seed},
          {"matrix", c.matrix.string()},
          {"power_law_exponent", number(c.power_law_exponent)}};
}

void validate(const ExperimentConfig& c, bool allow_zero_trials) {
  if (c.s < 1) throw ConfigError("s must be positive");
  if (!(2 * c.s <= c.m && c.m <= c.n)) throw ConfigError("config needs 2s <= m <= n");
  if (!allow_zero_trials && c.trials < 1) throw ConfigError("trials must be >= 1");
  check_q_list(c.q_list);
  if (!(c.noise_epsilon >= 0.0) || !std::isfinite(c.noise_epsilon)) throw ConfigError("noise_epsilon must be >= 0");
  if (!(c.power_law_exponent > 0.0) || !std::isfinite(c.power_law_exponent))
    throw ConfigError("power_law_exponent must be positive");
}

std::filesystem::path resolve_output_dir(const std::filesystem::path& explicit_dir) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (const char* env = std::getenv("LQCERT_OUTPUT_DIR"); env && *env) return env;
  return "lqcert_out";
}

DenseMatrix make_matrix(const ExperimentConfig& c) {
  if (c.ensemble == Ensemble::UserCsv) {
    if (c.matrix.empty()) throw ConfigError("user_csv ensemble needs a matrix path");
    return io::load_matrix(c.matrix);
  }
  const auto m = static_cast<Eigen::Index>(c.m);
  const auto n = static_cast<Eigen::Index>(c.n);
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> normal;
  if (c.ensemble == Ensemble::Gaussian) {
    DenseMatrix a(m, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(c.m));
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < n; ++j) a(i, j) = scale * normal(rng);
    return a;
  }
  Eigen::MatrixXd g(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) g(i, j) = normal(rng);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, m);
  return q.transpose();
}

CommandResult cmd_curves(const CurvesOptions& opts) {
  std::vector<double> deltas = opts.deltas;
  if (deltas.empty()) deltas = bounds::default_delta_grid(opts.common.grid ? opts.common.grid : 99);
  std::sort(deltas.begin(), deltas.end());
  for (double d : deltas)
    if (!(d > 0.0 && d < 1.0)) throw ConfigError("curve grid values must lie in (0, 1), got " + fmt(d));

  const auto pts = bounds::threshold_curve(deltas);
  CommandResult result;
  std::string csv = "delta,q_succ,q_fail\n";
  for (const auto& p : pts) csv += fmt(p.delta) + "," + fmt(p.q_succ) + "," + fmt(p.q_fail) + "\n";
  const auto dir = resolve_output_dir(opts.common.output_dir);
  write_artifact(result, dir / "curves.csv", csv);
  if (opts.svg) write_artifact(result, dir / "curves.svg", curves_svg(pts));

  std::ostringstream out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    if (p.q_succ > p.q_fail * (1.0 + 1e-9)) {
      out << "assertion failed: q_succ > q_fail at delta=" << fmt(p.delta) << " (" << fmt(p.q_succ) << " > "
          << fmt(p.q_fail) << ")\n";
      result.exit_code = kExitViolation;
    }
    if (i > 0 && p.q_succ > pts[i - 1].q_succ * (1.0 + 1e-9)) {
      out << "assertion failed: q_succ increases at delta=" << fmt(p.delta) << " (" << fmt(pts[i - 1].q_succ)
          << " -> " << fmt(p.q_succ) << ")\n";
      result.exit_code = kExitViolation;
    }
    if (p.q_fail_ambiguous) out << "note: q_fail has several roots at delta=" << fmt(p.delta) << "\n";
  }
  out << "wrote " << pts.size() << " rows to " << (dir / "curves.csv").string() << "\n";
  result.stdout_text = out.str();
  return result;
}

CommandResult cmd_certify(const CertifyOptions& opts) {
  if (opts.matrix.empty()) throw ConfigError("certify needs --matrix");
  const DenseMatrix a = io::load_matrix(opts.matrix);
  const auto n = static_cast<std::size_t>(a.cols());
  if (opts.s < 1 || 2 * opts.s > n) throw ConfigError("certify needs 1 <= 2s <= n");
  std::vector<double> q_list = opts.q_list.empty() ? kDefaultQList : opts.q_list;
  check_q_list(q_list);
  const rip::RipOptions ropts = rip_options(opts.common);

  json rep;
  json warnings = json::array();
  rep["matrix"] = {{"path", opts.matrix.string()}, {"rows", a.rows()}, {"cols", a.cols()}};
  rep["s"] = opts.s;

  const rip::RipReport raw = rip::rip_constant(a, 2 * opts.s, ropts);
  rep["rip_2s"] = report::to_json(raw);
  if (!raw.certified)
    warnings.push_back("C(n, 2s) exceeds the budget: RIP constants come from sampled subsets and are not certificates");

  std::optional<rip::Rescaled> rescaled;
  try {
    rescaled = rip::rescale_to_rip(a, 2 * opts.s, ropts);
    rep["rescaled"] = report::to_json(*rescaled);
  } catch (const std::domain_error&) {
    rep["rescaled"] = nullptr;
    warnings.push_back("alpha_2s = 0: a 2s-sparse vector lies in the kernel, no rescaling applies");
  }
  double delta = rescaled ? rescaled->delta : std::max(raw.delta, 1.0);
  if (delta < 1e-12) delta = 1e-12;
  const bool delta_usable = delta < 1.0;
  const bool rip_certified = raw.certified && delta_usable;
  rep["delta_2s_used"] = number(delta);

  try {
    rep["unique_determination"] = report::to_json(rip::unique_determination(a, opts.s, ropts));
  } catch (const BudgetExceeded& e) {
    rep["unique_determination"] = nullptr;
    warnings.push_back(std::string("unique determination skipped: ") + e.what());
  }

  if (opts.s < n) {
    nsp::QsOptions qs_opts;
    qs_opts.grid_points = opts.common.grid ? opts.common.grid : 64;
    qs_opts.nsp.seed = opts.common.seed;
    rep["q_s_estimate"] = report::to_json(nsp::q_s_estimate(a, opts.s, qs_opts));
  }

  json per_q = json::array();
  std::ostringstream out;
  for (double q : q_list) {
    nsp::NspOptions nopts;
    nopts.seed = opts.common.seed;
    if (delta_usable) nopts.delta2s = delta;
    const nsp::NspReport gamma = nsp::nsp_gamma(a, opts.s, q, nopts);
    std::optional<double> bound;
    json entry = {{"q", number(q)}, {"nsp", report::to_json(gamma)}};
    if (delta_usable) {
      bound = bounds::nsp_constant_bound(q, delta);
      entry["nsp_constant_bound"] = number(*bound);
      entry["recovery_constants"] = report::to_json(bounds::recovery_constants(q, delta, opts.s));
    } else {
      entry["nsp_constant_bound"] = nullptr;
      entry["recovery_constants"] = nullptr;
    }
    entry["gamma_witness_fails"] = gamma.gamma_estimate >= 1.0;
    const std::string verdict = verdict_for(rip_certified, bound, gamma);
    entry["verdict"] = verdict;
    per_q.push_back(entry);
    out << "q=" << fmt(q) << " " << verdict << "\n";
  }
  rep["per_q"] = per_q;
  rep["warnings"] = warnings;

  CommandResult result;
  const auto dir = resolve_output_dir(opts.common.output_dir);
  write_artifact(result, dir / "certify.json", report::dump(rep));
  out << "wrote " << (dir / "certify.json").string() << "\n";
  result.stdout_text = out.str();
  return result;
}

CommandResult cmd_recover(const ExperimentConfig& config_in, const CommonOptions& common) {
  ExperimentConfig config = config_in;
  const DenseMatrix a = make_matrix(config);
  config.m = static_cast<std::size_t>(a.rows());
  config.n = static_cast<std::size_t>(a.cols());
  validate(config, true);
  const std::vector<double> q_list = config.q_list.empty() ? kDefaultQList : config.q_list;
  const auto n = config.n;

  json summary;
  summary["config"] = to_json(config);
  nsp::QsOptions qs_opts;
  qs_opts.grid_points = common.grid ? common.grid : 64;
  qs_opts.nsp.seed = config.seed;
  if (config.s < n) summary["q_s_estimate"] = report::to_json(nsp::q_s_estimate(a, config.s, qs_opts));

  struct Tally {
    std::size_t success = 0, brute_runs = 0, agree = 0, ties = 0;
  };
  std::vector<Tally> tally(q_list.size());
  bool brute_in_budget = true;

  std::string csv = "trial,q,rel_error,success,objective,iterations,converged,brute_rel_error,brute_agree\n";
  for (std::size_t t = 0; t < config.trials; ++t) {
    const std::uint64_t trial_seed = mix_seed(config.seed, t);
    std::mt19937_64 rng(trial_seed);
    std::normal_distribution<double> normal;
    SignalVector x = SignalVector::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i : random_support(n, config.s, rng)) x[static_cast<Eigen::Index>(i)] = normal(rng);
    const SignalVector z = a * x;
    const double xnorm = x.norm();

    for (std::size_t k = 0; k < q_list.size(); ++k) {
      const double q = q_list[k];
      solver::SolverOptions so;
      so.q = q;
      so.seed = trial_seed;
      const solver::RecoveryOutcome got = solver::irls_equality(a, z, so);
      const double rel = (got.x_hat - x).norm() / xnorm;
      const bool success = rel < 1e-6;
      if (success) ++tally[k].success;

      std::string brute_rel = "", brute_agree = "";
      if (brute_in_budget) {
        try {
          const auto bf = solver::brute_force_lq_min(a, z, q, config.m, common.budget);
          if (bf.feasible) {
            ++tally[k].brute_runs;
            if (bf.tie) ++tally[k].ties;
            const double brel = (bf.outcome.x_hat - x).norm() / xnorm;
            const bool agree =
                (got.x_hat - bf.outcome.x_hat).norm() <= 1e-6 * std::max(1.0, bf.outcome.x_hat.norm());
            if (agree) ++tally[k].agree;
            brute_rel = fmt(brel);
            brute_agree = agree ? "1" : "0";
          }
        } catch (const BudgetExceeded&) {
          brute_in_budget = false;
        }
      }
      csv += std::to_string(t) + "," + fmt(q) + "," + fmt(rel) + "," + (success ? "1" : "0") + "," +
             fmt(got.objective) + "," + std::to_string(got.iterations) + "," + (got.converged ? "1" : "0") + "," +
             brute_rel + "," + brute_agree + "\n";
    }
  }

  json per_q = json::array();
  std::ostringstream out;
  std::vector<std::pair<double, double>> rates;
  for (std::size_t k = 0; k < q_list.size(); ++k) {
    const double rate = config.trials ? static_cast<double>(tally[k].success) / static_cast<double>(config.trials) : 0.0;
    rates.emplace_back(q_list[k], rate);
    json entry = {{"q", number(q_list[k])}, {"success_rate", number(rate)}, {"trials", config.trials}};
    if (tally[k].brute_runs) {
      entry["brute_agree_rate"] =
          number(static_cast<double>(tally[k].agree) / static_cast<double>(tally[k].brute_runs));
      entry["brute_ties"] = tally[k].ties;
    } else {
      entry["brute_agree_rate"] = nullptr;
    }
    per_q.push_back(entry);
    out << "q=" << fmt(q_list[k]) << " success_rate=" << fmt(rate) << "\n";
  }
  std::sort(rates.begin(), rates.end());
  bool monotone = true;
  for (std::size_t i = 1; i < rates.size(); ++i)
    if (rates[i].second > rates[i - 1].second) monotone = false;
  summary["per_q"] = per_q;
  summary["success_nonincreasing_in_q"] = monotone;
  summary["brute_force_in_budget"] = brute_in_budget;

  CommandResult result;
  const auto dir = resolve_output_dir(common.output_dir.empty() ? config.output_dir : common.output_dir);
  write_artifact(result, dir / "recover.csv", csv);
  write_artifact(result, dir / "recover_summary.json", report::dump(summary));
  out << "wrote " << (dir / "recover.csv").string() << "\n";
  result.stdout_text = out.str();
  return result;
}

CommandResult cmd_stable(const ExperimentConfig& config_in, const CommonOptions& common) {
  ExperimentConfig config = config_in;
  const DenseMatrix a = make_matrix(config);
  config.m = static_cast<std::size_t>(a.rows());
  config.n = static_cast<std::size_t>(a.cols());
  validate(config, false);
  const auto n = config.n;
  const std::size_t s = config.s;
  const double eps = config.noise_epsilon;

  CommandResult result;
  std::ostringstream out;
  rip::Rescaled rescaled;
  try {
    rescaled = rip::rescale_to_rip(a, 2 * s, rip_options(common));
  } catch (const std::domain_error& e) {
    result.exit_code = kExitBudget;
    result.stdout_text = std::string("infeasible: ") + e.what() + "\n";
    return result;
  }
  if (!rescaled.bounds.certified) {
    result.exit_code = kExitBudget;
    result.stdout_text = "infeasible: delta_2s is not exhaustively certified within the budget\n";
    return result;
  }
  const double delta = std::max(rescaled.delta, 1e-12);
  const DenseMatrix& b = rescaled.matrix;

  json summary;
  summary["config"] = to_json(config);
  summary["rescaled"] = report::to_json(rescaled);
  std::vector<double> q_list = config.q_list;
  if (q_list.empty()) {
    const bounds::QTildeResult qs = bounds::q_succ(delta);
    summary["q_succ"] = report::to_json(qs);
    if (!qs.found) {
      result.exit_code = kExitBudget;
      result.stdout_text = "infeasible: a(q, delta_1) >= delta_1 for every q on the grid\n";
      return result;
    }
    q_list = {0.5 * qs.value};
  }

  bounds::RecoveryConstantsOptions copts;
  if (common.grid) copts.r_grid = common.grid;
  json per_q = json::array();
  bool violated = false;
  for (double q : q_list) {
    const bounds::RecoveryConstants rc = bounds::recovery_constants(q, delta, s, copts);
    if (!rc.feasible) {
      result.exit_code = kExitBudget;
      out << "infeasible: recovery constants undefined at q=" << fmt(q) << " delta_2s=" << fmt(delta) << "\n";
      result.stdout_text = out.str();
      return result;
    }
    const double sd = static_cast<double>(s);
    const double s_low = std::exp((0.5 - 1.0 / q) * std::log(sd));  // s^{1/2-1/q}
    const double c1_term = rc.C1 * eps;
    const double c3_term = rc.C3 * eps / s_low;

    double worst_l2 = 0.0, worst_lq = 0.0;
    std::size_t objective_ok = 0, violations = 0;
    json worst_dump = nullptr;
    for (std::size_t t = 0; t < config.trials; ++t) {
      const std::uint64_t trial_seed = mix_seed(config.seed, t);
      std::mt19937_64 rng(trial_seed);
      std::normal_distribution<double> normal;
      std::uniform_real_distribution<double> unit;
      std::vector<std::size_t> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      SignalVector x(static_cast<Eigen::Index>(n));
      for (std::size_t j = 0; j < n; ++j) {
        const double mag = std::pow(static_cast<double>(j + 1), -config.power_law_exponent);
        x[static_cast<Eigen::Index>(perm[j])] = unit(rng) < 0.5 ? -mag : mag;
      }
      if (eps == 0.0) x = best_s_term(x, s, q);
      SignalVector noise(b.rows());
      for (auto& v : noise) v = normal(rng);
      noise *= eps * (1.0 - unit(rng)) / noise.norm();
      const SignalVector y = b * x + noise;

      solver::SolverOptions so;
      so.q = q;
      so.seed = trial_seed;
      const solver::RecoveryOutcome got = solver::irls_noisy(b, y, eps, so);
      const double sigma = quasi_norm(x - best_s_term(x, s, q), q);
      const SignalVector err = got.x_hat - x;
      const double rhs_l2 = rc.C0 * s_low * sigma + c1_term;
      const double rhs_lq = rc.C2 * sigma + c3_term;
      const double r2 = bound_ratio(err.norm(), rhs_l2, x.norm());
      const double rq = bound_ratio(quasi_norm(err, q), rhs_lq, quasi_norm(x, q));
      if (quasi_norm_pow(got.x_hat, q) <= quasi_norm_pow(x, q) * (1.0 + 1e-9)) ++objective_ok;
      const bool bad = r2 > 1.0 || rq > 1.0;
      if (bad) ++violations;
      if (bad || std::max(r2, rq) > std::max(worst_l2, worst_lq) || worst_dump.is_null()) {
        worst_dump = {{"trial", t},         {"x", io::to_json(x)},        {"noise", io::to_json(noise)},
                      {"y", io::to_json(y)}, {"x_star", io::to_json(got.x_hat)}, {"ratio_l2", number(r2)},
                      {"ratio_lq", number(rq)}};
      }
      worst_l2 = std::max(worst_l2, r2);
      worst_lq = std::max(worst_lq, rq);
    }
    if (violations) violated = true;
    per_q.push_back({{"q", number(q)},
                     {"constants", report::to_json(rc)},
                     {"noise_terms", {{"C1_eps", number(c1_term)}, {"C3_s_eps", number(c3_term)}}},
                     {"worst_ratio_l2", number(worst_l2)},
                     {"worst_ratio_lq", number(worst_lq)},
                     {"violations", violations},
                     {"solver_objective_not_above_truth", objective_ok},
                     {"trials", config.trials},
                     {"worst_instance", worst_dump}});
    out << "q=" << fmt(q) << " worst_ratio_l2=" << fmt(worst_l2) << " worst_ratio_lq=" << fmt(worst_lq)
        << " violations=" << violations << "\n";
  }
  summary["per_q"] = per_q;
  summary["passed"] = !violated;
  const auto dir = resolve_output_dir(common.output_dir.empty() ? config.output_dir : common.output_dir);
  write_artifact(result, dir / "stable.json", report::dump(summary));
  out << "wrote " << (dir / "stable.json").string() << "\n";
  if (violated) result.exit_code = kExitViolation;
  result.stdout_text = out.str();
  return result;
}

VerifySuite parse_suite(const std::string& name) {
  if (name == "lemma21") return VerifySuite::Lemma21;
  if (name == "lemma22") return VerifySuite::Lemma22;
  if (name == "lemma23") return VerifySuite::Lemma23;
  if (name == "bounds_asymptotics") return VerifySuite::BoundsAsymptotics;
  if (name == "all") return VerifySuite::All;
  throw ConfigError("unknown suite '" + name + "'");
}

CommandResult cmd_verify(VerifySuite suite, const CommonOptions& common) {
  lemmas::SuiteOptions so;
  so.seed = common.seed;
  so.budget = std::max<std::uint64_t>(common.budget, 5'000'000);
  const bool all = suite == VerifySuite::All;
  json suites = json::array();
  bool passed = true;
  std::ostringstream out;
  auto add = [&](const lemmas::SuiteReport& r) {
    suites.push_back(report::to_json(r));
    passed = passed && r.passed();
    out << r.name << ": " << (r.passed() ? "pass" : "FAIL") << " (" << r.instances << " instances, " << r.failures
        << " failures, " << r.rejected << " rejected)\n";
  };
  if (all || suite == VerifySuite::Lemma21) {
    lemmas::SuiteOptions o = so;
    o.grid = common.grid ? std::max<std::size_t>(common.grid, 32) : 0;
    add(lemmas::run_lemma21_suite(o));
  }
  if (all || suite == VerifySuite::Lemma22) {
    lemmas::SuiteOptions o = so;
    o.grid = common.grid;
    add(lemmas::run_lemma22_suite(o));
  }
  if (all || suite == VerifySuite::Lemma23) add(lemmas::run_lemma23_suite(so));
  if (all || suite == VerifySuite::BoundsAsymptotics) {
    bool ok = false;
    suites.push_back(bounds_asymptotics(ok));
    passed = passed && ok;
    out << "bounds_asymptotics: " << (ok ? "pass" : "FAIL") << "\n";
  }

  CommandResult result;
  const auto dir = resolve_output_dir(common.output_dir);
  write_artifact(result, dir / "verify.json", report::dump({{"passed", passed}, {"seed", common.seed}, {"suites", suites}}));
  out << "wrote " << (dir / "verify.json").string() << "\n";
  result.stdout_text = out.str();
  if (!passed) result.exit_code = kExitViolation;
  return result;
}

}  // namespace lqcert::cli
