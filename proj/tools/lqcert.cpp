// lqcert: threshold curves, matrix certification, recovery experiments and
// the lemma verification suite for l_q minimization.

#include "lqcert/experiments.hpp"
#include "lqcert/io.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace lqcert;

void add_common(CLI::App* cmd, cli::CommonOptions& common) {
  cmd->add_option("--seed", common.seed, "Random seed");
  cmd->add_option("--grid", common.grid, "Grid resolution (meaning depends on the command; 0 = default)");
  cmd->add_option("--budget", common.budget, "Enumeration budget");
  cmd->add_option("--output-dir", common.output_dir, "Output directory (default $LQCERT_OUTPUT_DIR or lqcert_out)");
}

struct ConfigFlags {
  std::string config_path;
  std::optional<std::size_t> m, n, s, trials;
  std::vector<double> q_list;
  std::optional<std::string> ensemble, matrix;
  std::optional<double> noise_epsilon, power_law_exponent;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON experiment config");
  cmd->add_option("--m", f.m, "Measurements");
  cmd->add_option("--n", f.n, "Signal length");
  cmd->add_option("--s", f.s, "Sparsity");
  cmd->add_option("--q-list", f.q_list, "Exponents q in (0, 1]")->delimiter(',');
  cmd->add_option("--ensemble", f.ensemble, "gaussian | orthonormal_rows | user_csv");
  cmd->add_option("--trials", f.trials, "Trials");
  cmd->add_option("--noise-epsilon", f.noise_epsilon, "Noise level epsilon >= 0");
  cmd->add_option("--matrix", f.matrix, "Matrix file for the user_csv ensemble");
  cmd->add_option("--power-law-exponent", f.power_law_exponent, "Compressible signal decay exponent");
}

cli::ExperimentConfig build_config(const ConfigFlags& f, CLI::App* cmd, const cli::CommonOptions& common) {
  cli::ExperimentConfig c;
  if (!f.config_path.empty()) {
    try {
      c = cli::config_from_json(nlohmann::json::parse(io::read_file(f.config_path)));
    } catch (const nlohmann::json::parse_error& e) {
      throw cli::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
  }
  if (f.m) c.m = *f.m;
  if (f.n) c.n = *f.n;
  if (f.s) c.s = *f.s;
  if (f.trials) c.trials = *f.trials;
  if (!f.q_list.empty()) c.q_list = f.q_list;
  if (f.ensemble) c.ensemble = cli::parse_ensemble(*f.ensemble);
  if (f.matrix) c.matrix = *f.matrix;
  if (f.noise_epsilon) c.noise_epsilon = *f.noise_epsilon;
  if (f.power_law_exponent) c.power_law_exponent = *f.power_law_exponent;
  if (cmd->count("--seed")) c.seed = common.seed;
  if (!common.output_dir.empty()) c.output_dir = common.output_dir;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lqcert: certificates and experiments for l_q minimization"};
  app.require_subcommand(1);

  cli::CurvesOptions curves;
  bool no_svg = false;
  auto* c_curves = app.add_subcommand("curves", "Threshold curves q_succ and q_fail over delta");
  add_common(c_curves, curves.common);
  c_curves->add_option("--deltas", curves.deltas, "Explicit delta values in (0, 1)")->delimiter(',');
  c_curves->add_flag("--no-svg", no_svg, "Skip the SVG plot");

  cli::CertifyOptions certify;
  auto* c_certify = app.add_subcommand("certify", "RIP, null space and recovery verdicts for a matrix");
  add_common(c_certify, certify.common);
  c_certify->add_option("--matrix", certify.matrix, "Matrix file (.csv or .json)")->required();
  c_certify->add_option("--s", certify.s, "Sparsity")->required();
  c_certify->add_option("--q-list", certify.q_list, "Exponents q in (0, 1]")->delimiter(',');

  cli::CommonOptions recover_common;
  ConfigFlags recover_flags;
  auto* c_recover = app.add_subcommand("recover", "Exact recovery trials with IRLS and the brute-force oracle");
  add_common(c_recover, recover_common);
  add_config_flags(c_recover, recover_flags);

  cli::CommonOptions stable_common;
  ConfigFlags stable_flags;
  auto* c_stable = app.add_subcommand("stable", "Noisy recovery trials against the stable-recovery bounds");
  add_common(c_stable, stable_common);
  add_config_flags(c_stable, stable_flags);

  cli::CommonOptions verify_common;
  std::string suite = "all";
  auto* c_verify = app.add_subcommand("verify", "Lemma suites and asymptotic checks");
  add_common(c_verify, verify_common);
  c_verify->add_option("--suite", suite, "lemma21 | lemma22 | lemma23 | bounds_asymptotics | all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitIo;
  }

  try {
    cli::CommandResult result;
    if (*c_curves) {
      curves.svg = !no_svg;
      result = cli::cmd_curves(curves);
    } else if (*c_certify) {
      result = cli::cmd_certify(certify);
    } else if (*c_recover) {
      const auto config = build_config(recover_flags, c_recover, recover_common);
      recover_common.seed = config.seed;
      result = cli::cmd_recover(config, recover_common);
    } else if (*c_stable) {
      const auto config = build_config(stable_flags, c_stable, stable_common);
      stable_common.seed = config.seed;
      result = cli::cmd_stable(config, stable_common);
    } else {
      result = cli::cmd_verify(cli::parse_suite(suite), verify_common);
    }
    std::cout << result.stdout_text;
    return result.exit_code;
  } catch (const cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return cli::kExitIo;
  } catch (const io::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return cli::kExitIo;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return cli::kExitBudget;
  } catch (const Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return cli::kExitBudget;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return cli::kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitViolation;
  }
}
