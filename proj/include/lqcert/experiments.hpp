#pragma once

// Command implementations behind the lqcert executable. Each command writes
// its artifacts under the output directory and returns the text printed on
// stdout plus an exit status:
//   0 success, 2 assertion or bound violation, 3 budget or infeasibility,
//   4 IO or configuration error.

#include "lqcert/core.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lqcert::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitIo = 4;

/// Invalid configuration (exit status 4).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Ensemble { Gaussian, OrthonormalRows, UserCsv };

std::string to_string(Ensemble e);
Ensemble parse_ensemble(const std::string& name);

struct ExperimentConfig {
  std::size_t m = 8;
  std::size_t n = 12;
  std::size_t s = 2;
  std::vector<double> q_list;  ///< empty selects a per-command default
  Ensemble ensemble = Ensemble::OrthonormalRows;
  std::size_t trials = 100;
  double noise_epsilon = 0.0;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;
  std::filesystem::path matrix;  ///< user_csv ensemble and certify input
  double power_law_exponent = 1.5;
};

/// Reads the JSON fields above; unknown fields are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);

/// 2s <= m <= n, s >= 1, every q in (0, 1], noise_epsilon >= 0.
void validate(const ExperimentConfig& c, bool allow_zero_trials = true);

/// Output directory: explicit value, then $LQCERT_OUTPUT_DIR, then
/// "lqcert_out".
std::filesystem::path resolve_output_dir(const std::filesystem::path& explicit_dir);

/// Seeded measurement matrix: Gaussian entries scaled by 1/sqrt(m), or the
/// transposed Q factor of a seeded n x m Gaussian (orthonormal rows), or the
/// matrix file named in the config.
DenseMatrix make_matrix(const ExperimentConfig& c);

struct CommandResult {
  int exit_code = kExitOk;
  std::string stdout_text;
  std::vector<std::filesystem::path> written;
};

struct CommonOptions {
  std::uint64_t seed = 0;
  std::size_t grid = 0;  ///< 0 selects the command default
  std::uint64_t budget = 1'000'000;
  std::filesystem::path output_dir;
};

struct CurvesOptions {
  CommonOptions common;
  std::vector<double> deltas;  ///< overrides the uniform grid when nonempty
  bool svg = true;
};

/// curves.csv with header "delta,q_succ,q_fail" (and curves.svg).
/// `common.grid` is the number of uniform delta points (default 99).
CommandResult cmd_curves(const CurvesOptions& opts);

struct CertifyOptions {
  CommonOptions common;
  std::filesystem::path matrix;
  std::size_t s = 1;
  std::vector<double> q_list;  ///< default {0.25, 0.5, 0.75, 1}
};

/// certify.json. `common.grid` is the q grid of the q_s estimate (default 64).
CommandResult cmd_certify(const CertifyOptions& opts);

/// recover.csv and recover_summary.json. `common.grid` is the q grid of the
/// q_s estimate recorded in the summary (default 64).
CommandResult cmd_recover(const ExperimentConfig& config, const CommonOptions& common);

/// stable.json. An empty q_list selects q = q_succ(delta_2s) / 2.
/// `common.grid` is the r grid of the recovery constants (default 241).
CommandResult cmd_stable(const ExperimentConfig& config, const CommonOptions& common);

enum class VerifySuite { Lemma21, Lemma22, Lemma23, BoundsAsymptotics, All };

VerifySuite parse_suite(const std::string& name);

/// verify.json. `common.grid` overrides the lemma grid resolutions.
CommandResult cmd_verify(VerifySuite suite, const CommonOptions& common);

}  // namespace lqcert::cli
