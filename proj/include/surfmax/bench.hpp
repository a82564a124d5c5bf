#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "surfmax/attacks.hpp"
#include "surfmax/synthetic_oracles.hpp"

namespace surfmax {

inline constexpr int kBenchConfigVersion = 1;

enum class AttackKind { Parametric, Fgsm, Pgd, RandomSearch };

const char* to_string(AttackKind kind);

/// Which loss oracle each trial attacks.
///   quadexp_family  placed quad-exp oracle regenerated per trial from (z1, z2)
///   quadexp         quad-exp oracle with a random peak, regenerated per trial
///   rbf_family      random RBF mixture regenerated per trial
///   rbf             one RBF mixture shared by all trials (explicit or seeded)
///   external        one external peer shared by all trials (serial only)
struct OracleSpec {
  std::string type = "quadexp_family";
  QuadExpFamilySpec quadexp;
  RbfMixtureSpec rbf;
  std::vector<RbfComponent> components;
  std::uint64_t seed = 0;
  std::string target;
  double timeout_s = 30.0;
};

struct AttackSpec {
  std::string name;
  AttackKind kind = AttackKind::Parametric;
  AttackConfig config;
  int random_samples = 50;
};

struct BenchConfig {
  int version = kBenchConfigVersion;
  Eigen::Index n_dim = 64;
  std::size_t n_trials = 500;
  std::uint64_t master_seed = 0;
  OracleSpec oracle;
  std::vector<AttackSpec> attacks;
  bool emit_trials = false;

  /// Throws Config on n_trials < 1, duplicate names, unknown oracle types or
  /// invalid attack settings.
  void validate() const;
};

/// parametric, fgsm, pgd and random_search against the placed quad-exp family.
BenchConfig default_bench_config();

/// Strict parse: unknown fields, a missing or unsupported "version" and
/// type errors all throw Config.
BenchConfig parse_bench_config(const nlohmann::json& j);
BenchConfig load_bench_config(const std::filesystem::path& path);
nlohmann::json bench_config_to_json(const BenchConfig& cfg);

struct AttackRow {
  std::string name;
  std::string kind;
  std::size_t trials = 0;
  std::size_t failed_trials = 0;
  double mean_loss = 0.0;
  double median_loss = 0.0;
  double max_loss = 0.0;
  double mean_eval_calls = 0.0;
  double mean_grad_calls = 0.0;
  double mean_wall_time_s = 0.0;
  double fallback_rate = 0.0;
  /// Achieved loss per trial; NaN marks a failed trial.
  std::vector<double> trial_losses;
  std::vector<std::string> errors;
};

struct BenchReport {
  int version = kBenchConfigVersion;
  Eigen::Index n_dim = 0;
  std::uint64_t master_seed = 0;
  std::size_t n_trials = 0;
  std::string oracle_type;
  std::string config_digest;
  std::string timestamp;
  bool include_trials = false;
  std::vector<AttackRow> rows;
};

/// Runs every configured attack on identical (z1, z2, oracle) per trial.
/// Trials are independent; the result does not depend on the policy or on
/// thread scheduling except for wall-time fields.
BenchReport run_bench(const BenchConfig& cfg, ExecutionPolicy policy = ExecutionPolicy::Parallel);

enum class ReportFormat { Json, Csv };

ReportFormat report_format_from_string(const std::string& name);

nlohmann::json report_to_json(const BenchReport& report);
BenchReport report_from_json(const nlohmann::json& j);

/// Column order: name, mean_loss, median_loss, max_loss, eval_calls,
/// grad_calls, wall_time_s, fallback_rate.
std::string report_to_csv(const BenchReport& report);

/// Throws Io when the path cannot be written.
void emit_report(const BenchReport& report, ReportFormat format, const std::filesystem::path& path);

/// 64-bit FNV-1a of a string, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace surfmax
