#include "surfmax/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "surfmax/attacks.hpp"
#include "surfmax/bench.hpp"
#include "surfmax/error.hpp"
#include "surfmax/external_oracle.hpp"
#include "surfmax/latent_geometry.hpp"
#include "surfmax/rbf_analysis.hpp"
#include "surfmax/synthetic_oracles.hpp"

namespace surfmax {

namespace {

using json = nlohmann::json;

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

json landscape_to_json(const LandscapeReport& r) {
  return json{{"n_samples", r.n_samples},
              {"n_components", r.n_components},
              {"min_width", r.min_width},
              {"fit_rmse", r.fit_rmse},
              {"triangles_tested", r.triangles_tested},
              {"multi_extremum_fraction", r.multi_extremum_fraction}};
}

json outcome_to_json(const AttackOutcome& out) {
  json j{{"z_star", to_std(out.z_star)},
         {"achieved_loss", out.achieved_loss},
         {"eval_calls", out.eval_calls},
         {"grad_calls", out.grad_calls},
         {"wall_time_s", out.wall_time_s}};
  if (out.diagnostics) {
    const ParametricDiagnostics& d = *out.diagnostics;
    json diag{{"fallback_used", d.fallback_used}, {"candidate_evaluated", d.candidate_evaluated}};
    if (!d.fallback_reason.empty()) diag["fallback_reason"] = d.fallback_reason;
    if (d.surface) {
      const auto c = d.surface->coefficients();
      diag["coefficients"] = {{"a", c[0]}, {"b", c[1]}, {"c", c[2]}, {"d", c[3]}, {"e", c[4]}, {"f", c[5]}};
    }
    if (d.extremum) {
      diag["extremum"] = {{"alpha", d.extremum->alpha_star},
                          {"beta", d.extremum->beta_star},
                          {"kind", to_string(d.extremum->kind)},
                          {"predicted_loss", d.extremum->predicted_loss},
                          {"in_simplex", d.extremum->in_simplex}};
    }
    j["diagnostics"] = std::move(diag);
  }
  return j;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SURFMAX_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorKind::Config, std::string("SURFMAX_SEED is not an unsigned integer: ") + env);
  }
  return 0;
}

// Reads "z_1,...,z_n,loss" rows; lines starting with '#' or a non-numeric
// first line (header) are skipped.
std::vector<LandscapePoint> read_sample_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open sample file " + path);
  std::vector<LandscapePoint> points;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (points.empty() && lineno == 1) continue;
      throw Error(ErrorKind::Config, path + ":" + std::to_string(lineno) + ": non-numeric value");
    }
    if (values.size() < 3) throw Error(ErrorKind::Config, path + ":" + std::to_string(lineno) + ": need z and loss");
    LandscapePoint p;
    p.loss = values.back();
    values.pop_back();
    p.z = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    if (!points.empty() && p.z.size() != points.front().z.size()) {
      throw Error(ErrorKind::Config, path + ":" + std::to_string(lineno) + ": dimension changes");
    }
    points.push_back(std::move(p));
  }
  return points;
}

struct GlobalOptions {
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool quiet = false;
};

// ---------------------------------------------------------------------------

struct AttackOptions {
  std::string oracle = "quadexp";
  std::string method = "parametric";
  std::string target;
  std::string policy = "evaluate_oracle";
  Eigen::Index dim = 64;
  int r = 10;
  int s = 5;
  double epsilon = 1.0;
  int pgd_steps = 20;
  double pgd_step_size = 0.01;
  int samples = 50;
};

int run_attack(const AttackOptions& o, const GlobalOptions& g, std::ostream& out) {
  Rng rng(g.seed);
  const LatentVector z1 = sample_latent(rng, o.dim);
  const LatentVector z2 = sample_latent(rng, o.dim);

  std::unique_ptr<LossOracle> oracle;
  if (o.oracle == "quadexp") {
    oracle = std::make_unique<QuadExpOracle>(placed_quadexp(rng, z1, z2));
  } else if (o.oracle == "rbf") {
    oracle = std::make_unique<RbfOracle>(random_rbf_mixture(rng, o.dim));
  } else if (o.oracle == "linear") {
    oracle = std::make_unique<LinearOracle>(sample_latent(rng, o.dim));
  } else {
    if (o.target.empty()) throw Error(ErrorKind::Config, "--oracle external needs --target");
    oracle = external_oracle_connect(o.target, o.dim);
  }

  AttackConfig cfg;
  cfg.n_dim = o.dim;
  cfg.r = o.r;
  cfg.s = o.s;
  cfg.epsilon = o.epsilon;
  cfg.pgd_steps = o.pgd_steps;
  cfg.pgd_step_size = o.pgd_step_size;
  cfg.candidate_policy = candidate_policy_from_string(o.policy);
  cfg.seed = g.seed;
  cfg.validate();

  AttackOutcome outcome;
  if (o.method == "parametric") {
    outcome = parametric_attack(*oracle, z1, z2, cfg);
  } else if (o.method == "fgsm") {
    outcome = fgsm(*oracle, z1, cfg.epsilon);
  } else if (o.method == "pgd") {
    outcome = pgd(*oracle, z1, cfg);
  } else {
    outcome = random_search(*oracle, z1, o.samples, rng);
  }

  json j = outcome_to_json(outcome);
  j["method"] = o.method;
  j["oracle"] = o.oracle;
  j["seed"] = g.seed;
  out << j.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct BenchOptions {
  std::string config;
  std::string out;
  std::string format = "json";
  bool serial = false;
};

int run_bench_command(const BenchOptions& o, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  BenchConfig cfg = load_bench_config(o.config);
  if (g.seed_given) cfg.master_seed = g.seed;
  const ReportFormat format = report_format_from_string(o.format);
  const BenchReport report = run_bench(cfg, o.serial ? ExecutionPolicy::Serial : ExecutionPolicy::Parallel);
  if (o.out.empty()) {
    out << (format == ReportFormat::Json ? report_to_json(report).dump(2) + "\n" : report_to_csv(report));
  } else {
    emit_report(report, format, o.out);
    if (!g.quiet) err << "wrote " << o.out << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct CdfOptions {
  int dim = 64;
  std::vector<double> d;
  double d_min = 0.0;
  double d_max = -1.0;
  int steps = 20;
  int mc = 0;
};

double median_distance(int n) {
  double lo = 0.0, hi = 1.0;
  while (distance_cdf(hi, n) < 0.5) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (distance_cdf(mid, n) < 0.5 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

int run_cdf(const CdfOptions& o, const GlobalOptions& g, std::ostream& out) {
  if (o.dim < 1) throw Error(ErrorKind::Config, "--dim must be >= 1");
  if (o.steps < 1) throw Error(ErrorKind::Config, "--steps must be >= 1");
  if (o.mc < 0) throw Error(ErrorKind::Config, "--mc must be >= 0");

  std::vector<double> ds = o.d;
  if (ds.empty()) {
    const double hi = o.d_max > 0.0 ? o.d_max : 2.0 * std::sqrt(2.0 * o.dim);
    for (int i = 0; i <= o.steps; ++i) ds.push_back(o.d_min + (hi - o.d_min) * i / o.steps);
  }

  std::vector<double> sample;
  if (o.mc > 0) {
    if (o.dim < 2) throw Error(ErrorKind::Config, "--mc needs --dim >= 2");
    Rng rng(g.seed);
    sample.reserve(static_cast<std::size_t>(o.mc));
    for (int i = 0; i < o.mc; ++i) {
      const LatentVector a = sample_latent(rng, o.dim);
      const LatentVector b = sample_latent(rng, o.dim);
      sample.push_back((a - b).norm());
    }
    std::sort(sample.begin(), sample.end());
  }
  auto empirical = [&](double d) {
    return static_cast<double>(std::upper_bound(sample.begin(), sample.end(), d) - sample.begin()) /
           static_cast<double>(sample.size());
  };

  if (!g.quiet) {
    out << "# F(d; n) = 1 - Q(n/2, d^2/4), n = " << o.dim << '\n';
    out << "# F(2; n) = " << std::setprecision(10) << distance_cdf(2.0, o.dim)
        << ", median pair distance = " << median_distance(o.dim) << '\n';
    out << (sample.empty() ? "# d\tF" : "# d\tF\tF_empirical") << '\n';
  }
  out << std::fixed << std::setprecision(6);
  for (double d : ds) {
    out << d << '\t' << distance_cdf(d, o.dim);
    if (!sample.empty()) out << '\t' << empirical(d);
    out << '\n';
  }
  if (!sample.empty()) {
    // Kolmogorov distance, checked on both sides of each jump.
    double sup = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
      const double f = distance_cdf(sample[i], o.dim);
      sup = std::max({sup, std::abs(f - static_cast<double>(i + 1) / sample.size()),
                      std::abs(f - static_cast<double>(i) / sample.size())});
    }
    out << "# sup|F - F_empirical| = " << sup << " over " << sample.size() << " pairs\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct RbfFitCliOptions {
  std::string samples;
  Eigen::Index dim = 8;
  int points = 2000;
  std::vector<double> widths{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  std::size_t max_components = 800;
};

int run_rbf_fit(const RbfFitCliOptions& o, const GlobalOptions& g, std::ostream& out) {
  std::vector<LandscapePoint> points;
  if (!o.samples.empty()) {
    points = read_sample_file(o.samples);
  } else {
    if (o.points < 2) throw Error(ErrorKind::Config, "--points must be >= 2");
    Rng rng(g.seed);
    RbfOracle oracle(random_rbf_mixture(rng, o.dim));
    for (int i = 0; i < o.points; ++i) {
      LandscapePoint p;
      p.z = sample_latent(rng, o.dim);
      p.loss = oracle.eval(p.z);
      points.push_back(std::move(p));
    }
  }
  RbfFitOptions opts;
  opts.max_components = o.max_components;
  opts.seed = g.seed;
  const RbfFitResult fit = fit_rbf_surface(points, o.widths, opts);

  LandscapeReport report;
  report.n_samples = points.size();
  report.n_components = fit.mixture.size();
  report.min_width = fit.width;
  report.fit_rmse = fit.holdout_rmse;
  json j = landscape_to_json(report);
  j["train_rmse"] = fit.train_rmse;
  out << j.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct LandscapeCliOptions {
  std::string oracle = "rbf";
  std::string target;
  Eigen::Index dim = 64;
  std::size_t triangles = 100;
  int grid = 32;
  double latent_scale = 1.0;
  double min_width = 2.0;
  double max_width = 6.0;
  bool serial = false;
};

int run_landscape(const LandscapeCliOptions& o, const GlobalOptions& g, std::ostream& out) {
  Rng rng(g.seed);
  std::unique_ptr<LossOracle> oracle;
  if (o.oracle == "quadexp") {
    oracle = std::make_unique<QuadExpOracle>(random_quadexp(rng, o.dim));
  } else if (o.oracle == "rbf") {
    RbfMixtureSpec spec;
    spec.min_width = o.min_width;
    spec.max_width = o.max_width;
    oracle = std::make_unique<RbfOracle>(random_rbf_mixture(rng, o.dim, spec));
  } else {
    if (o.target.empty()) throw Error(ErrorKind::Config, "--oracle external needs --target");
    oracle = external_oracle_connect(o.target, o.dim);
  }
  LandscapeOptions opts;
  opts.latent_scale = o.latent_scale;
  opts.policy = o.serial ? ExecutionPolicy::Serial : ExecutionPolicy::Parallel;
  const LandscapeReport report = count_triangle_extrema(*oracle, o.triangles, o.grid, g.seed, opts);
  out << landscape_to_json(report).dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Loss-surface maximization attacks over a Gaussian latent space", "surfmax"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  auto* seed_opt = app.add_option("--seed", global.seed, "Random seed (overrides SURFMAX_SEED)");
  app.add_flag("--quiet", global.quiet, "Suppress comments and progress messages");

  AttackOptions attack;
  auto* attack_cmd = app.add_subcommand("attack", "Run one attack and print the outcome as JSON");
  attack_cmd->add_option("--oracle", attack.oracle)->check(CLI::IsMember({"quadexp", "rbf", "linear", "external"}));
  attack_cmd->add_option("--method", attack.method)
      ->check(CLI::IsMember({"parametric", "fgsm", "pgd", "random_search"}));
  attack_cmd->add_option("--target", attack.target, "Command or tcp:HOST:PORT of an external oracle");
  attack_cmd->add_option("--policy", attack.policy)->check(CLI::IsMember({"evaluate_oracle", "paper_literal"}));
  attack_cmd->add_option("--dim", attack.dim);
  attack_cmd->add_option("--r", attack.r);
  attack_cmd->add_option("--s", attack.s);
  attack_cmd->add_option("--epsilon", attack.epsilon);
  attack_cmd->add_option("--pgd-steps", attack.pgd_steps);
  attack_cmd->add_option("--pgd-step-size", attack.pgd_step_size);
  attack_cmd->add_option("--samples", attack.samples, "Draws for random_search");

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run a seeded attack battery from a JSON config");
  bench_cmd->add_option("--config", bench.config)->required();
  bench_cmd->add_option("--out", bench.out, "Report path (stdout when omitted)");
  bench_cmd->add_option("--format", bench.format)->check(CLI::IsMember({"json", "csv"}));
  bench_cmd->add_flag("--serial", bench.serial, "Use the serial reference path");

  CdfOptions cdf;
  auto* cdf_cmd = app.add_subcommand("cdf", "Tabulate the pairwise latent distance CDF");
  cdf_cmd->add_option("--dim", cdf.dim)->required();
  cdf_cmd->add_option("--d", cdf.d, "Distances to evaluate (repeatable)");
  cdf_cmd->add_option("--d-min", cdf.d_min);
  cdf_cmd->add_option("--d-max", cdf.d_max);
  cdf_cmd->add_option("--steps", cdf.steps);
  cdf_cmd->add_option("--mc", cdf.mc, "Monte Carlo pair count for an empirical comparison");

  RbfFitCliOptions rbf;
  auto* rbf_cmd = app.add_subcommand("rbf-fit", "Fit an RBF mixture to loss samples and report widths");
  rbf_cmd->add_option("--samples", rbf.samples, "CSV file of z_1,...,z_n,loss rows");
  rbf_cmd->add_option("--dim", rbf.dim, "Dimension of the synthetic landscape");
  rbf_cmd->add_option("--points", rbf.points, "Synthetic sample count");
  rbf_cmd->add_option("--widths", rbf.widths)->delimiter(',');
  rbf_cmd->add_option("--max-components", rbf.max_components);

  LandscapeCliOptions land;
  auto* land_cmd = app.add_subcommand("landscape", "Count multi-peak triangles of a loss landscape");
  land_cmd->add_option("--oracle", land.oracle)->check(CLI::IsMember({"quadexp", "rbf", "external"}));
  land_cmd->add_option("--target", land.target);
  land_cmd->add_option("--dim", land.dim);
  land_cmd->add_option("--triangles", land.triangles);
  land_cmd->add_option("--grid", land.grid);
  land_cmd->add_option("--latent-scale", land.latent_scale);
  land_cmd->add_option("--min-width", land.min_width);
  land_cmd->add_option("--max-width", land.max_width);
  land_cmd->add_flag("--serial", land.serial);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitConfigError;
  }

  try {
    global.seed_given = seed_opt->count() > 0;
    if (!global.seed_given) global.seed = default_seed();

    if (*attack_cmd) return run_attack(attack, global, out);
    if (*bench_cmd) return run_bench_command(bench, global, out, err);
    if (*cdf_cmd) return run_cdf(cdf, global, out);
    if (*rbf_cmd) return run_rbf_fit(rbf, global, out);
    if (*land_cmd) return run_landscape(land, global, out);
  } catch (const Error& e) {
    err << "surfmax: " << e.what() << '\n';
    return e.is_config_error() ? kExitConfigError : kExitRuntimeError;
  } catch (const std::exception& e) {
    err << "surfmax: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return kExitConfigError;
}

}  // namespace surfmax
